//! Symmetric sparse matrices and a skyline Cholesky factorization under
//! reverse Cuthill–McKee ordering.

use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Compressed sparse rows with sorted column indices. Both triangles are
/// stored so the matrix-vector product is a plain row sweep.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the sparsity pattern given by an adjacency list
    /// (each row must include its diagonal).
    pub fn with_pattern(adjacency: &[Vec<usize>]) -> Self {
        let n = adjacency.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for row in adjacency {
            let mut r = row.clone();
            r.sort_unstable();
            r.dedup();
            cols.extend(r);
            row_ptr.push(cols.len());
        }
        let vals = vec![0.0; cols.len()];
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn position(&self, i: usize, j: usize) -> usize {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        self.row_ptr[i] + row.binary_search(&j).expect("entry outside sparsity pattern")
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.position(i, j);
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).map(|k| self.vals[self.row_ptr[i] + k]).unwrap_or(0.0)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// a·self + b·other; both must share a pattern.
    pub fn combine(&self, a: f64, other: &CsrMatrix, b: f64) -> CsrMatrix {
        debug_assert_eq!(self.cols, other.cols);
        let vals = self.vals.iter().zip(&other.vals).map(|(x, y)| a * x + b * y).collect();
        CsrMatrix { vals, ..self.clone() }
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(x)).map(|(a, b)| a * b).sum()
    }

    fn neighbours(&self, i: usize) -> &[usize] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }
}

/// Reverse Cuthill–McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.neighbours(i).len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).expect("unvisited node");
        let start = pseudo_peripheral(a, seed, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = a.neighbours(v).iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Breadth-first level structure: (eccentricity, last level).
fn levels(a: &CsrMatrix, start: usize) -> (usize, Vec<usize>) {
    let mut dist = vec![usize::MAX; a.dim()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = vec![start];
    let mut depth = 0;
    while let Some(v) = queue.pop_front() {
        for &w in a.neighbours(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                if dist[w] > depth {
                    depth = dist[w];
                    last.clear();
                }
                last.push(w);
                queue.push_back(w);
            }
        }
    }
    (depth, last)
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut current = seed;
    let (mut ecc, mut last) = levels(a, current);
    for _ in 0..8 {
        let candidate = *last.iter().min_by_key(|&&w| (degree[w], w)).expect("nonempty level");
        let (e, l) = levels(a, candidate);
        if e <= ecc {
            break;
        }
        current = candidate;
        ecc = e;
        last = l;
    }
    current
}

/// Row-oriented envelope Cholesky factor L of P A Pᵀ.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    row_start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix, perm: &[usize]) -> Result<Self> {
        let n = a.dim();
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let first: Vec<usize> = (0..n)
            .map(|i| a.neighbours(perm[i]).iter().map(|&j| inverse[j]).min().unwrap_or(i).min(i))
            .collect();
        let mut row_start = Vec::with_capacity(n + 1);
        row_start.push(0);
        for i in 0..n {
            row_start.push(row_start[i] + i - first[i] + 1);
        }
        let mut data = vec![0.0; row_start[n]];
        for i in 0..n {
            for (j, v) in a.row(perm[i]) {
                let jn = inverse[j];
                if jn <= i {
                    data[row_start[i] + jn - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let ri = row_start[i] + k0 - fi;
                let rj = row_start[j] + k0 - fj;
                let len = j - k0;
                let s: f64 = data[ri..ri + len].iter().zip(&data[rj..rj + len]).map(|(x, y)| x * y).sum();
                let idx = row_start[i] + j - fi;
                if j < i {
                    data[idx] = (data[idx] - s) / data[row_start[j + 1] - 1];
                } else {
                    let d = data[idx] - s;
                    if !(d > 0.0) {
                        return Err(Error::numerical("cholesky", format!("non-positive pivot {d:e} at row {i}")));
                    }
                    data[idx] = d.sqrt();
                }
            }
        }
        Ok(EnvelopeCholesky { perm: perm.to_vec(), first, row_start, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let r = &self.data[self.row_start[i]..self.row_start[i + 1]];
            let s: f64 = r[..i - fi].iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] = (y[i] - s) / r[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let r = &self.data[self.row_start[i]..self.row_start[i + 1]];
            y[i] /= r[i - fi];
            let yi = y[i];
            for (k, l) in r[..i - fi].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian plus identity on a path graph, numbered scrambled.
    fn path_matrix(n: usize) -> CsrMatrix {
        let label = |i: usize| (i * 7) % n;
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            adj[label(i)].push(label(i));
            if i + 1 < n {
                adj[label(i)].push(label(i + 1));
                adj[label(i + 1)].push(label(i));
            }
        }
        let mut a = CsrMatrix::with_pattern(&adj);
        for i in 0..n {
            a.add(label(i), label(i), 3.0);
            if i + 1 < n {
                a.add(label(i), label(i + 1), -1.0);
                a.add(label(i + 1), label(i), -1.0);
            }
        }
        a
    }

    #[test]
    fn rcm_shrinks_bandwidth_and_solves() {
        let n = 101;
        let a = path_matrix(n);
        let perm = reverse_cuthill_mckee(&a);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let chol = EnvelopeCholesky::factor(&a, &perm).unwrap();
        assert!(chol.envelope_size() <= 2 * n);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = chol.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = path_matrix(10).combine(1.0, &path_matrix(10), -2.0);
        let perm = reverse_cuthill_mckee(&a);
        assert!(EnvelopeCholesky::factor(&a, &perm).is_err());
    }
}
