//! Uniformly refined fan triangulations of convex polygons.

use crate::error::{Error, Result};
use crate::geometry::{euclid, sub, ConvexPolygon, Vec2};
use serde::{Deserialize, Serialize};

/// Mesh resolution: `n` subdivisions per unit length, and the number of
/// Gauss–Legendre points used on each boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub n: usize,
    pub boundary_quadrature_order: usize,
}

impl MeshSpec {
    pub fn new(n: usize, boundary_quadrature_order: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid("n", format!("needs at least 4 subdivisions, got {n}")));
        }
        if boundary_quadrature_order < 2 {
            return Err(Error::invalid(
                "boundary_quadrature_order",
                format!("needs at least 2 points, got {boundary_quadrature_order}"),
            ));
        }
        Ok(MeshSpec { n, boundary_quadrature_order })
    }

    pub fn with_n(n: usize) -> Result<Self> {
        MeshSpec::new(n, 8)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub facet: usize,
    pub length: f64,
}

/// P1 element geometry: area and the constant gradients of the three hat
/// functions.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub nodes: [usize; 3],
    pub area: f64,
    pub grads: [Vec2; 3],
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Vec2>,
    pub elements: Vec<Element>,
    pub boundary: Vec<BoundaryEdge>,
    /// Lattice subdivisions of each fan triangle.
    pub subdivisions: usize,
}

impl Mesh {
    /// Splits Ω into triangles (centroid, v_i, v_{i+1}) and refines each into
    /// k² congruent pieces with k = n·⌈longest fan edge⌉. Doubling n gives a
    /// nested refinement.
    pub fn build(poly: &ConvexPolygon, spec: &MeshSpec) -> Result<Mesh> {
        let v = poly.vertices();
        let m = v.len();
        let c = poly.centroid();
        let longest = (0..m)
            .map(|i| euclid(sub(v[i], c)).max(euclid(sub(v[(i + 1) % m], v[i]))))
            .fold(0.0, f64::max);
        let k = spec.n * (longest.ceil() as usize).max(1);

        // Node numbering: centroid, then k points on each spoke c→v_i, then
        // the interior and outer-edge points of each fan triangle.
        let spoke = |i: usize, r: usize| 1 + (i % m) * k + (r - 1);
        let per_tri = (k - 1) * k / 2;
        let inner_base = 1 + m * k;
        // Row a holds b = 1..=k-a.
        let inner_index = |a: usize, b: usize| (a - 1) * k - (a - 1) * a / 2 + (b - 1);
        let node = |t: usize, a: usize, b: usize| -> usize {
            match (a, b) {
                (0, 0) => 0,
                (a, 0) => spoke(t, a),
                (0, b) => spoke(t + 1, b),
                (a, b) => inner_base + t * per_tri + inner_index(a, b),
            }
        };

        let total = inner_base + m * per_tri;
        let mut nodes = vec![[0.0, 0.0]; total];
        let kf = k as f64;
        for t in 0..m {
            let e1 = sub(v[t], c);
            let e2 = sub(v[(t + 1) % m], c);
            for a in 0..=k {
                for b in 0..=(k - a) {
                    let (sa, sb) = (a as f64 / kf, b as f64 / kf);
                    nodes[node(t, a, b)] = [c[0] + sa * e1[0] + sb * e2[0], c[1] + sa * e1[1] + sb * e2[1]];
                }
            }
        }
        // Spoke points are written twice; make the outer vertices exact.
        for (i, &vi) in v.iter().enumerate() {
            nodes[spoke(i, k)] = vi;
        }

        let mut elements = Vec::with_capacity(m * k * k);
        let mut boundary = Vec::with_capacity(m * k);
        for t in 0..m {
            for a in 0..k {
                for b in 0..(k - a) {
                    elements.push(element(&nodes, [node(t, a, b), node(t, a + 1, b), node(t, a, b + 1)])?);
                    if a + b + 2 <= k {
                        elements.push(element(
                            &nodes,
                            [node(t, a + 1, b), node(t, a + 1, b + 1), node(t, a, b + 1)],
                        )?);
                    }
                }
            }
            let facet_len = poly.facets()[t].length;
            for a in (1..=k).rev() {
                let b = k - a;
                boundary.push(BoundaryEdge {
                    nodes: [node(t, a, b), node(t, a - 1, b + 1)],
                    facet: t,
                    length: facet_len / kf,
                });
            }
        }
        Ok(Mesh { nodes, elements, boundary, subdivisions: k })
    }

    /// Node adjacency including the diagonal.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = (0..self.nodes.len()).map(|i| vec![i]).collect();
        for e in &self.elements {
            for &i in &e.nodes {
                for &j in &e.nodes {
                    if i != j {
                        adj[i].push(j);
                    }
                }
            }
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }
}

fn element(nodes: &[Vec2], ids: [usize; 3]) -> Result<Element> {
    let [p0, p1, p2] = ids.map(|i| nodes[i]);
    let d1 = sub(p1, p0);
    let d2 = sub(p2, p0);
    let det = d1[0] * d2[1] - d1[1] * d2[0];
    if !(det > 0.0) {
        return Err(Error::numerical("mesh", format!("inverted or degenerate element {ids:?}")));
    }
    // Gradients of barycentric coordinates: rotate the opposite edge.
    let g1 = [d2[1] / det, -d2[0] / det];
    let g2 = [-d1[1] / det, d1[0] / det];
    let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
    Ok(Element { nodes: ids, area: 0.5 * det, grads: [g0, g1, g2] })
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre_unit(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Degree-5 seven-point rule on a triangle: barycentric points and weights
/// summing to one.
pub fn triangle_rule() -> [([f64; 3], f64); 7] {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wb = (155.0 + s15) / 1200.0;
    let third = 1.0 / 3.0;
    [
        ([third, third, third], 9.0 / 40.0),
        ([a, a, 1.0 - 2.0 * a], wa),
        ([a, 1.0 - 2.0 * a, a], wa),
        ([1.0 - 2.0 * a, a, a], wa),
        ([b, b, 1.0 - 2.0 * b], wb),
        ([b, 1.0 - 2.0 * b, b], wb),
        ([1.0 - 2.0 * b, b, b], wb),
    ]
}
