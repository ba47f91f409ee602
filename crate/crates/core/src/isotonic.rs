//! Pool-adjacent-violators projection onto monotone sequences.

/// Weighted least-squares projection of `y` onto nonincreasing sequences.
pub fn project_nonincreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    project_nondecreasing(&neg, w).into_iter().map(|v| -v).collect()
}

/// Weighted least-squares projection of `y` onto nondecreasing sequences.
pub fn project_nondecreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    assert_eq!(y.len(), w.len(), "values and weights differ in length");
    // Blocks as (weighted mean, total weight, count).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&v, &wt) in y.iter().zip(w) {
        blocks.push((v, wt, 1));
        while blocks.len() >= 2 {
            let n = blocks.len();
            let (m2, w2, c2) = blocks[n - 1];
            let (m1, w1, c1) = blocks[n - 2];
            if m1 <= m2 {
                break;
            }
            let wsum = w1 + w2;
            blocks.truncate(n - 2);
            blocks.push(((m1 * w1 + m2 * w2) / wsum, wsum, c1 + c2));
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (m, _, c) in blocks {
        out.extend(std::iter::repeat_n(m, c));
    }
    out
}
