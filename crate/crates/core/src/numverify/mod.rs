//! Independent numerical checks: exact separable eigenvalues of rectangles,
//! the exact Robin torsion of a disk, the slab experiment, and one-sided
//! finite element estimates on convex polygons.

mod fem;
mod mesh;
mod sparse;

pub use fem::{
    rayleigh_upper, rayleigh_upper_with, torsion_numeric_lower, torsion_numeric_lower_with, Discretization,
    EigenEstimate, Side, SolverOptions,
};
pub use mesh::{gauss_legendre_unit, Mesh, MeshSpec};
pub use sparse::{reverse_cuthill_mckee, CsrMatrix, EnvelopeCholesky};

use crate::error::{Error, Result};
use crate::oned_robin::{mu1, RobinParams, DEFAULT_TOL};
use crate::report::fmt_real;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn positive(field: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {x}")))
    }
}

/// Lowest eigenvalue of -u'' on (-L/2, L/2) with u' ± βu = 0 at the ends:
/// the smallest root of √μ tan(√μ L/2) = β.
pub fn mu_sym(length: f64, beta: f64) -> Result<f64> {
    positive("length", length)?;
    positive("beta", beta)?;
    // t sin(tL/2) - β cos(tL/2) increases from -β to π/L on (0, π/L).
    let f = |t: f64| t * (0.5 * t * length).sin() - beta * (0.5 * t * length).cos();
    let (mut lo, mut hi) = (0.0, PI / length);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok(t * t)
}

/// First Robin eigenvalue of the Laplacian on an a × ℓ rectangle.
pub fn rect_exact_lambda_p2(a: f64, l: f64, beta: f64) -> Result<f64> {
    positive("a", a)?;
    positive("l", l)?;
    Ok(mu_sym(a, beta)? + mu_sym(l, beta)?)
}

/// πR⁴/8 + πR³/(2β), the integral of u = (R² - r²)/4 + R/(2β).
pub fn disk_torsion_exact_p2(radius: f64, beta: f64) -> Result<f64> {
    positive("R", radius)?;
    positive("beta", beta)?;
    Ok(PI * radius.powi(4) / 8.0 + PI * radius.powi(3) / (2.0 * beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabRow {
    pub l: f64,
    pub lambda: f64,
    pub s_l: f64,
    pub mu_l: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabExperimentResult {
    pub a: f64,
    pub beta: f64,
    pub rows: Vec<SlabRow>,
    /// Smallest sampled ℓ from which the ratio column never decreases.
    pub monotone_from: Option<f64>,
}

pub const SLAB_CSV_HEADER: [&str; 5] = ["l", "lambda", "s_l", "mu_l", "ratio"];

impl SlabExperimentResult {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| [r.l, r.lambda, r.s_l, r.mu_l, r.ratio].iter().map(|&x| fmt_real(x)).collect())
            .collect()
    }

    /// Ratios never decrease along the rows.
    pub fn ratio_nondecreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].ratio >= w[0].ratio)
    }
}

fn monotone_threshold(rows: &[SlabRow]) -> Option<f64> {
    let mut start = rows.len().checked_sub(1)?;
    while start > 0 && rows[start - 1].ratio <= rows[start].ratio {
        start -= 1;
    }
    Some(rows[start].l)
}

/// λ₁ of the a × ℓ rectangle against μ₁(β, s_ℓ) for each ℓ, Euclidean p = 2.
pub fn slab_experiment(a: f64, beta: f64, lengths: &[f64]) -> Result<SlabExperimentResult> {
    positive("a", a)?;
    positive("beta", beta)?;
    let rows = lengths
        .iter()
        .map(|&l| {
            let lambda = rect_exact_lambda_p2(a, l, beta)?;
            let s_l = a * l / (2.0 * (a + l));
            let mu_l = mu1(&RobinParams::new(2.0, beta, s_l)?, DEFAULT_TOL)?.mu;
            Ok(SlabRow { l, lambda, s_l, mu_l, ratio: lambda / mu_l })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone_from = monotone_threshold(&rows);
    Ok(SlabExperimentResult { a, beta, rows, monotone_from })
}
