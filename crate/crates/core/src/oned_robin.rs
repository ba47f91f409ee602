//! First eigenvalue μ₁(β, s₀) of the one-dimensional Robin–Neumann problem
//!
//! ```text
//! (|X'|^{p-2} X')' + μ |X|^{p-2} X = 0   in (0, s₀)
//! X'(0) = 0
//! |X'(s₀)|^{p-2} X'(s₀) + β |X(s₀)|^{p-2} X(s₀) = 0
//! ```
//!
//! The eigenfunction is `cos_p(ω s)` for β > 0 and `cosh_p(ω s)` for β < 0,
//! with ω = (|μ|/(p-1))^{1/p}, so μ₁ is the root of a scalar boundary
//! relation. Two discrete Rayleigh-quotient minimizers serve as independent
//! checks: one over all piecewise-linear functions and one restricted to
//! positive nonincreasing ones.

use crate::error::{Error, Result};
use crate::isotonic::project_nonincreasing;
use crate::ptrig::{PExponent, PTrig, ValueDerivative};
use crate::quadrature::QuadratureConfig;
use serde::{Deserialize, Serialize};

/// Default relative tolerance for the μ₁ bisection.
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_BISECTION: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobinParams {
    pub p: PExponent,
    pub beta: f64,
    pub s0: f64,
}

impl RobinParams {
    pub fn new(p: f64, beta: f64, s0: f64) -> Result<Self> {
        let p = PExponent::new(p)?;
        if !beta.is_finite() {
            return Err(Error::invalid("beta", format!("must be finite, got {beta}")));
        }
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(Error::invalid("s0", format!("must be positive, got {s0}")));
        }
        Ok(RobinParams { p, beta, s0 })
    }

    /// ω = (|μ|/(p-1))^{1/p}.
    fn frequency(&self, mu: f64) -> f64 {
        let p = self.p.value();
        (mu.abs() / (p - 1.0)).powf(1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Trigonometric,
    Zero,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mu1Result {
    pub mu: f64,
    pub branch: Branch,
    /// |G(μ)| of the boundary relation at the returned root.
    pub boundary_residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// (p-1)(π_p/(2 s₀))^p, the one-dimensional Dirichlet–Neumann eigenvalue.
pub fn dirichlet_ceiling(p: PExponent, s0: f64) -> f64 {
    let pv = p.value();
    (pv - 1.0) * (crate::ptrig::pi_p(p) / (2.0 * s0)).powf(pv)
}

/// -(p-1)|β|^{p'}.
pub fn negative_beta_ceiling(p: PExponent, beta: f64) -> f64 {
    -(p.value() - 1.0) * beta.abs().powf(p.conjugate())
}

/// Boundary relation for β > 0, increasing in μ on (0, dirichlet_ceiling]:
/// G(μ) = ω^{p-1} |cos_p'(ω s₀)|^{p-1} - β cos_p(ω s₀)^{p-1}.
fn trig_relation(trig: &PTrig, params: &RobinParams, mu: f64) -> Result<f64> {
    let p = params.p.value();
    let omega = params.frequency(mu);
    let x = trig.cos(omega * params.s0)?;
    let x0 = x.value.max(0.0);
    Ok((omega * x.derivative.abs()).powf(p - 1.0) - params.beta * x0.powf(p - 1.0))
}

/// Boundary relation for β < 0 divided by cosh_p(ω s₀)^{p-1}:
/// H(μ) = ω^{p-1} T^{p-1} - |β| with T = cosh_p'/cosh_p, decreasing in μ.
fn hyperbolic_relation(trig: &PTrig, params: &RobinParams, mu: f64) -> Result<f64> {
    let p = params.p.value();
    let omega = params.frequency(mu);
    let ratio = trig.tanh_ratio(omega * params.s0)?;
    Ok((omega * ratio).powf(p - 1.0) - params.beta.abs())
}

/// Bisection on an increasing function with f(lo) < 0 < f(hi).
fn bisect<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut iterations = 0;
    while iterations < MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs() {
            break;
        }
        iterations += 1;
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, iterations));
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), iterations))
}

/// μ₁(β, s₀) with the default quadrature configuration.
pub fn mu1(params: &RobinParams, tol: f64) -> Result<Mu1Result> {
    mu1_with(params, tol, &QuadratureConfig::default())
}

pub fn mu1_with(params: &RobinParams, tol: f64, cfg: &QuadratureConfig) -> Result<Mu1Result> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("tol", format!("must lie in (0, 1), got {tol}")));
    }
    let trig = PTrig::new(params.p, *cfg);
    let beta = params.beta;
    if beta == 0.0 {
        return Ok(Mu1Result {
            mu: 0.0,
            branch: Branch::Zero,
            boundary_residual: 0.0,
            bracket: (0.0, 0.0),
            iterations: 0,
        });
    }
    if beta > 0.0 {
        let g = |mu: f64| trig_relation(&trig, params, mu);
        let ceiling = dirichlet_ceiling(params.p, params.s0);
        let mut hi = ceiling;
        // The constant test function gives μ₁ ≤ β/s₀.
        let constant = beta / params.s0;
        if constant < hi && g(constant)? > 0.0 {
            hi = constant;
        }
        let mut lo = 1e-3 * hi;
        let mut g_lo = g(lo)?;
        while g_lo >= 0.0 {
            lo *= 1e-3;
            if lo < 1e-300 {
                return Err(Error::BracketFailure { lo, hi, f_lo: g_lo, f_hi: g(hi)? });
            }
            g_lo = g(lo)?;
        }
        let g_hi = g(hi)?;
        if g_hi <= 0.0 {
            return Err(Error::BracketFailure { lo, hi, f_lo: g_lo, f_hi: g_hi });
        }
        let (mu, iterations) = bisect(g, lo, hi, tol)?;
        Ok(Mu1Result {
            mu,
            branch: Branch::Trigonometric,
            boundary_residual: g(mu)?.abs(),
            bracket: (lo, hi),
            iterations,
        })
    } else {
        let h = |mu: f64| hyperbolic_relation(&trig, params, mu);
        let top = negative_beta_ceiling(params.p, beta);
        let h_top = h(top)?;
        // H(top) = |β|(tanh_p^{p-1}(ω s₀) - 1) ≤ 0; a positive value is
        // rounding once ω s₀ is large enough that tanh_p is 1 in f64.
        if h_top.abs() <= 64.0 * f64::EPSILON * beta.abs() {
            return Ok(Mu1Result {
                mu: top,
                branch: Branch::Hyperbolic,
                boundary_residual: h_top.abs(),
                bracket: (top, top),
                iterations: 0,
            });
        }
        if h_top > 0.0 {
            return Err(Error::BracketFailure { lo: top, hi: top, f_lo: h_top, f_hi: h_top });
        }
        let mut bottom = 2.0 * top;
        let mut h_bottom = h(bottom)?;
        let mut grow = 0;
        while h_bottom <= 0.0 {
            bottom *= 2.0;
            grow += 1;
            if grow > 2000 || !bottom.is_finite() {
                return Err(Error::BracketFailure { lo: bottom, hi: top, f_lo: h_bottom, f_hi: h_top });
            }
            h_bottom = h(bottom)?;
        }
        // -H is increasing in μ.
        let (mu, iterations) = bisect(|mu| Ok(-h(mu)?), bottom, top, tol)?;
        Ok(Mu1Result {
            mu,
            branch: Branch::Hyperbolic,
            boundary_residual: h(mu)?.abs(),
            bracket: (bottom, top),
            iterations,
        })
    }
}

/// Relative residual of the closed-form eigenvalue equation at μ:
/// μ/(p-1) = β^{p'}/(cos_p^{-p}(ω s₀) - 1) for β > 0 and
/// -μ/(p-1) = |β|^{p'}/(1 - cosh_p^{-p}(ω s₀)) for β < 0.
pub fn transcendental_residual(params: &RobinParams, mu: f64) -> Result<f64> {
    let trig = PTrig::with_default_config(params.p);
    let p = params.p.value();
    let beta = params.beta;
    if beta == 0.0 {
        return Ok(mu.abs());
    }
    let omega = params.frequency(mu);
    let lhs = omega.powf(p);
    let rhs = if beta > 0.0 {
        // cos_p^{-p} - 1 = |cos_p'|^p / cos_p^p
        let x = trig.cos(omega * params.s0)?;
        beta.powf(params.p.conjugate()) * (x.value / x.derivative.abs()).powf(p)
    } else {
        let ratio = trig.tanh_ratio(omega * params.s0)?;
        beta.abs().powf(params.p.conjugate()) / ratio.powf(p)
    };
    Ok((lhs - rhs).abs() / lhs.abs())
}

/// Closed-form first eigenfunction (X, X') normalized by X(0) = 1.
pub fn eigenfunction_samples(
    params: &RobinParams,
    result: &Mu1Result,
    grid: &[f64],
) -> Result<Vec<ValueDerivative>> {
    let slack = 1e-12 * params.s0;
    if let Some(&s) = grid.iter().find(|&&s| !(s >= -slack && s <= params.s0 + slack)) {
        return Err(Error::invalid("grid", format!("point {s} outside [0, {}]", params.s0)));
    }
    let trig = PTrig::with_default_config(params.p);
    let omega = params.frequency(result.mu);
    grid.iter()
        .map(|&s| {
            let s = s.clamp(0.0, params.s0);
            match result.branch {
                Branch::Zero => Ok(ValueDerivative { value: 1.0, derivative: 0.0 }),
                Branch::Trigonometric => {
                    let x = trig.cos(omega * s)?;
                    Ok(ValueDerivative { value: x.value, derivative: omega * x.derivative })
                }
                Branch::Hyperbolic => {
                    let x = trig.cosh(omega * s)?;
                    Ok(ValueDerivative { value: x.value, derivative: omega * x.derivative })
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Smallest discrete quotient reached.
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

const ORACLE_MAX_ITER: usize = 10_000;
const ORACLE_REL_TOL: f64 = 1e-12;
/// Positivity floor in the monotone class.
pub const MONOTONE_FLOOR: f64 = 1e-8;

/// Piecewise-linear discretization of the one-dimensional Rayleigh quotient
/// on a uniform grid of n points.
struct DiscreteQuotient {
    p: f64,
    beta: f64,
    h: f64,
    weights: Vec<f64>,
}

#[inline]
fn signed_pow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

impl DiscreteQuotient {
    fn new(params: &RobinParams, n: usize) -> Self {
        let h = params.s0 / (n - 1) as f64;
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        DiscreteQuotient { p: params.p.value(), beta: params.beta, h, weights }
    }

    fn numerator(&self, v: &[f64]) -> f64 {
        let p = self.p;
        let cells: f64 = v.windows(2).map(|w| self.h * ((w[1] - w[0]) / self.h).abs().powf(p)).sum();
        cells + self.beta * v[v.len() - 1].abs().powf(p)
    }

    fn denominator(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.weights).map(|(x, w)| w * x.abs().powf(self.p)).sum()
    }

    fn quotient(&self, v: &[f64]) -> f64 {
        self.numerator(v) / self.denominator(v)
    }

    fn gradient(&self, v: &[f64]) -> (f64, Vec<f64>) {
        let p = self.p;
        let n = v.len();
        let num = self.numerator(v);
        let den = self.denominator(v);
        let q = num / den;
        let mut g = vec![0.0; n];
        for i in 0..n - 1 {
            let flux = p * signed_pow((v[i + 1] - v[i]) / self.h, p - 1.0);
            g[i] -= flux;
            g[i + 1] += flux;
        }
        g[n - 1] += self.beta * p * signed_pow(v[n - 1], p - 1.0);
        for i in 0..n {
            g[i] = (g[i] - q * self.weights[i] * p * signed_pow(v[i], p - 1.0)) / den;
        }
        (q, g)
    }

    /// Solves (K + M) x = r with K the discrete -d²/ds² stiffness and M the
    /// lumped mass; used to precondition the gradient.
    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let n = r.len();
        let k = 1.0 / self.h;
        let mut diag: Vec<f64> = (0..n)
            .map(|i| {
                let edges = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
                edges * k + self.weights[i]
            })
            .collect();
        let off = -k;
        let mut rhs = r.to_vec();
        for i in 1..n {
            let m = off / diag[i - 1];
            diag[i] -= m * off;
            rhs[i] -= m * rhs[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (rhs[i] - off * x[i + 1]) / diag[i];
        }
        x
    }

    fn normalize(&self, v: &mut [f64]) {
        let scale = self.denominator(v).powf(-1.0 / self.p);
        if scale.is_finite() {
            v.iter_mut().for_each(|x| *x *= scale);
        }
    }
}

/// Minimizes the discretized Rayleigh quotient over piecewise-linear
/// functions on an n-point grid. With `constrained`, candidates are kept
/// nonincreasing and bounded below by [`MONOTONE_FLOOR`].
pub fn mu1_discrete_oracle(params: &RobinParams, n: usize, constrained: bool) -> Result<OracleResult> {
    if n < 8 {
        return Err(Error::invalid("n", format!("need at least 8 grid points, got {n}")));
    }
    let dq = DiscreteQuotient::new(params, n);
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 * dq.h).min(params.s0)).collect();
    let exact = mu1(params, DEFAULT_TOL)?;
    let shape = eigenfunction_samples(params, &exact, &grid)?;
    let unit = vec![1.0; n];
    let admissible = |v: Vec<f64>| -> Vec<f64> {
        if constrained {
            project_nonincreasing(&v, &unit).into_iter().map(|x| x.max(MONOTONE_FLOOR)).collect()
        } else {
            v
        }
    };

    let mut v = admissible(shape.iter().map(|x| 0.9 * x.value + 0.1).collect());
    dq.normalize(&mut v);
    let mut q = dq.quotient(&v);
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < ORACLE_MAX_ITER {
        iterations += 1;
        let (_, grad) = dq.gradient(&v);
        let dir = dq.precondition(&grad);
        let slope: f64 = grad.iter().zip(&dir).map(|(a, b)| a * b).sum();
        if !(slope > 1e-300) {
            converged = true;
            break;
        }
        let mut accepted = None;
        while step > 1e-20 {
            let trial: Vec<f64> = v.iter().zip(&dir).map(|(x, d)| x - step * d).collect();
            let mut trial = admissible(trial);
            dq.normalize(&mut trial);
            let qt = dq.quotient(&trial);
            // Armijo on the unconstrained path; plain decrease after projection.
            let target = if constrained { q } else { q - 1e-4 * step * slope };
            if qt.is_finite() && qt <= target && (qt < q || !constrained) {
                accepted = Some((trial, qt));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, qt)) = accepted else {
            converged = true;
            break;
        };
        let change = (q - qt).abs();
        v = trial;
        q = qt;
        step = (2.0 * step).min(1e6);
        if change <= ORACLE_REL_TOL * q.abs().max(1e-300) {
            converged = true;
            break;
        }
    }
    Ok(OracleResult { value: q, converged, iterations })
}
