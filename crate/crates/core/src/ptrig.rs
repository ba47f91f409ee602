//! Generalized p-trigonometric and p-hyperbolic functions.
//!
//! `arccos_p(x) = ∫_x^1 (1 - t^p)^{-1/p} dt` and
//! `arccosh_p(x) = ∫_1^x (t^p - 1)^{-1/p} dt`, together with their inverses
//! `cos_p` (even, 2π_p-periodic) and `cosh_p` (even). For p = 2 these are
//! the classical functions.
//!
//! Both defining integrals are evaluated in a shifted variable whose
//! singular endpoint sits at the origin, and both inverses are solved for
//! that shifted variable. This keeps `1 - cos_p` and `cosh_p - 1` at full
//! relative precision, which in turn keeps the derivatives
//! `-(1 - cos_p^p)^{1/p}` and `(cosh_p^p - 1)^{1/p}` accurate near t = 0.

use crate::error::{Error, Result};
use crate::quadrature::{tanh_sinh, QuadratureConfig};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 100;

/// An exponent p in (1, ∞) together with its conjugate p' = p/(p-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent {
    p: f64,
    pconj: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::invalid("p", format!("must be a finite real > 1, got {p}")));
        }
        Ok(PExponent { p, pconj: p / (p - 1.0) })
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.p
    }

    /// The conjugate exponent p'.
    #[inline]
    pub fn conjugate(self) -> f64 {
        self.pconj
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        PExponent::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.p
    }
}

/// π_p = 2π / (p sin(π/p)).
pub fn pi_p(p: PExponent) -> f64 {
    let p = p.value();
    2.0 * PI / (p * (PI / p).sin())
}

/// π_p from its defining integral 2∫₀¹(1 - t^p)^{-1/p} dt.
pub fn pi_p_quadrature(p: PExponent, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(2.0 * PTrig::new(p, *cfg).arccos_complement(1.0)?)
}

/// Closed-form π_p, checked against quadrature of the defining integral.
pub fn pi_p_verified(p: PExponent, cfg: &QuadratureConfig) -> Result<f64> {
    let closed = pi_p(p);
    let quad = pi_p_quadrature(p, cfg)?;
    let gap = (closed - quad).abs();
    if gap > cfg.abs_tol.max(1e-12) {
        return Err(Error::numerical(
            "pi_p",
            format!("closed form {closed} and quadrature {quad} differ by {gap:e}"),
        ));
    }
    Ok(closed)
}

/// `1 - (1 - c)^p` without cancellation for small c.
#[inline]
fn one_minus_pow_complement(p: f64, c: f64) -> f64 {
    -(p * (-c).ln_1p()).exp_m1()
}

/// `(1 + u)^p - 1` without cancellation for small u.
#[inline]
fn pow_shift_minus_one(p: f64, u: f64) -> f64 {
    (p * u.ln_1p()).exp_m1()
}

/// Value and derivative of a p-trigonometric function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueDerivative {
    pub value: f64,
    pub derivative: f64,
}

/// Evaluator for the p-trigonometric family at a fixed exponent.
#[derive(Debug, Clone, Copy)]
pub struct PTrig {
    p: PExponent,
    cfg: QuadratureConfig,
    half_pi_p: f64,
}

impl PTrig {
    pub fn new(p: PExponent, cfg: QuadratureConfig) -> Self {
        PTrig { p, cfg, half_pi_p: 0.5 * pi_p(p) }
    }

    pub fn with_default_config(p: PExponent) -> Self {
        PTrig::new(p, QuadratureConfig::default())
    }

    pub fn exponent(&self) -> PExponent {
        self.p
    }

    pub fn pi_p(&self) -> f64 {
        2.0 * self.half_pi_p
    }

    /// `arccos_p(1 - c) = ∫₀^c (1 - (1-u)^p)^{-1/p} du` for c in [0, 1].
    /// Accurate where `arccos_p(x)` loses digits to the rounding of x near 1.
    pub fn arccos_complement(&self, c: f64) -> Result<f64> {
        if c.is_nan() || c > 1.0 {
            return Err(Error::invalid("c", format!("arccos_p complement needs 0 <= c <= 1, got {c}")));
        }
        if c <= 0.0 {
            return Ok(0.0);
        }
        let p = self.p.value();
        let inv = -1.0 / p;
        let est = tanh_sinh(|u| one_minus_pow_complement(p, u).powf(inv), 0.0, c, &self.cfg)?;
        Ok(est.value)
    }

    pub fn arccos(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid("x", format!("arccos_p needs 0 <= x <= 1, got {x}")));
        }
        if x == 0.0 {
            return Ok(self.half_pi_p);
        }
        self.arccos_complement(1.0 - x)
    }

    /// Inverse of `arccos_p` on [0, π_p/2], returned as the complement
    /// `c = 1 - z(t)`.
    fn quarter_inverse_complement(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if t >= self.half_pi_p {
            return Ok(1.0);
        }
        let p = self.p.value();
        // Small-t asymptotics: arccos_p(1 - c) ≈ p^{-1/p} c^{1-1/p} / (1 - 1/p).
        let guess = if t < 0.5 * self.half_pi_p {
            let q = 1.0 - 1.0 / p;
            (t * q * p.powf(1.0 / p)).powf(1.0 / q)
        } else {
            1.0 - (self.half_pi_p - t)
        };
        let slope = |c: f64| one_minus_pow_complement(p, c).powf(-1.0 / p);
        safeguarded_newton(
            |c| Ok(self.arccos_complement(c)? - t),
            slope,
            0.0,
            1.0,
            guess.clamp(0.0, 1.0),
        )
    }

    /// `1 - cos_p(t)` without cancellation near the maxima.
    pub fn one_minus_cos(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::invalid("t", format!("cos_p needs a finite argument, got {t}")));
        }
        let pi_p = self.pi_p();
        let mut r = t.rem_euclid(2.0 * pi_p);
        if r > pi_p {
            r = 2.0 * pi_p - r;
        }
        if r <= self.half_pi_p {
            self.quarter_inverse_complement(r)
        } else {
            Ok(2.0 - self.quarter_inverse_complement(pi_p - r)?)
        }
    }

    /// `cos_p(t)` and its derivative.
    pub fn cos(&self, t: f64) -> Result<ValueDerivative> {
        if !t.is_finite() {
            return Err(Error::invalid("t", format!("cos_p needs a finite argument, got {t}")));
        }
        let pi_p = self.pi_p();
        let period = 2.0 * pi_p;
        let mut r = t.rem_euclid(period);
        let mut sign_d = 1.0;
        if r > pi_p {
            r = period - r;
            sign_d = -sign_d;
        }
        let p = self.p.value();
        let (value, derivative) = if r <= self.half_pi_p {
            let c = self.quarter_inverse_complement(r)?;
            (1.0 - c, -one_minus_pow_complement(p, c).powf(1.0 / p))
        } else {
            // cos_p(r) = -z(π_p - r), derivative z'(π_p - r)
            let c = self.quarter_inverse_complement(pi_p - r)?;
            (-(1.0 - c), -one_minus_pow_complement(p, c).powf(1.0 / p))
        };
        Ok(ValueDerivative { value, derivative: sign_d * derivative })
    }

    /// `arccosh_p(1 + u) = ∫₀^u ((1+v)^p - 1)^{-1/p} dv`.
    pub fn arccosh_shift(&self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::invalid("u", format!("arccosh_p shift needs u >= 0, got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let p = self.p.value();
        let inv = -1.0 / p;
        let near = |v: f64| pow_shift_minus_one(p, v).powf(inv);
        if u <= 1.0 {
            return Ok(tanh_sinh(near, 0.0, u, &self.cfg)?.value);
        }
        // Beyond x = 2 substitute t = e^y: the integrand becomes (1 - e^{-py})^{-1/p}.
        let head = tanh_sinh(near, 0.0, 1.0, &self.cfg)?.value;
        let far = |y: f64| (inv * (-(-p * y).exp()).ln_1p()).exp();
        let tail = tanh_sinh(far, std::f64::consts::LN_2, u.ln_1p(), &self.cfg)?.value;
        Ok(head + tail)
    }

    pub fn arccosh(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) || x.is_nan() {
            return Err(Error::invalid("x", format!("arccosh_p needs x >= 1, got {x}")));
        }
        if x.is_infinite() {
            return Ok(f64::INFINITY);
        }
        self.arccosh_shift(x - 1.0)
    }

    /// `cosh_p(t) - 1` without cancellation near t = 0.
    pub fn cosh_minus_one(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::invalid("t", format!("cosh_p needs a finite argument, got {t}")));
        }
        Ok(match self.log_cosh(t.abs())? {
            Some(y) => y.exp_m1(),
            None => f64::INFINITY,
        })
    }

    /// `cosh_p(t)` and its derivative. Overflows to infinity like `f64::cosh`.
    pub fn cosh(&self, t: f64) -> Result<ValueDerivative> {
        if !t.is_finite() {
            return Err(Error::invalid("t", format!("cosh_p needs a finite argument, got {t}")));
        }
        let sign_d = if t < 0.0 { -1.0 } else { 1.0 };
        let Some(y) = self.log_cosh(t.abs())? else {
            return Ok(ValueDerivative { value: f64::INFINITY, derivative: sign_d * f64::INFINITY });
        };
        let p = self.p.value();
        let u = y.exp_m1();
        let value = 1.0 + u;
        let derivative = if value > 1e100 {
            value * ((-value.powf(-p)).ln_1p() / p).exp()
        } else {
            pow_shift_minus_one(p, u).powf(1.0 / p)
        };
        Ok(ValueDerivative { value, derivative: sign_d * derivative })
    }

    /// `ln cosh_p(t)` for t ≥ 0, or None when cosh_p(t) overflows.
    fn log_cosh(&self, t: f64) -> Result<Option<f64>> {
        if t == 0.0 {
            return Ok(Some(0.0));
        }
        let p = self.p.value();
        // (t^p - 1)^{-1/p} > 1/t, so arccosh_p(x) > ln x and the root lies below x = e^t.
        let y_max = f64::MAX.ln();
        if t >= y_max && self.arccosh(f64::MAX)? <= t {
            return Ok(None);
        }
        let mut y_hi = t.min(y_max);
        // Bracket in y = ln x; grow geometrically in case the bound above is not met.
        while self.arccosh_shift(y_hi.exp_m1())? < t {
            y_hi = (2.0 * y_hi).min(y_max);
            if y_hi == y_max {
                break;
            }
        }
        let slope = |y: f64| {
            let u = y.exp_m1();
            pow_shift_minus_one(p, u).powf(-1.0 / p) * y.exp()
        };
        // Small-t asymptotics: arccosh_p(1 + u) ≈ p^{-1/p} u^{1-1/p} / (1 - 1/p).
        let q = 1.0 - 1.0 / p;
        let small = (t * q * p.powf(1.0 / p)).powf(1.0 / q).ln_1p();
        let guess = if small < y_hi { small } else { 0.9 * y_hi };
        safeguarded_newton(|y| Ok(self.arccosh_shift(y.exp_m1())? - t), slope, 0.0, y_hi, guess).map(Some)
    }

    /// `(1 - cosh_p(t)^{-p})^{1/p}`, the ratio cosh_p'(t)/cosh_p(t) for t ≥ 0.
    /// Finite for every t, tending to 1 as t → ∞.
    pub fn tanh_ratio(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        let vd = self.cosh(t)?;
        if vd.value.is_infinite() {
            return Ok(1.0);
        }
        Ok(vd.derivative / vd.value)
    }
}

/// Newton's method on an increasing function with a bisection fallback.
/// `f(lo) <= 0 <= f(hi)` is assumed; iterates never leave the bracket.
fn safeguarded_newton<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> f64,
{
    let mut x = guess;
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..NEWTON_MAX_ITER {
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = df(x);
        let mut next = if slope.is_finite() && slope > 0.0 { x - fx / slope } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= NEWTON_TOL * x.abs().max(1e-300) || hi - lo <= NEWTON_TOL * x.abs() {
            return Ok(x);
        }
    }
    Err(Error::numerical(
        "p-trigonometric inversion",
        format!("no convergence within {NEWTON_MAX_ITER} iterations (bracket [{lo}, {hi}])"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trig(p: f64) -> PTrig {
        PTrig::with_default_config(PExponent::new(p).unwrap())
    }

    #[test]
    fn exponent_validation() {
        assert!(PExponent::new(1.0).is_err());
        assert!(PExponent::new(0.5).is_err());
        assert!(PExponent::new(f64::INFINITY).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        let p = PExponent::new(3.0).unwrap();
        assert!((1.0 / p.value() + 1.0 / p.conjugate() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pi_p_values() {
        assert_eq!(pi_p(PExponent::new(2.0).unwrap()), PI);
        let p3 = pi_p(PExponent::new(3.0).unwrap());
        assert!((p3 - 4.0 * PI / (3.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((p3 - 2.418399).abs() < 1e-6);
    }

    #[test]
    fn pi_p_quadrature_agrees() {
        let cfg = QuadratureConfig::default();
        for p in [1.5, 4.0] {
            let p = PExponent::new(p).unwrap();
            let q = pi_p_quadrature(p, &cfg).unwrap();
            assert!((q - pi_p(p)).abs() < 1e-12, "p={} quad={q} closed={}", p.value(), pi_p(p));
            pi_p_verified(p, &cfg).unwrap();
        }
    }

    #[test]
    fn arccos_examples() {
        assert!((trig(2.0).arccos(0.5).unwrap() - PI / 3.0).abs() < 1e-13);
        assert_eq!(trig(3.7).arccos(1.0).unwrap(), 0.0);
        assert!((trig(3.0).arccos(0.0).unwrap() - 1.209200).abs() < 1e-6);
        assert!(trig(2.0).arccos(1.2).is_err());
        assert!(trig(2.0).arccos(-0.1).is_err());
    }

    #[test]
    fn arccos_is_decreasing() {
        let f = trig(1.5);
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let v = f.arccos(i as f64 / 20.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn cos_examples() {
        let c = trig(2.0).cos(PI / 3.0).unwrap();
        assert!((c.value - 0.5).abs() < 1e-13);
        assert!((c.derivative + 3f64.sqrt() / 2.0).abs() < 1e-13);
        let z = trig(4.2).cos(0.0).unwrap();
        assert_eq!((z.value, z.derivative), (1.0, 0.0));
        let f = trig(3.0);
        let v = f.cos(1.0).unwrap().value;
        assert!((f.arccos(v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arccosh_examples() {
        let v = trig(2.0).arccosh(2.0).unwrap();
        assert!((v - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-13);
        assert!((v - 1.316958).abs() < 1e-6);
        assert_eq!(trig(2.5).arccosh(1.0).unwrap(), 0.0);
        assert!(trig(2.0).arccosh(0.99).is_err());
        let f = trig(3.0);
        let w = f.arccosh(2.0).unwrap();
        assert!((f.cosh(w).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cosh_examples() {
        let c = trig(2.0).cosh(1.0).unwrap();
        assert!((c.value - 1f64.cosh()).abs() < 1e-12);
        assert!((c.derivative - 1f64.sinh()).abs() < 1e-12);
        let z = trig(1.7).cosh(0.0).unwrap();
        assert_eq!((z.value, z.derivative), (1.0, 0.0));
        let f = trig(1.5);
        let v = f.cosh(0.7).unwrap().value;
        assert!((f.arccosh(v).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn cosh_large_arguments() {
        let f = trig(2.0);
        let c = f.cosh(40.0).unwrap();
        assert!(((c.value - 40f64.cosh()) / 40f64.cosh()).abs() < 1e-12);
        let big = f.cosh(800.0).unwrap();
        assert!(big.value.is_infinite());
        assert_eq!(f.tanh_ratio(800.0).unwrap(), 1.0);
        assert!((f.tanh_ratio(3.0).unwrap() - 3f64.tanh()).abs() < 1e-13);
    }

    #[test]
    fn odd_derivative_even_value() {
        let f = trig(3.0);
        let a = f.cosh(1.3).unwrap();
        let b = f.cosh(-1.3).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.derivative, -b.derivative);
        assert!(f.cos(f64::NAN).is_err());
        assert!(f.cosh(f64::INFINITY).is_err());
    }

    #[test]
    fn quarter_period_zero_crossing() {
        for p in [1.2, 2.0, 5.0] {
            let f = trig(p);
            let c = f.cos(f.pi_p() / 2.0).unwrap();
            assert!(c.value.abs() < 1e-14);
            assert!((c.derivative + 1.0).abs() < 1e-14);
        }
    }
}
