use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn euclid(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
fn unit(theta: f64) -> Vec2 {
    [theta.cos(), theta.sin()]
}

/// JSON-facing description of an anisotropic norm on ℝ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NormDescriptor {
    Euclidean,
    /// F(ξ) = √(ξᵀAξ) with A symmetric positive definite.
    Quadratic {
        #[serde(rename = "A")]
        a: [[f64; 2]; 2],
    },
    /// F(ξ) = (|ξ₁|^q + |ξ₂|^q)^{1/q}.
    Lq { q: f64 },
    /// F(ξ) = factor · base(ξ).
    Scaled { factor: f64, base: Box<NormDescriptor> },
}

impl NormDescriptor {
    fn validate(&self) -> Result<()> {
        match self {
            NormDescriptor::Euclidean => Ok(()),
            NormDescriptor::Quadratic { a } => {
                if a.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("norm.A", "entries must be finite"));
                }
                if (a[0][1] - a[1][0]).abs() > 1e-12 * (a[0][1].abs() + a[1][0].abs()).max(1.0) {
                    return Err(Error::invalid("norm.A", "matrix must be symmetric"));
                }
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                if !(a[0][0] > 0.0 && det > 0.0) {
                    return Err(Error::invalid("norm.A", "matrix must be positive definite"));
                }
                Ok(())
            }
            NormDescriptor::Lq { q } => {
                if !(q.is_finite() && *q > 1.0) {
                    return Err(Error::invalid("norm.q", format!("must be a finite real > 1, got {q}")));
                }
                Ok(())
            }
            NormDescriptor::Scaled { factor, base } => {
                if !(factor.is_finite() && *factor > 0.0) {
                    return Err(Error::invalid("norm.factor", format!("must be positive, got {factor}")));
                }
                base.validate()
            }
        }
    }

    fn value(&self, xi: Vec2) -> f64 {
        match self {
            NormDescriptor::Euclidean => euclid(xi),
            NormDescriptor::Quadratic { a } => quad_form(a, xi).max(0.0).sqrt(),
            NormDescriptor::Lq { q } => lq_value(*q, xi),
            NormDescriptor::Scaled { factor, base } => factor * base.value(xi),
        }
    }

    /// Gradient at ξ ≠ 0.
    fn gradient(&self, xi: Vec2) -> Vec2 {
        match self {
            NormDescriptor::Euclidean => {
                let r = euclid(xi);
                [xi[0] / r, xi[1] / r]
            }
            NormDescriptor::Quadratic { a } => {
                let f = quad_form(a, xi).sqrt();
                let ax = [a[0][0] * xi[0] + a[0][1] * xi[1], a[1][0] * xi[0] + a[1][1] * xi[1]];
                [ax[0] / f, ax[1] / f]
            }
            NormDescriptor::Lq { q } => {
                let f = lq_value(*q, xi);
                let g = |x: f64| x.signum() * (x.abs() / f).powf(q - 1.0);
                [g(xi[0]), g(xi[1])]
            }
            NormDescriptor::Scaled { factor, base } => {
                let g = base.gradient(xi);
                [factor * g[0], factor * g[1]]
            }
        }
    }

    /// Closed-form polar norm F°.
    fn polar(&self, v: Vec2) -> f64 {
        match self {
            NormDescriptor::Euclidean => euclid(v),
            NormDescriptor::Quadratic { a } => {
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
                quad_form(&inv, v).max(0.0).sqrt()
            }
            NormDescriptor::Lq { q } => lq_value(q / (q - 1.0), v),
            NormDescriptor::Scaled { factor, base } => base.polar(v) / factor,
        }
    }

    /// The descriptor of F° where it has a closed form in the same family.
    pub fn polar_descriptor(&self) -> NormDescriptor {
        match self {
            NormDescriptor::Euclidean => NormDescriptor::Euclidean,
            NormDescriptor::Quadratic { a } => {
                let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                NormDescriptor::Quadratic {
                    a: [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]],
                }
            }
            NormDescriptor::Lq { q } => NormDescriptor::Lq { q: q / (q - 1.0) },
            NormDescriptor::Scaled { factor, base } => {
                NormDescriptor::Scaled { factor: 1.0 / factor, base: Box::new(base.polar_descriptor()) }
            }
        }
    }

    /// True when F is quadratic (F² is a quadratic form), so the p = 2
    /// energy is linear-algebraic.
    pub fn quadratic_matrix(&self) -> Option<[[f64; 2]; 2]> {
        match self {
            NormDescriptor::Euclidean => Some([[1.0, 0.0], [0.0, 1.0]]),
            NormDescriptor::Quadratic { a } => Some(*a),
            NormDescriptor::Lq { q } if *q == 2.0 => Some([[1.0, 0.0], [0.0, 1.0]]),
            NormDescriptor::Lq { .. } => None,
            NormDescriptor::Scaled { factor, base } => base.quadratic_matrix().map(|m| {
                let f2 = factor * factor;
                [[f2 * m[0][0], f2 * m[0][1]], [f2 * m[1][0], f2 * m[1][1]]]
            }),
        }
    }

    fn lq_below_two(&self) -> bool {
        match self {
            NormDescriptor::Lq { q } => *q < 2.0,
            NormDescriptor::Scaled { base, .. } => base.lq_below_two(),
            _ => false,
        }
    }
}

#[inline]
fn quad_form(a: &[[f64; 2]; 2], x: Vec2) -> f64 {
    a[0][0] * x[0] * x[0] + (a[0][1] + a[1][0]) * x[0] * x[1] + a[1][1] * x[1] * x[1]
}

fn lq_value(q: f64, xi: Vec2) -> f64 {
    let m = xi[0].abs().max(xi[1].abs());
    if m == 0.0 {
        return 0.0;
    }
    let s = (xi[0].abs() / m).powf(q) + (xi[1].abs() / m).powf(q);
    m * s.powf(1.0 / q)
}

/// A validated anisotropic norm with its equivalence constants
/// `a|ξ| ≤ F(ξ) ≤ b|ξ|` and a smoothness diagnostic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NormDescriptor", into = "NormDescriptor")]
pub struct Norm {
    descriptor: NormDescriptor,
    lower: f64,
    upper: f64,
    admissibility_warning: Option<String>,
}

impl PartialEq for Norm {
    fn eq(&self, other: &Self) -> bool {
        self.descriptor == other.descriptor
    }
}

impl TryFrom<NormDescriptor> for Norm {
    type Error = Error;
    fn try_from(d: NormDescriptor) -> Result<Self> {
        Norm::new(d)
    }
}

impl From<Norm> for NormDescriptor {
    fn from(n: Norm) -> Self {
        n.descriptor
    }
}

const BOUND_SAMPLES: usize = 4096;
const POLAR_SAMPLES: usize = 720;
const HESSIAN_SAMPLES: usize = 720;

impl Norm {
    pub fn new(descriptor: NormDescriptor) -> Result<Self> {
        descriptor.validate()?;
        let mut norm = Norm { descriptor, lower: 0.0, upper: 0.0, admissibility_warning: None };
        let (lower, upper) = norm.equivalence_constants();
        norm.lower = lower;
        norm.upper = upper;
        norm.admissibility_warning = norm.check_admissibility();
        Ok(norm)
    }

    pub fn euclidean() -> Self {
        Norm::new(NormDescriptor::Euclidean).expect("euclidean norm is valid")
    }

    pub fn descriptor(&self) -> &NormDescriptor {
        &self.descriptor
    }

    /// Constants a, b with a|ξ| ≤ F(ξ) ≤ b|ξ|.
    pub fn equivalence(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Set when the norm fails (numerically) the requirement that F² have a
    /// positive-definite Hessian away from the origin, or is not C² there.
    pub fn admissibility_warning(&self) -> Option<&str> {
        self.admissibility_warning.as_deref()
    }

    pub fn value(&self, xi: Vec2) -> f64 {
        self.descriptor.value(xi)
    }

    /// F(ξ) and ∇F(ξ); the gradient is undefined at the origin.
    pub fn eval(&self, xi: Vec2) -> Result<(f64, Vec2)> {
        if xi == [0.0, 0.0] {
            return Err(Error::GradientAtOrigin);
        }
        Ok((self.descriptor.value(xi), self.descriptor.gradient(xi)))
    }

    /// F°(v) = sup_{ξ≠0} ⟨ξ, v⟩ / F(ξ), closed form.
    pub fn polar(&self, v: Vec2) -> f64 {
        self.descriptor.polar(v)
    }

    /// F°(v) by direct maximization of ⟨ξ, v⟩/F(ξ) over unit directions:
    /// a 720-point scan followed by golden-section refinement.
    pub fn polar_numeric(&self, v: Vec2) -> f64 {
        if v == [0.0, 0.0] {
            return 0.0;
        }
        let ratio = |theta: f64| {
            let xi = unit(theta);
            dot(xi, v) / self.value(xi)
        };
        maximize_on_circle(ratio, POLAR_SAMPLES)
    }

    fn equivalence_constants(&self) -> (f64, f64) {
        let f = |theta: f64| self.value(unit(theta));
        let upper = maximize_on_circle(f, BOUND_SAMPLES);
        let lower = -maximize_on_circle(|t| -f(t), BOUND_SAMPLES);
        (lower, upper)
    }

    fn check_admissibility(&self) -> Option<String> {
        if self.descriptor.lq_below_two() {
            return Some("lq norm with q < 2 is not twice differentiable on the axes".into());
        }
        // Hessian of F²/2 is 0-homogeneous; sample it on the unit circle by
        // central differences of the analytic gradient F·∇F.
        let half_sq_grad = |xi: Vec2| {
            let f = self.value(xi);
            let g = self.descriptor.gradient(xi);
            [f * g[0], f * g[1]]
        };
        let h = 1e-4;
        let mut min_eig = f64::INFINITY;
        for k in 0..HESSIAN_SAMPLES {
            let xi = unit(2.0 * PI * k as f64 / HESSIAN_SAMPLES as f64);
            let mut hess = [[0.0; 2]; 2];
            for j in 0..2 {
                let mut plus = xi;
                let mut minus = xi;
                plus[j] += h;
                minus[j] -= h;
                let gp = half_sq_grad(plus);
                let gm = half_sq_grad(minus);
                hess[0][j] = (gp[0] - gm[0]) / (2.0 * h);
                hess[1][j] = (gp[1] - gm[1]) / (2.0 * h);
            }
            let tr = hess[0][0] + hess[1][1];
            let off = 0.5 * (hess[0][1] + hess[1][0]);
            let disc = ((hess[0][0] - hess[1][1]).powi(2) + 4.0 * off * off).sqrt();
            min_eig = min_eig.min(0.5 * (tr - disc));
        }
        let threshold = 1e-3 * self.lower * self.lower;
        (min_eig < threshold).then(|| {
            format!("Hessian of F^2/2 nearly singular: smallest sampled eigenvalue {min_eig:.3e}")
        })
    }
}

/// Maximum of a smooth-ish 2π-periodic function: scan, then golden-section
/// search on the bracket around the best sample.
fn maximize_on_circle<F: Fn(f64) -> f64>(f: F, samples: usize) -> f64 {
    let step = 2.0 * PI / samples as f64;
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..samples {
        let v = f(k as f64 * step);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let center = best_k as f64 * step;
    let (mut lo, mut hi) = (center - step, center + step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        }
    }
    best.max(f1).max(f2)
}

/// Area of the Wulff shape {F° < 1}, by integrating ½ r(θ)² with
/// r(θ) = 1/F°(cos θ, sin θ) over `samples` equally spaced directions.
pub fn wulff_area(norm: &Norm, samples: usize) -> Result<f64> {
    if samples < 64 {
        return Err(Error::invalid("samples", format!("need at least 64, got {samples}")));
    }
    let step = 2.0 * PI / samples as f64;
    let sum: f64 = (0..samples)
        .map(|k| {
            let r = 1.0 / norm.polar(unit(k as f64 * step));
            r * r
        })
        .sum();
    Ok(0.5 * sum * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lq(q: f64) -> Norm {
        Norm::new(NormDescriptor::Lq { q }).unwrap()
    }

    fn scaled(f: f64) -> Norm {
        Norm::new(NormDescriptor::Scaled { factor: f, base: Box::new(NormDescriptor::Euclidean) }).unwrap()
    }

    #[test]
    fn euclidean_eval() {
        let (v, g) = Norm::euclidean().eval([3.0, 4.0]).unwrap();
        assert_eq!(v, 5.0);
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
        assert!(matches!(Norm::euclidean().eval([0.0, 0.0]), Err(Error::GradientAtOrigin)));
    }

    #[test]
    fn lq_gradient_matches_finite_differences() {
        let n = lq(3.0);
        let xi = [1.0, 1.0];
        let (v, g) = n.eval(xi).unwrap();
        assert!((v - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let h = 1e-6;
        for j in 0..2 {
            let mut a = xi;
            let mut b = xi;
            a[j] += h;
            b[j] -= h;
            let fd = (n.value(a) - n.value(b)) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-9);
        }
        assert!((dot(xi, g) - v).abs() < 1e-14);
    }

    #[test]
    fn scaled_eval() {
        let (v, g) = scaled(2.0).eval([1.0, 0.0]).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(g, [2.0, 0.0]);
    }

    #[test]
    fn polar_examples() {
        assert_eq!(Norm::euclidean().polar([3.0, 4.0]), 5.0);
        let n = lq(3.0);
        assert!((n.polar([1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((n.polar_numeric([1.0, 0.0]) - 1.0).abs() < 1e-12);
        for n in [Norm::euclidean(), lq(3.0), scaled(2.0)] {
            assert_eq!(n.polar([0.0, 0.0]), 0.0);
            assert_eq!(n.polar_numeric([0.0, 0.0]), 0.0);
        }
    }

    #[test]
    fn closed_form_polar_matches_numeric() {
        let norms = [
            Norm::euclidean(),
            lq(3.0),
            lq(1.5),
            scaled(0.7),
            Norm::new(NormDescriptor::Quadratic { a: [[2.0, 0.5], [0.5, 1.0]] }).unwrap(),
        ];
        for n in &norms {
            for k in 0..37 {
                let v = [(k as f64 * 0.3).cos() * 1.7, (k as f64 * 0.3).sin() * 0.9];
                let a = n.polar(v);
                let b = n.polar_numeric(v);
                assert!((a - b).abs() < 1e-10 * a.max(1.0), "{:?} {v:?}: {a} vs {b}", n.descriptor());
            }
        }
    }

    #[test]
    fn equivalence_constants() {
        let (a, b) = Norm::euclidean().equivalence();
        assert!((a - 1.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        let (a, b) = Norm::new(NormDescriptor::Quadratic { a: [[1.0, 0.0], [0.0, 4.0]] }).unwrap().equivalence();
        assert!((a - 1.0).abs() < 1e-9 && (b - 2.0).abs() < 1e-9);
        let (a, b) = lq(3.0).equivalence();
        assert!((a - 2f64.powf(1.0 / 3.0 - 0.5)).abs() < 1e-9 && (b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(Norm::new(NormDescriptor::Lq { q: 1.0 }).is_err());
        assert!(Norm::new(NormDescriptor::Quadratic { a: [[1.0, 2.0], [2.0, 1.0]] }).is_err());
        assert!(Norm::new(NormDescriptor::Quadratic { a: [[1.0, 0.1], [0.0, 1.0]] }).is_err());
        assert!(Norm::new(NormDescriptor::Scaled { factor: 0.0, base: Box::new(NormDescriptor::Euclidean) }).is_err());
    }

    #[test]
    fn admissibility_flags() {
        assert!(Norm::euclidean().admissibility_warning().is_none());
        assert!(Norm::new(NormDescriptor::Quadratic { a: [[1.0, 0.0], [0.0, 4.0]] })
            .unwrap()
            .admissibility_warning()
            .is_none());
        assert!(lq(1.5).admissibility_warning().is_some());
        assert!(lq(2.0).admissibility_warning().is_none());
        // F² has a degenerate Hessian on the axes for q > 2.
        assert!(lq(3.0).admissibility_warning().is_some());
    }

    #[test]
    fn wulff_areas() {
        let a = wulff_area(&Norm::euclidean(), 4096).unwrap();
        assert!((a - PI).abs() < 1e-6);
        // F = 2|ξ| has F°(v) = |v|/2, so {F° < 1} is the disk of radius 2.
        let a = wulff_area(&scaled(2.0), 4096).unwrap();
        assert!((a - 4.0 * PI).abs() < 1e-6);
        let a = wulff_area(&lq(2.0), 4096).unwrap();
        assert!((a - PI).abs() < 1e-6);
        assert!(wulff_area(&Norm::euclidean(), 63).is_err());
    }

    #[test]
    fn json_schema() {
        let n: Norm = serde_json::from_str(r#"{"kind":"lq","q":3.0}"#).unwrap();
        assert_eq!(n.descriptor(), &NormDescriptor::Lq { q: 3.0 });
        let n: Norm = serde_json::from_str(r#"{"kind":"quadratic","A":[[1,0],[0,4]]}"#).unwrap();
        assert!(n.descriptor().quadratic_matrix().is_some());
        let n: Norm =
            serde_json::from_str(r#"{"kind":"scaled","factor":2.0,"base":{"kind":"euclidean"}}"#).unwrap();
        assert_eq!(n.value([1.0, 0.0]), 2.0);
        assert!(serde_json::from_str::<Norm>(r#"{"kind":"lq","q":3.0,"p":1}"#).is_err());
        assert!(serde_json::from_str::<Norm>(r#"{"kind":"lq","q":0.5}"#).is_err());
        assert!(serde_json::from_str::<Norm>(r#"{"kind":"hexagonal"}"#).is_err());
    }
}
