//! Piecewise-linear candidates in the Rayleigh and torsion quotients.
//!
//! Every value returned here is the quotient of an explicit admissible
//! function, so eigenvalue estimates sit above λ_F(β,Ω) and torsion
//! estimates below τ_F(β,Ω)^{p-1}, up to quadrature error in the boundary
//! and (for p ≠ 2) mass integrals.

use super::mesh::{gauss_legendre_unit, triangle_rule, Mesh, MeshSpec};
use super::sparse::{reverse_cuthill_mckee, CsrMatrix, EnvelopeCholesky};
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Norm, Vec2};
use crate::ptrig::PExponent;
use serde::{Deserialize, Serialize};

/// Which side of the true value an estimate is guaranteed to lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    UpperForLambda,
    LowerForTorsion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenEstimate {
    /// Discrete quotient: λ estimate, or τ^{p-1} estimate for torsion.
    pub value: f64,
    pub side: Side,
    pub mesh: MeshSpec,
    pub iterations: usize,
    pub converged: bool,
    pub nodes: usize,
    pub elements: usize,
    /// value^{1/(p-1)} for torsion estimates.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub rel_tol: f64,
    /// Extra descent runs from blends of the initial guess with a constant.
    pub restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iterations: 10_000, rel_tol: 1e-9, restarts: 0 }
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// A mesh together with the (p, β, F) data needed to evaluate quotients.
pub struct Discretization<'a> {
    pub mesh: Mesh,
    spec: MeshSpec,
    p: f64,
    beta: f64,
    norm: &'a Norm,
    facet_weight: Vec<f64>,
    edge_rule: Vec<(f64, f64)>,
}

impl<'a> Discretization<'a> {
    pub fn new(poly: &ConvexPolygon, p: PExponent, beta: f64, norm: &'a Norm, spec: MeshSpec) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::invalid("beta", format!("must be finite, got {beta}")));
        }
        let mesh = Mesh::build(poly, &spec)?;
        let facet_weight = poly.facets().iter().map(|f| norm.value(f.normal)).collect();
        Ok(Discretization {
            mesh,
            spec,
            p: p.value(),
            beta,
            norm,
            facet_weight,
            edge_rule: gauss_legendre_unit(spec.boundary_quadrature_order),
        })
    }

    pub fn node_count(&self) -> usize {
        self.mesh.nodes.len()
    }

    fn gradient_at(&self, e: usize, psi: &[f64]) -> Vec2 {
        let el = &self.mesh.elements[e];
        let mut g = [0.0, 0.0];
        for (k, &i) in el.nodes.iter().enumerate() {
            g[0] += psi[i] * el.grads[k][0];
            g[1] += psi[i] * el.grads[k][1];
        }
        g
    }

    /// ∫F(∇ψ)^p + β∫|ψ|^p F(ν), with its gradient when requested.
    fn numerator(&self, psi: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let p = self.p;
        if let Some(g) = grad.as_deref_mut() {
            g.fill(0.0);
        }
        let mut total = 0.0;
        for (e, el) in self.mesh.elements.iter().enumerate() {
            let xi = self.gradient_at(e, psi);
            if xi == [0.0, 0.0] {
                continue;
            }
            let (f, df) = self.norm.eval(xi).expect("nonzero gradient");
            let fp1 = f.powf(p - 1.0);
            total += el.area * fp1 * f;
            if let Some(g) = grad.as_deref_mut() {
                let s = el.area * p * fp1;
                for (k, &i) in el.nodes.iter().enumerate() {
                    g[i] += s * (df[0] * el.grads[k][0] + df[1] * el.grads[k][1]);
                }
            }
        }
        if self.beta != 0.0 {
            for edge in &self.mesh.boundary {
                let scale = self.beta * self.facet_weight[edge.facet] * edge.length;
                let (a, b) = (psi[edge.nodes[0]], psi[edge.nodes[1]]);
                for &(x, w) in &self.edge_rule {
                    let v = a + x * (b - a);
                    let av = v.abs();
                    let vp = av.powf(p);
                    total += scale * w * vp;
                    if let Some(g) = grad.as_deref_mut() {
                        if av > 0.0 {
                            let d = scale * w * p * vp / v;
                            g[edge.nodes[0]] += d * (1.0 - x);
                            g[edge.nodes[1]] += d * x;
                        }
                    }
                }
            }
        }
        total
    }

    /// ∫|ψ|^p with the seven-point rule (exact for p = 2).
    fn mass(&self, psi: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let p = self.p;
        if let Some(g) = grad.as_deref_mut() {
            g.fill(0.0);
        }
        let rule = triangle_rule();
        let mut total = 0.0;
        for el in &self.mesh.elements {
            let vals = el.nodes.map(|i| psi[i]);
            for (l, w) in &rule {
                let v = l[0] * vals[0] + l[1] * vals[1] + l[2] * vals[2];
                let av = v.abs();
                let vp = av.powf(p);
                total += el.area * w * vp;
                if let Some(g) = grad.as_deref_mut() {
                    if av > 0.0 {
                        let d = el.area * w * p * vp / v;
                        for k in 0..3 {
                            g[el.nodes[k]] += d * l[k];
                        }
                    }
                }
            }
        }
        total
    }

    /// ∫|ψ|, exact on elements where ψ keeps one sign.
    fn absolute_integral(&self, psi: &[f64]) -> f64 {
        let rule = triangle_rule();
        self.mesh
            .elements
            .iter()
            .map(|el| {
                let v = el.nodes.map(|i| psi[i]);
                if v.iter().all(|&x| x >= 0.0) || v.iter().all(|&x| x <= 0.0) {
                    el.area * (v[0] + v[1] + v[2]).abs() / 3.0
                } else {
                    el.area * rule.iter().map(|(l, w)| w * (l[0] * v[0] + l[1] * v[1] + l[2] * v[2]).abs()).sum::<f64>()
                }
            })
            .sum()
    }

    /// b_i = ∫φ_i.
    fn load(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.node_count()];
        for el in &self.mesh.elements {
            for &i in &el.nodes {
                b[i] += el.area / 3.0;
            }
        }
        b
    }

    pub fn rayleigh_quotient(&self, psi: &[f64]) -> Result<f64> {
        self.check_len(psi)?;
        let d = self.mass(psi, None);
        if !(d > 0.0) {
            return Err(Error::invalid("psi", "candidate vanishes identically"));
        }
        Ok(self.numerator(psi, None) / d)
    }

    /// (∫|ψ|)^p / (∫F(∇ψ)^p + β∫|ψ|^p F(ν)), a lower bound for τ^{p-1}.
    pub fn torsion_quotient(&self, psi: &[f64]) -> Result<f64> {
        self.check_len(psi)?;
        if !(self.beta > 0.0) {
            return Err(Error::invalid("beta", format!("torsion needs beta > 0, got {}", self.beta)));
        }
        let n = self.numerator(psi, None);
        if !(n > 0.0) {
            return Err(Error::invalid("psi", "candidate vanishes identically"));
        }
        Ok(self.absolute_integral(psi).powf(self.p) / n)
    }

    fn check_len(&self, psi: &[f64]) -> Result<()> {
        if psi.len() != self.node_count() {
            return Err(Error::invalid(
                "psi",
                format!("expected {} nodal values, got {}", self.node_count(), psi.len()),
            ));
        }
        Ok(())
    }

    /// Stiffness ∫∇φ_iᵀ A ∇φ_j, consistent mass ∫φ_iφ_j and boundary mass
    /// ∫_∂Ω φ_iφ_j F(ν).
    fn matrices(&self, a: [[f64; 2]; 2]) -> (CsrMatrix, CsrMatrix, CsrMatrix) {
        let adj = self.mesh.adjacency();
        let mut k = CsrMatrix::with_pattern(&adj);
        let mut m = CsrMatrix::with_pattern(&adj);
        let mut b = CsrMatrix::with_pattern(&adj);
        let off = 0.5 * (a[0][1] + a[1][0]);
        for el in &self.mesh.elements {
            for r in 0..3 {
                let gr = el.grads[r];
                let agr = [a[0][0] * gr[0] + off * gr[1], off * gr[0] + a[1][1] * gr[1]];
                for c in 0..3 {
                    let gc = el.grads[c];
                    k.add(el.nodes[r], el.nodes[c], el.area * (agr[0] * gc[0] + agr[1] * gc[1]));
                    let mass = if r == c { el.area / 6.0 } else { el.area / 12.0 };
                    m.add(el.nodes[r], el.nodes[c], mass);
                }
            }
        }
        for edge in &self.mesh.boundary {
            let s = self.facet_weight[edge.facet] * edge.length / 6.0;
            let [i, j] = edge.nodes;
            b.add(i, i, 2.0 * s);
            b.add(j, j, 2.0 * s);
            b.add(i, j, s);
            b.add(j, i, s);
        }
        (k, m, b)
    }

    fn factor(&self, a: &CsrMatrix) -> Result<EnvelopeCholesky> {
        EnvelopeCholesky::factor(a, &reverse_cuthill_mckee(a))
    }

    fn estimate(&self, value: f64, side: Side, iterations: usize, converged: bool) -> EigenEstimate {
        let tau = (side == Side::LowerForTorsion).then(|| value.powf(1.0 / (self.p - 1.0)));
        EigenEstimate {
            value,
            side,
            mesh: self.spec,
            iterations,
            converged,
            nodes: self.node_count(),
            elements: self.mesh.elements.len(),
            tau,
        }
    }

    /// Lowest eigenpair of the p = 2 pencil (K_A + βB, M) by shifted
    /// inverse iteration. A shift is accepted only if the shifted matrix
    /// factors, which certifies it lies below the lowest eigenvalue.
    fn p2_eigenvector(&self, a: [[f64; 2]; 2], opts: &SolverOptions) -> Result<(Vec<f64>, usize, bool)> {
        let (k, m, b) = self.matrices(a);
        let stiff = k.combine(1.0, &b, self.beta);
        let n = self.node_count();
        let ones = vec![1.0; n];
        let constant_quotient = stiff.quadratic_form(&ones) / m.quadratic_form(&ones);
        let mut shift = constant_quotient.min(0.0) - 1.0;
        let mut chol = None;
        for _ in 0..64 {
            match self.factor(&stiff.combine(1.0, &m, -shift)) {
                Ok(c) => {
                    chol = Some(c);
                    break;
                }
                Err(_) => shift = 2.0 * shift - 1.0,
            }
        }
        let mut chol = chol.ok_or_else(|| Error::numerical("inverse iteration", "no admissible shift found"))?;

        let mut x = ones;
        let mut rq = constant_quotient;
        let mut refined = false;
        for it in 1..=opts.max_iterations {
            let rhs = m.mul_vec(&x);
            let mut y = chol.solve(&rhs);
            let norm = m.quadratic_form(&y).sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::numerical("inverse iteration", "iterate collapsed"));
            }
            y.iter_mut().for_each(|v| *v /= norm);
            let next = stiff.quadratic_form(&y);
            let change = (next - rq).abs();
            x = y;
            rq = next;
            if change <= 1e-14 * rq.abs().max(1.0) {
                return Ok((orient(x), it, true));
            }
            if !refined && it >= 8 {
                refined = true;
                let candidate = rq - 0.05 * (rq - shift);
                if let Ok(c) = self.factor(&stiff.combine(1.0, &m, -candidate)) {
                    chol = c;
                    shift = candidate;
                }
            }
        }
        Ok((orient(x), opts.max_iterations, false))
    }

    /// Solution of (K_A + βB) u = b.
    fn p2_torsion(&self, a: [[f64; 2]; 2]) -> Result<Vec<f64>> {
        let (k, _, b) = self.matrices(a);
        let stiff = k.combine(1.0, &b, self.beta);
        Ok(self.factor(&stiff)?.solve(&self.load()))
    }

    fn p2_matrix(&self) -> Option<[[f64; 2]; 2]> {
        if self.p == 2.0 {
            self.norm.descriptor().quadratic_matrix()
        } else {
            None
        }
    }

    fn preconditioner(&self) -> Result<EnvelopeCholesky> {
        let (k, m, _) = self.matrices(IDENTITY);
        self.factor(&k.combine(1.0, &m, 1.0))
    }

    pub fn rayleigh_upper(&self, opts: &SolverOptions) -> Result<EigenEstimate> {
        if let Some(a) = self.p2_matrix() {
            let (x, it, conv) = self.p2_eigenvector(a, opts)?;
            let value = self.rayleigh_quotient(&x)?;
            return Ok(self.estimate(value, Side::UpperForLambda, it, conv));
        }
        let (init, _, _) = self.p2_eigenvector(IDENTITY, opts)?;
        let pre = self.preconditioner()?;
        let mut best: Option<(f64, usize, bool)> = None;
        for r in 0..=opts.restarts {
            let t = r as f64 / (opts.restarts as f64 + 1.0);
            let start: Vec<f64> = init.iter().map(|v| (1.0 - t) * v + t).collect();
            let run = self.descend_quotient(start, &pre, opts)?;
            if best.is_none_or(|b| run.0 < b.0) {
                best = Some(run);
            }
        }
        let (value, it, conv) = best.expect("at least one run");
        Ok(self.estimate(value, Side::UpperForLambda, it, conv))
    }

    /// Projected preconditioned descent on the Rayleigh quotient over ψ ≥ 0
    /// with ∫ψ^p = 1.
    fn descend_quotient(&self, start: Vec<f64>, pre: &EnvelopeCholesky, opts: &SolverOptions) -> Result<(f64, usize, bool)> {
        let n = self.node_count();
        let mut psi = self.normalize(start.into_iter().map(|v| v.max(0.0)).collect())?;
        let mut gn = vec![0.0; n];
        let mut gd = vec![0.0; n];
        let mut alpha: f64 = 1.0;
        let mut rq = self.numerator(&psi, None);
        for it in 1..=opts.max_iterations {
            let num = self.numerator(&psi, Some(&mut gn));
            let den = self.mass(&psi, Some(&mut gd));
            rq = num / den;
            let g: Vec<f64> = gn.iter().zip(&gd).map(|(a, b)| (a - rq * b) / den).collect();
            let d = pre.solve(&g);
            alpha = (2.0 * alpha).min(1e6);
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<f64> = psi.iter().zip(&d).map(|(x, s)| (x - alpha * s).max(0.0)).collect();
                let predicted: f64 = g.iter().zip(trial.iter().zip(&psi)).map(|(gi, (t, x))| gi * (t - x)).sum();
                if let Ok(tn) = self.normalize(trial) {
                    let trq = self.numerator(&tn, None);
                    if trq <= rq + ARMIJO * predicted.min(0.0) && trq < rq {
                        accepted = Some((tn, trq));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            let Some((next, next_rq)) = accepted else {
                return Ok((rq, it, true));
            };
            let drop = rq - next_rq;
            psi = next;
            if drop <= opts.rel_tol * next_rq.abs().max(f64::MIN_POSITIVE) {
                return Ok((next_rq, it, true));
            }
            rq = next_rq;
        }
        Ok((rq, opts.max_iterations, false))
    }

    fn normalize(&self, mut psi: Vec<f64>) -> Result<Vec<f64>> {
        let d = self.mass(&psi, None);
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::numerical("descent", "candidate vanished"));
        }
        let s = d.powf(-1.0 / self.p);
        psi.iter_mut().for_each(|v| *v *= s);
        Ok(psi)
    }

    pub fn torsion_lower(&self, opts: &SolverOptions) -> Result<EigenEstimate> {
        if !(self.beta > 0.0) {
            return Err(Error::invalid("beta", format!("torsion needs beta > 0, got {}", self.beta)));
        }
        if let Some(a) = self.p2_matrix() {
            let u = self.p2_torsion(a)?;
            let value = self.torsion_quotient(&u)?;
            return Ok(self.estimate(value, Side::LowerForTorsion, 1, true));
        }
        let u0 = self.p2_torsion(IDENTITY)?;
        let pre = self.preconditioner()?;
        let (u, it, conv) = self.descend_torsion_energy(u0, &pre, opts)?;
        let clipped: Vec<f64> = u.iter().map(|v| v.max(0.0)).collect();
        let value = self.torsion_quotient(&clipped)?;
        Ok(self.estimate(value, Side::LowerForTorsion, it, conv))
    }

    /// Minimizes the convex energy N(u)/p - ∫u; the minimizer attains the
    /// maximal torsion quotient.
    fn descend_torsion_energy(&self, u0: Vec<f64>, pre: &EnvelopeCholesky, opts: &SolverOptions) -> Result<(Vec<f64>, usize, bool)> {
        let p = self.p;
        let b = self.load();
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
        // Best multiple of the initial guess.
        let n0 = self.numerator(&u0, None);
        let s = (dot(&b, &u0) / n0).powf(1.0 / (p - 1.0));
        let mut u: Vec<f64> = u0.iter().map(|v| s * v).collect();
        let energy = |u: &[f64], n: f64| n / p - dot(&b, u);
        let mut gn = vec![0.0; u.len()];
        let mut alpha: f64 = 1.0;
        for it in 1..=opts.max_iterations {
            let num = self.numerator(&u, Some(&mut gn));
            let j = energy(&u, num);
            let g: Vec<f64> = gn.iter().zip(&b).map(|(x, y)| x / p - y).collect();
            let d = pre.solve(&g);
            let slope = -dot(&g, &d);
            if !(slope < 0.0) {
                return Ok((u, it, true));
            }
            alpha = (2.0 * alpha).min(1e12);
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<f64> = u.iter().zip(&d).map(|(x, s)| x - alpha * s).collect();
                let tj = energy(&trial, self.numerator(&trial, None));
                if tj <= j + ARMIJO * alpha * slope {
                    accepted = Some((trial, tj));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((next, nj)) = accepted else {
                return Ok((u, it, true));
            };
            u = next;
            if j - nj <= opts.rel_tol * nj.abs() {
                return Ok((u, it, true));
            }
        }
        Ok((u, opts.max_iterations, false))
    }
}

const IDENTITY: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

fn orient(mut x: Vec<f64>) -> Vec<f64> {
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

/// Upper estimate of λ_F(β,Ω) from piecewise-linear candidates.
pub fn rayleigh_upper(
    poly: &ConvexPolygon,
    p: PExponent,
    beta: f64,
    norm: &Norm,
    mesh: MeshSpec,
) -> Result<EigenEstimate> {
    rayleigh_upper_with(poly, p, beta, norm, mesh, &SolverOptions::default())
}

pub fn rayleigh_upper_with(
    poly: &ConvexPolygon,
    p: PExponent,
    beta: f64,
    norm: &Norm,
    mesh: MeshSpec,
    opts: &SolverOptions,
) -> Result<EigenEstimate> {
    Discretization::new(poly, p, beta, norm, mesh)?.rayleigh_upper(opts)
}

/// Lower estimate of τ_F(β,Ω)^{p-1}; `tau` carries the τ estimate.
pub fn torsion_numeric_lower(
    poly: &ConvexPolygon,
    p: PExponent,
    beta: f64,
    norm: &Norm,
    mesh: MeshSpec,
) -> Result<EigenEstimate> {
    torsion_numeric_lower_with(poly, p, beta, norm, mesh, &SolverOptions::default())
}

pub fn torsion_numeric_lower_with(
    poly: &ConvexPolygon,
    p: PExponent,
    beta: f64,
    norm: &Norm,
    mesh: MeshSpec,
    opts: &SolverOptions,
) -> Result<EigenEstimate> {
    Discretization::new(poly, p, beta, norm, mesh)?.torsion_lower(opts)
}
