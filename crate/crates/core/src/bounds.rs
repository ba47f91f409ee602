//! Closed-form upper bounds on the first Robin eigenvalue λ_F(β, Ω) and
//! lower bounds on the Robin torsional rigidity τ_F(β, Ω), assembled into a
//! consistency-checked report.
//!
//! The Dirichlet eigenvalue λ_F^D(Ω) is never computed; wherever it would
//! enter, its Pólya upper bound (p-1)(π_p/2)^p (P_F/|Ω|)^p is used instead.

use crate::error::{Error, Result};
use crate::geometry::{polygon_summary, ConvexPolygon, GeometrySummary, Norm};
use crate::oned_robin::{mu1, RobinParams, DEFAULT_TOL};
use crate::ptrig::{pi_p, PExponent};
use crate::report::{fmt_opt, fmt_real};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Slack used by the non-strict ordering checks.
pub const ORDERING_SLACK: f64 = 1e-10;

/// (p-1)(π_p/2)^p (P_F(Ω)/|Ω|)^p.
pub fn dirichlet_polya(p: PExponent, geometry: &GeometrySummary) -> f64 {
    let pv = p.value();
    (pv - 1.0) * (0.5 * pi_p(p)).powf(pv) * (geometry.perimeter_f / geometry.area).powf(pv)
}

/// μ₁(β, s₀) with s₀ = |Ω|/P_F(Ω).
pub fn robin_theorem1(p: PExponent, beta: f64, geometry: &GeometrySummary) -> Result<f64> {
    let params = RobinParams::new(p.value(), beta, geometry.s0)?;
    Ok(mu1(&params, DEFAULT_TOL)?.mu)
}

/// (π²/4)(P_F/|Ω|)² / (1 + 2P_F/(β|Ω|)), valid for p = 2 and β > 0.
pub fn robin_corollary_p2(beta: f64, geometry: &GeometrySummary) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("the p = 2 refinement needs beta > 0, got {beta}")));
    }
    let ratio = geometry.perimeter_f / geometry.area;
    Ok(0.25 * PI * PI * ratio * ratio / (1.0 + 2.0 * ratio / beta))
}

/// min(β P_F/|Ω|, λ_F^D) with λ_F^D replaced by its Pólya bound.
pub fn robin_trivial(beta: f64, geometry: &GeometrySummary, p: PExponent) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("the trivial bound needs beta >= 0, got {beta}")));
    }
    Ok((beta * geometry.perimeter_f / geometry.area).min(dirichlet_polya(p, geometry)))
}

/// -(p-1)|β|^{p'}.
pub fn robin_negative_beta(p: PExponent, beta: f64) -> Result<f64> {
    if !(beta < 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("the negative-beta bound needs beta < 0, got {beta}")));
    }
    Ok(crate::oned_robin::negative_beta_ceiling(p, beta))
}

/// Which form of the torsion lower bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionVariant {
    /// ((p-1)/(2p-1)|Ω| + β^{-1/(p-1)}) (|Ω|/P_F)^{p/(p-1)}, as displayed in
    /// the source. Its second term is not dimensionally homogeneous and the
    /// bound fails on small disks.
    AsStated,
    /// (p-1)/(2p-1)|Ω|(|Ω|/P_F)^{p/(p-1)} + β^{-1/(p-1)}|Ω|(|Ω|/P_F)^{1/(p-1)},
    /// obtained with the boundary term β g(0)^p P_F(Ω).
    AsDerived,
}

pub fn torsion_lower(
    p: PExponent,
    beta: f64,
    geometry: &GeometrySummary,
    variant: TorsionVariant,
) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("beta", format!("torsion bounds need beta > 0, got {beta}")));
    }
    let pv = p.value();
    let area = geometry.area;
    let s0 = geometry.s0;
    let lead = (pv - 1.0) / (2.0 * pv - 1.0) * area;
    let robin = beta.powf(-1.0 / (pv - 1.0));
    Ok(match variant {
        TorsionVariant::AsStated => (lead + robin) * s0.powf(pv / (pv - 1.0)),
        TorsionVariant::AsDerived => {
            lead * s0.powf(pv / (pv - 1.0)) + robin * area * s0.powf(1.0 / (pv - 1.0))
        }
    })
}

/// Torsion lower bound from the constant test function:
/// (|Ω|^p/(β P_F))^{1/(p-1)}.
pub fn torsion_constant_candidate(p: PExponent, beta: f64, geometry: &GeometrySummary) -> f64 {
    let pv = p.value();
    (geometry.area.powf(pv) / (beta * geometry.perimeter_f)).powf(1.0 / (pv - 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingFlag {
    pub name: String,
    pub holds: bool,
}

/// Names of every ordering check a report may carry, in CSV column order.
pub const FLAG_NAMES: [&str; 5] = [
    "theorem1_le_trivial",
    "theorem1_lt_dirichlet_polya",
    "theorem1_le_corollary_p2",
    "theorem1_le_negative_beta",
    "torsion_as_derived_ge_constant_candidate",
];

/// Marks that `robin_trivial` uses the Pólya bound in place of λ_F^D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletTerm {
    PolyaBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundReport {
    pub p: f64,
    pub beta: f64,
    pub geometry: GeometrySummary,
    pub dirichlet_polya: f64,
    pub robin_theorem1: f64,
    pub robin_corollary_p2: Option<f64>,
    /// None for β < 0, where the Dirichlet comparison does not apply.
    pub robin_trivial: Option<f64>,
    pub robin_trivial_dirichlet_term: DirichletTerm,
    pub robin_negative_beta: Option<f64>,
    pub torsion_as_stated: Option<f64>,
    pub torsion_as_derived: Option<f64>,
    pub ordering_flags: Vec<OrderingFlag>,
    pub norm_warning: Option<String>,
}

impl BoundReport {
    pub fn all_flags_hold(&self) -> bool {
        self.ordering_flags.iter().all(|f| f.holds)
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.ordering_flags.iter().find(|f| f.name == name).map(|f| f.holds)
    }
}

/// Report from precomputed geometry; used for domains handled in closed form.
pub fn report_from_geometry(p: PExponent, beta: f64, geometry: GeometrySummary) -> Result<BoundReport> {
    if !beta.is_finite() {
        return Err(Error::invalid("beta", format!("must be finite, got {beta}")));
    }
    let dirichlet = dirichlet_polya(p, &geometry);
    let theorem1 = robin_theorem1(p, beta, &geometry)?;
    let corollary = (p.value() == 2.0 && beta > 0.0).then(|| robin_corollary_p2(beta, &geometry)).transpose()?;
    let trivial = (beta >= 0.0).then(|| robin_trivial(beta, &geometry, p)).transpose()?;
    let negative = (beta < 0.0).then(|| robin_negative_beta(p, beta)).transpose()?;
    let (as_stated, as_derived) = if beta > 0.0 {
        (
            Some(torsion_lower(p, beta, &geometry, TorsionVariant::AsStated)?),
            Some(torsion_lower(p, beta, &geometry, TorsionVariant::AsDerived)?),
        )
    } else {
        (None, None)
    };

    let mut flags = Vec::new();
    let mut push = |name: &str, holds: bool| flags.push(OrderingFlag { name: name.to_string(), holds });
    if let Some(t) = trivial {
        push(FLAG_NAMES[0], theorem1 <= t + ORDERING_SLACK);
        push(FLAG_NAMES[1], theorem1 < dirichlet);
    }
    if let Some(c) = corollary {
        push(FLAG_NAMES[2], theorem1 <= c + ORDERING_SLACK);
    }
    if let Some(n) = negative {
        push(FLAG_NAMES[3], theorem1 <= n + ORDERING_SLACK);
    }
    if let Some(d) = as_derived {
        let constant = torsion_constant_candidate(p, beta, &geometry);
        push(FLAG_NAMES[4], d >= constant * (1.0 - ORDERING_SLACK));
    }

    Ok(BoundReport {
        p: p.value(),
        beta,
        geometry,
        dirichlet_polya: dirichlet,
        robin_theorem1: theorem1,
        robin_corollary_p2: corollary,
        robin_trivial: trivial,
        robin_trivial_dirichlet_term: DirichletTerm::PolyaBound,
        robin_negative_beta: negative,
        torsion_as_stated: as_stated,
        torsion_as_derived: as_derived,
        ordering_flags: flags,
        norm_warning: None,
    })
}

pub fn build_report(p: PExponent, beta: f64, norm: &Norm, polygon: &ConvexPolygon) -> Result<BoundReport> {
    let geometry = polygon_summary(polygon, norm);
    let mut report = report_from_geometry(p, beta, geometry)?;
    report.norm_warning = norm.admissibility_warning().map(str::to_string);
    Ok(report)
}

/// One row of a bounds sweep.
#[derive(Debug, Clone)]
pub struct SweepCase {
    pub p: PExponent,
    pub beta: f64,
    pub norm_label: String,
    pub norm: Norm,
    pub domain_label: String,
    pub polygon: ConvexPolygon,
}

/// Reports for every case, computed in parallel, returned in input order.
pub fn sweep(cases: &[SweepCase]) -> Vec<Result<BoundReport>> {
    cases.par_iter().map(|c| build_report(c.p, c.beta, &c.norm, &c.polygon)).collect()
}

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "norm",
        "domain",
        "p",
        "beta",
        "area",
        "perimeter_f",
        "s0",
        "inradius_f",
        "dirichlet_polya",
        "robin_theorem1",
        "robin_corollary_p2",
        "robin_trivial",
        "robin_negative_beta",
        "torsion_as_stated",
        "torsion_as_derived",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(FLAG_NAMES.iter().map(|s| s.to_string()));
    h.push("all_flags_hold".into());
    h
}

pub fn csv_row(norm_label: &str, domain_label: &str, r: &BoundReport) -> Vec<String> {
    let g = &r.geometry;
    let mut row = vec![
        norm_label.to_string(),
        domain_label.to_string(),
        fmt_real(r.p),
        fmt_real(r.beta),
        fmt_real(g.area),
        fmt_real(g.perimeter_f),
        fmt_real(g.s0),
        fmt_real(g.inradius_f),
        fmt_real(r.dirichlet_polya),
        fmt_real(r.robin_theorem1),
        fmt_opt(r.robin_corollary_p2),
        fmt_opt(r.robin_trivial),
        fmt_opt(r.robin_negative_beta),
        fmt_opt(r.torsion_as_stated),
        fmt_opt(r.torsion_as_derived),
    ];
    row.extend(FLAG_NAMES.iter().map(|n| r.flag(n).map(|b| b.to_string()).unwrap_or_default()));
    row.push(r.all_flags_hold().to_string());
    row
}
