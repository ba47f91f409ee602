use super::norm::{cross, dot, euclid, sub, Norm, Vec2};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const COLLINEAR_TOL: f64 = 1e-12;
const MIN_AREA: f64 = 1e-14;
const MEMBERSHIP_TOL: f64 = 1e-12;

/// One edge of a convex polygon: unit outward normal ν, support offset
/// h = ν·x for x on the edge, and Euclidean length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub normal: Vec2,
    pub offset: f64,
    pub length: f64,
}

/// A bounded, strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    facets: Vec<Facet>,
}

impl TryFrom<Vec<Vec2>> for ConvexPolygon {
    type Error = Error;
    fn try_from(v: Vec<Vec2>) -> Result<Self> {
        ConvexPolygon::new(v)
    }
}

impl From<ConvexPolygon> for Vec<Vec2> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

fn signed_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>()
}

impl ConvexPolygon {
    /// Builds a polygon from its vertex chain. Clockwise input is reversed;
    /// repeated and collinear vertices are dropped.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Polygon("vertex coordinates must be finite".into()));
        }
        let mut v = vertices;
        if v.len() >= 2 && v.first() == v.last() {
            v.pop();
        }
        if signed_area(&v) < 0.0 {
            v.reverse();
        }
        // Merge until stable: removing one vertex can expose another.
        loop {
            let n = v.len();
            if n < 3 {
                return Err(Error::Polygon(format!("needs at least 3 non-collinear vertices, got {n}")));
            }
            let drop = (0..n).find(|&i| {
                let prev = v[(i + n - 1) % n];
                let next = v[(i + 1) % n];
                let c = cross(sub(v[i], prev), sub(next, v[i]));
                v[i] == prev || c.abs() < COLLINEAR_TOL && dot(sub(v[i], prev), sub(next, v[i])) >= 0.0
            });
            match drop {
                Some(i) => {
                    v.remove(i);
                }
                None => break,
            }
        }
        let n = v.len();
        for i in 0..n {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            if cross(sub(v[i], prev), sub(next, v[i])) <= 0.0 {
                return Err(Error::Polygon(format!("not strictly convex at vertex {i} {:?}", v[i])));
            }
        }
        let area = signed_area(&v);
        if area < MIN_AREA {
            return Err(Error::Polygon(format!("degenerate polygon with area {area:e}")));
        }
        // A convex turn at every vertex plus total turning 2π rules out
        // self-intersecting chains; check the winding via edge angles.
        let turning: f64 = (0..n)
            .map(|i| {
                let a = sub(v[(i + 1) % n], v[i]);
                let b = sub(v[(i + 2) % n], v[(i + 1) % n]);
                cross(a, b).atan2(dot(a, b))
            })
            .sum();
        if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return Err(Error::Polygon("vertex chain winds more than once".into()));
        }
        let facets = (0..n)
            .map(|i| {
                let a = v[i];
                let e = sub(v[(i + 1) % n], a);
                let length = euclid(e);
                let normal = [e[1] / length, -e[0] / length];
                Facet { normal, offset: dot(normal, a), length }
            })
            .collect();
        Ok(ConvexPolygon { vertices: v, facets })
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        ConvexPolygon::new(vec![[0.0, 0.0], [width, 0.0], [width, height], [0.0, height]])
    }

    pub fn unit_square() -> Self {
        ConvexPolygon::rectangle(1.0, 1.0).expect("unit square is valid")
    }

    /// Regular n-gon with the given circumradius, centred at the origin.
    pub fn regular(n: usize, circumradius: f64) -> Result<Self> {
        let v = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [circumradius * t.cos(), circumradius * t.sin()]
            })
            .collect();
        ConvexPolygon::new(v)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Vec2 {
        let v = &self.vertices;
        let n = v.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let c = cross(a, b);
            cx += (a[0] + b[0]) * c;
            cy += (a[1] + b[1]) * c;
        }
        let six_a = 6.0 * self.area();
        [cx / six_a, cy / six_a]
    }

    /// Uniformly scaled copy tΩ.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        ConvexPolygon::new(self.vertices.iter().map(|v| [t * v[0], t * v[1]]).collect())
    }

    /// P_F(Ω) = Σ L_i F(ν_i).
    pub fn anisotropic_perimeter(&self, norm: &Norm) -> f64 {
        self.facets.iter().map(|f| f.length * norm.value(f.normal)).sum()
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.facets.iter().all(|f| dot(f.normal, x) <= f.offset + MEMBERSHIP_TOL)
    }
}

/// |Ω|, P_F(Ω), s₀ = |Ω|/P_F(Ω) and the anisotropic inradius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub area: f64,
    pub perimeter_f: f64,
    pub s0: f64,
    pub inradius_f: f64,
    pub incenter: Vec2,
}

impl GeometrySummary {
    /// A summary built from |Ω| and P_F(Ω) alone, for domains (such as
    /// disks) handled in closed form. The inradius fields are left at zero.
    pub fn from_measures(area: f64, perimeter_f: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::invalid("area", format!("must be positive, got {area}")));
        }
        if !(perimeter_f > 0.0 && perimeter_f.is_finite()) {
            return Err(Error::invalid("perimeter_f", format!("must be positive, got {perimeter_f}")));
        }
        Ok(GeometrySummary { area, perimeter_f, s0: area / perimeter_f, inradius_f: 0.0, incenter: [0.0, 0.0] })
    }
}

pub fn polygon_summary(poly: &ConvexPolygon, norm: &Norm) -> GeometrySummary {
    let area = poly.area();
    let perimeter_f = poly.anisotropic_perimeter(norm);
    let (inradius_f, incenter) = inradius(poly, norm);
    GeometrySummary { area, perimeter_f, s0: area / perimeter_f, inradius_f, incenter }
}

/// d_F(x) = min_i (h_i - x·ν_i)/F(ν_i), the F°-distance to ∂Ω.
pub fn distance(poly: &ConvexPolygon, norm: &Norm, x: Vec2) -> Result<f64> {
    if !poly.contains(x) {
        return Err(Error::OutsideDomain { x: x[0], y: x[1] });
    }
    Ok(poly
        .facets
        .iter()
        .map(|f| (f.offset - dot(f.normal, x)) / norm.value(f.normal))
        .fold(f64::INFINITY, f64::min)
        .max(0.0))
}

/// R_F(Ω) and a maximizer, from the linear program
/// max r s.t. ν_i·x + r F(ν_i) ≤ h_i, solved by enumerating every basis of
/// three active facets. Cost is cubic in the number of facets.
pub fn inradius(poly: &ConvexPolygon, norm: &Norm) -> (f64, Vec2) {
    let rows: Vec<[f64; 4]> = poly
        .facets
        .iter()
        .map(|f| [f.normal[0], f.normal[1], norm.value(f.normal), f.offset])
        .collect();
    let scale = poly.vertices.iter().map(|v| euclid(*v)).fold(0.0, f64::max).max(1.0);
    let feasible = |x: [f64; 3]| {
        rows.iter().all(|r| r[0] * x[0] + r[1] * x[1] + r[2] * x[2] <= r[3] + 1e-12 * scale)
    };
    let m = rows.len();
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let Some(x) = solve3([rows[i], rows[j], rows[k]]) else { continue };
                if x[2] > best.0 && feasible(x) {
                    best = (x[2], [x[0], x[1]]);
                }
            }
        }
    }
    best
}

/// Cramer's rule for the 3×3 system whose augmented rows are given.
fn solve3(r: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let det3 = |c0: usize, c1: usize, c2: usize| {
        r[0][c0] * (r[1][c1] * r[2][c2] - r[1][c2] * r[2][c1])
            - r[0][c1] * (r[1][c0] * r[2][c2] - r[1][c2] * r[2][c0])
            + r[0][c2] * (r[1][c0] * r[2][c1] - r[1][c1] * r[2][c0])
    };
    let d = det3(0, 1, 2);
    if d.abs() < 1e-14 {
        return None;
    }
    Some([det3(3, 1, 2) / d, det3(0, 3, 2) / d, det3(0, 1, 3) / d])
}

/// Domain-spec file: a norm and a polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub norm: Norm,
    pub polygon: ConvexPolygon,
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::super::norm::NormDescriptor;
    use super::*;

    fn scaled2() -> Norm {
        Norm::new(NormDescriptor::Scaled { factor: 2.0, base: Box::new(NormDescriptor::Euclidean) }).unwrap()
    }

    #[test]
    fn square_summary() {
        let s = polygon_summary(&ConvexPolygon::unit_square(), &Norm::euclidean());
        assert!((s.area - 1.0).abs() < 1e-15);
        assert!((s.perimeter_f - 4.0).abs() < 1e-15);
        assert!((s.s0 - 0.25).abs() < 1e-15);
        assert!((s.inradius_f - 0.5).abs() < 1e-14);
        assert!((s.incenter[0] - 0.5).abs() < 1e-14 && (s.incenter[1] - 0.5).abs() < 1e-14);

        let s = polygon_summary(&ConvexPolygon::unit_square(), &scaled2());
        assert!((s.perimeter_f - 8.0).abs() < 1e-14);
        assert!((s.s0 - 0.125).abs() < 1e-15);
        assert!((s.inradius_f - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rectangle_summary() {
        let r = ConvexPolygon::rectangle(1.0, 3.0).unwrap();
        let s = polygon_summary(&r, &Norm::euclidean());
        assert!((s.s0 - 3.0 / 8.0).abs() < 1e-15);
        assert!((s.inradius_f - 0.5).abs() < 1e-14);
        assert!((s.incenter[0] - 0.5).abs() < 1e-12);
        assert!(s.incenter[1] >= 0.5 - 1e-12 && s.incenter[1] <= 2.5 + 1e-12);
    }

    #[test]
    fn distance_examples() {
        let sq = ConvexPolygon::unit_square();
        assert!((distance(&sq, &Norm::euclidean(), [0.5, 0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(distance(&sq, &Norm::euclidean(), [1.0, 1.0]).unwrap(), 0.0);
        assert!((distance(&sq, &scaled2(), [0.5, 0.5]).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(distance(&sq, &Norm::euclidean(), [1.5, 0.5]), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn distance_matches_boundary_brute_force() {
        // d_F(x) = inf over y ∈ ∂Ω of F°(x - y), sampled densely.
        let norm = Norm::new(NormDescriptor::Quadratic { a: [[1.0, 0.3], [0.3, 2.0]] }).unwrap();
        let poly = ConvexPolygon::new(vec![[0.0, 0.0], [2.0, 0.2], [1.5, 1.4], [0.2, 1.0]]).unwrap();
        let x = [0.9, 0.6];
        let v = poly.vertices();
        let mut brute = f64::INFINITY;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            for k in 0..=20_000 {
                let t = k as f64 / 20_000.0;
                let y = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                brute = brute.min(norm.polar(sub(x, y)));
            }
        }
        let d = distance(&poly, &norm, x).unwrap();
        assert!(d <= brute + 1e-12);
        assert!(brute - d < 1e-6, "{d} vs {brute}");
    }

    #[test]
    fn polygon_validation() {
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        // non-convex dart
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.3], [1.0, 2.0]]).is_err());
        // tiny
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1e-8, 0.0], [0.0, 1e-8]]).is_err());
        // clockwise input is accepted and reoriented
        let cw = ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(cw.area() > 0.0);
        // collinear midpoint merged
        let p = ConvexPolygon::new(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(p.vertices().len(), 4);
        // pentagram winds twice
        let star: Vec<Vec2> = (0..5)
            .map(|k| {
                let t = 4.0 * std::f64::consts::PI * k as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert!(ConvexPolygon::new(star).is_err());
    }

    #[test]
    fn facets_support_every_vertex() {
        let p = ConvexPolygon::regular(7, 1.3).unwrap();
        for f in p.facets() {
            for v in p.vertices() {
                assert!(dot(f.normal, *v) <= f.offset + 1e-12);
            }
        }
    }

    #[test]
    fn domain_spec_json() {
        let text = r#"{"norm":{"kind":"euclidean"},"polygon":[[0,0],[1,0],[1,1],[0,1]]}"#;
        let d = DomainSpec::from_json(text).unwrap();
        assert_eq!(d.polygon, ConvexPolygon::unit_square());
        let bad = r#"{"norm":{"kind":"euclidean"},"polygon":[[0,0],[1,0],[1,1]],"extra":1}"#;
        let err = DomainSpec::from_json(bad).unwrap_err().to_string();
        assert!(err.contains("extra"), "{err}");
        let missing = r#"{"polygon":[[0,0],[1,0],[1,1]]}"#;
        assert!(DomainSpec::from_json(missing).unwrap_err().to_string().contains("norm"));
        let round = serde_json::to_string(&d).unwrap();
        assert_eq!(DomainSpec::from_json(&round).unwrap(), d);
    }
}
