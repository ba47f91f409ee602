//! Anisotropic norms and convex polygons in the plane: F and its polar F°,
//! Wulff shapes, anisotropic perimeter, the F°-distance to the boundary
//! and the anisotropic inradius.

mod norm;
mod polygon;

pub use norm::{cross, dot, euclid, sub, wulff_area, Norm, NormDescriptor, Vec2};
pub use polygon::{distance, inradius, polygon_summary, ConvexPolygon, DomainSpec, Facet, GeometrySummary};
