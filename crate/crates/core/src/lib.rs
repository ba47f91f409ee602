#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Pólya-type upper bounds for the first Robin eigenvalue of the
//! anisotropic p-Laplacian, lower bounds for the Robin torsional rigidity,
//! and the numerical machinery to check them on concrete domains.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod isotonic;
pub mod numverify;
pub mod oned_robin;
pub mod ptrig;
pub mod report;
pub mod quadrature;

pub use error::{Error, Result};
