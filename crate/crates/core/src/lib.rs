//! Numerical laboratory for Neumann and Dirichlet Laplacian eigenvalues on
//! bounded convex domains.

pub mod analytic;
pub mod certify;
pub mod cheeger;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod harness;
pub mod measure;
pub mod mesh;

pub use analytic::{BoundaryCondition, Spectrum, SpectrumSource};
pub use error::{Error, Result};
