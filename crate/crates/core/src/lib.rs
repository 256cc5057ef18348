//! Constructive index theory at desk scale.
//!
//! The crate builds Clifford generators and spinor representations, checks
//! characteristic-class identities with exact rational series, integrates
//! Chern character forms on spheres, and computes analytic indices of
//! twisted Dirac operators on `S^2` and `T^2` together with the matching
//! topological invariants from clutching data.

pub mod chern;
pub mod clifford;
pub mod clutch;
pub mod dirac;
pub mod error;
pub mod matrix;
pub mod report;
pub mod scalar;
pub mod series;
pub mod spin_rep;
pub mod suites;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use report::{merge, CheckRecord, Status, ValidationReport};
pub use scalar::{Real, Scalar};

pub type ComplexMatrixF64 = matrix::ComplexMatrix<f64>;
pub type GammaSetF64 = clifford::GammaSet<f64>;
pub type ExactGammaSet = clifford::GammaSet<i64>;
pub type CliffordElementF64 = clifford::CliffordElement<f64>;
pub type SkewMatrixF64 = clifford::SkewMatrix<f64>;
pub type RationalSeries = series::RationalSeries;
pub type FloatSeries = series::FloatSeries;
