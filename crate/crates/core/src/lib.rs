//! Transferring A∞ algebras along deformation retracts with exact arithmetic.
//!
//! Two independent routes are implemented: recursive p- and q-kernels, and
//! the homological perturbation lemma on the truncated tensor coalgebra of
//! the suspension. Every defining identity has an exact residual checker.

pub mod ainfty;
pub mod coalgebra;
pub mod corpus;
pub mod error;
pub mod graded;
pub mod index_sets;
pub mod kernels;
pub mod linalg;
pub mod multimap;
pub mod perturbation;
pub mod report;
pub mod retract;
pub mod scalar;
pub mod sign;
pub mod suspension;
pub mod verify;

pub use ainfty::{AInfinity, AInftyHomotopy, AInftyMorphism};
pub use error::{Error, Result};
pub use graded::{Basis, GradedModule, LinComb, Vector, Word};
pub use multimap::{apply_block, insert, Factor, MultiMap};
pub use report::Residuals;
pub use scalar::{Field, Scalar};
pub use sign::{koszul_sign, suspension_sign, theta, Sign};
