//! Exact verification of dimension formulas for hypersurfaces singular along
//! low-degree subschemes of projective space.
//!
//! The crate is organized bottom-up: [`scalars`] (exact fields), [`gradedpoly`]
//! (graded pieces of `k[x_0..x_n]`), [`linalg`] (echelon forms, kernels,
//! subspace intersection), [`ideals`] (graded pieces of ideals and the
//! singular-containment space `W_C`), [`formulas`] (closed-form dimension
//! counts), [`bounds`] (inequality checkers and threshold certificates) and
//! [`specialize`] (finite-field point scans).

pub mod bounds;
pub mod formulas;
pub mod gradedpoly;
pub mod ideals;
pub mod linalg;
pub mod scalars;
pub mod specialize;

pub use gradedpoly::{GradedBasis, HomPoly, Monomial};
pub use ideals::{IdealPresentation, LinearSpaceConfig};
pub use linalg::{Ambient, ExactMatrix, Subspace};
pub use scalars::{FieldSpec, Scalar};
