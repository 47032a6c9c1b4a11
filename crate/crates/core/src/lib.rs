//! Distance-squared functions to submanifolds and matrix subgroups, their
//! gradient-flow retractions, and cut-locus computations.
//!
//! * [`matfun`]: square roots, logarithms, Fréchet derivatives, polar/SVD.
//! * [`orthodist`]: distance from `M(n,ℝ)` to `O(n,ℝ)` and its flow.
//! * [`leftinv`]: left-invariant metric on `GL⁺(n,ℝ)` and distance to `SO(n)`.
//! * [`upq`]: the indefinite unitary group `U(p,q)` and its polar factorization.
//! * [`cutlocus`]: cut times, focal times and foot points on model spaces.
//! * [`flow`]: gradient flow of `d²` and the deformation onto the cut locus.
//! * [`verify`]: the numerical acceptance checks behind `cutlocus verify all`.

pub mod cutlocus;
pub mod error;
pub mod flow;
pub mod leftinv;
pub mod matfun;
pub mod matrix;
pub mod numeric;
pub mod orthodist;
pub mod random;
pub mod trajectory;
pub mod upq;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, MatrixJson, RealMatrix};
