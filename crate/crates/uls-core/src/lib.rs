//! Recovering a signal observed through an unknown linear transform.
//!
//! The observation model is `y = T A x`: a signal `x` in `C^n` is measured
//! by a known `m x n` sensing matrix `A`, but the measurements arrive
//! scrambled by an unknown transform `T` drawn from a known finite set of
//! invertible, diagonalizable candidates (permutations of the measurement
//! order, per-channel gains, global scalings, or arbitrary explicit
//! matrices).
//!
//! The crate answers three questions:
//!
//! * **Certification** (before measuring): given the candidate set and the
//!   sensing dimensions, is every signal recoverable? The answer depends
//!   only on the eigenvalue multiplicities of the relative transforms
//!   `T1^{-1} T2`: if no eigenspace dimension exceeds `m - n`, recovery is
//!   exact; a dominant eigenvalue `lambda` with a larger eigenspace limits
//!   recovery to a global scale factor `lambda`; with too few measurements
//!   (`m < 2n`) there are signal pairs that collide outright.
//! * **Decoding** (after measuring): enumerate the candidates, test which
//!   transforms explain `y`, and collapse the survivors into a unique
//!   signal, a family of scale multiples, or an ambiguity report.
//! * **Geometry checks**: the predictions above are statements about how
//!   the subspaces `range(A)` and `range(T A)` intersect; seeded Monte
//!   Carlo experiments measure those intersections directly.

pub mod decode;
pub mod error;
pub mod identifiability;
pub mod linalg;
pub mod matrix;
pub mod random;
pub mod report;
pub mod spectrum;
pub mod text;
pub mod tol;
pub mod transform;

mod backend;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use random::{random_gaussian_matrix, Field};
pub use tol::Tolerance;
pub use transform::{Permutation, TransformSpec};

pub use num_complex::Complex64;
