//! Exact hyperplane covers of the Boolean cube `{-1, +1}^n`.
//!
//! The crate verifies essential covers exhaustively, computes the minimum
//! essential cover size for tiny `n`, and implements the constructive
//! pieces of the uncovered-vertex argument for covers with few planes:
//! the structural row/column decomposition of the normal matrix, a
//! flip-ascent solver for Bang's sign lemma, inner-product preserving
//! rounding into the cube, and the three-phase Las Vegas vertex finder.
//! Anti-concentration experiments validate the probabilistic inputs by
//! exact enumeration.
//!
//! All hyperplane data is exact rational ([`rat::Rat`]); every "is `x` on
//! this plane" test is an equality, never a tolerance.

pub mod anticoncentration;
pub mod bang;
pub mod constructors;
pub mod cube;
pub mod decomposition;
pub mod error;
pub mod finder;
pub mod linalg;
pub mod params;
pub mod random;
pub mod rat;
pub mod rounding;
pub mod verifier;

pub use cube::{enumerate_cube, evaluate, sparsity, Cover, Hyperplane, Vertex};
pub use error::{Error, Result};
pub use params::ParamSet;
pub use rat::Rat;
