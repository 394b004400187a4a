//! Uncertainty inequalities for the analysis coefficients of a signal in two
//! finite frames: r-coherences and their optimum `mu_*`, support, entropic and
//! `l^p` bounds, randomised verification and sparse two-frame separation.

// `!(x > 0.0)` style guards reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod coherence;
pub mod entropy;
pub mod error;
pub mod frames;
pub mod generators;
pub mod io;
pub mod separation;
pub mod verify;

pub use bounds::FramePair;
pub use coherence::{coherence_r, cross_gram, mu_star, CrossGram, MuStar};
pub use entropy::{beta_conjugate, renyi, shannon};
pub use error::{Error, Result};
pub use frames::{CoefficientSeq, Frame, FrameBounds};
pub use generators::{FamilyRegistry, GeneratorConfig};
pub use verify::{InequalityRegistry, VerificationReport};
