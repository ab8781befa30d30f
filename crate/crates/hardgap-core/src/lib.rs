//! Hard-gap rule inference laboratory.
//!
//! One-dimensional binary cellular automata evolved under local rules, with
//! selected neighbourhood patterns hidden from supervision. The crate provides
//! the data machinery, the similarity-based baselines that provably fail on
//! held-out XOR patterns, a GF(2) identifiability solver, explicit constructive
//! transformer circuits, a small reverse-mode autodiff substrate, the trained
//! gap transformer, a mechanistic-analysis toolkit, and the symbolic
//! operator-chain benchmark.

extern crate blas_src;

pub mod analysis;
pub mod autodiff;
pub mod baselines;
pub mod ca;
pub mod checkpoint;
pub mod circuits;
pub mod data;
pub mod error;
pub mod gf2;
pub mod model;
pub mod symbolic;

pub use ca::{Rollout, Row, Rule};
pub use data::{Dataset, HiddenSet, MaskPolicy, Sample};
pub use error::HardgapError;
