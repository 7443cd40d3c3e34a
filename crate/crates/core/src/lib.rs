//! Decentralized optimization over the Stiefel manifold with gradient
//! tracking and an approximate augmented Lagrangian penalty.
//!
//! Agents never project onto the manifold. Each one follows the penalty
//! direction `H_i` of its private objective, mixes with its neighbours once
//! per round, and tracks the network-average direction. The crate provides:
//!
//! - [`penalty`]: the penalty function, its gradient and the cheap
//!   directions `G` and `H`;
//! - [`problems`]: PCA, orthogonal least squares regression and ℓ₄ sparse
//!   dictionary learning objectives, synthetic data and CSV input;
//! - [`network`]: Erdős–Rényi graphs, Metropolis mixing matrices and the
//!   blockwise mixing operator;
//! - [`engine`]: the round-by-round simulator, stepsize rules, metrics and
//!   reference oracles.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
mod error;
pub mod network;
pub mod penalty;
pub mod problems;
mod scalar;
pub mod stiefel;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = nalgebra::DMatrix<f64>;
pub type Stiefel = stiefel::StiefelPoint<f64>;
pub type Mixing = network::MixingMatrix<f64>;
pub type Agent = engine::AgentState<f64>;
pub type Rule = engine::StepsizeRule<f64>;
pub type Config = engine::RunConfig<f64>;
pub type Outcome = engine::RunOutcome<f64>;
pub type Problem = problems::LocalProblem<f64>;
