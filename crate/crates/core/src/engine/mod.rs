//! Synchronous-round simulator of the decentralized gradient-tracking
//! method.
//!
//! Every agent `i` keeps a local iterate `X_i` and a tracker `D_i` of the
//! network-average descent direction. One round is
//!
//! ```text
//! X_i ← Σ_j W(i,j)·(X_j − η_j·D_j)
//! D_i ← Σ_j W(i,j)·D_j + H_i(X_i_new) − H_i(X_i_old)
//! ```
//!
//! where `H_i` is the local penalty direction from [`crate::penalty`]. Both
//! mixed quantities travel in the same message, so a round costs exactly one
//! communication.

mod metrics;
mod oracle;
mod round;
mod run;
mod state;
mod stepsize;

pub use metrics::{
    consensus_error, feasibility_violation, mean_direction, mean_iterate, mean_tracker,
    merit_value, riemannian_grad_norm, substationarity_violation, tracking_residual,
    Substationarity, SubstationarityBaseline,
};
pub use oracle::{pca_oracle, principal_angles};
pub use round::{destiny_round, Destiny, RoundStep};
pub use run::{run, run_observed, RoundRecord, RunConfig, RunOutcome, RunStatus, Trace};
pub use state::{initialize, AgentState};
pub use stepsize::{bb_stepsize, StepsizeRule, BB_STAGNATION};
