//! Communication topology and the mixing matrix agents average with.

mod graph;
mod mixing;

pub use graph::{erdos_renyi, read_edge_list, write_edge_list, Graph, ER_MAX_ATTEMPTS};
pub use mixing::{
    metropolis_weights, mix_stack, spectral_gap, verify_assumption2, Assumption2Report, Check,
    MixingMatrix, ASSUMPTION2_TOL,
};
