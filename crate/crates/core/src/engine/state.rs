use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{shape, Result};
use crate::penalty::local_direction;
use crate::problems::LocalObjective;
use crate::scalar::Real;
use crate::stiefel::StiefelPoint;

/// One agent's view of the algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState<T: Real> {
    /// Local iterate `X_{i,k}`.
    pub x: DMatrix<T>,
    /// Direction tracker `D_{i,k}`.
    pub d: DMatrix<T>,
    /// `H_i(X_{i,k})`, needed by the next tracker update.
    pub h: DMatrix<T>,
    /// `X_{i,k−1}`, absent before the first round.
    pub x_prev: Option<DMatrix<T>>,
    /// `D_{i,k−1}`, absent before the first round.
    pub d_prev: Option<DMatrix<T>>,
}

/// Every agent starts at `x_initial` with `D_i = H_i(x_initial)`.
pub fn initialize<T, O>(x_initial: &StiefelPoint<T>, objectives: &[O], beta: T) -> Result<Vec<AgentState<T>>>
where
    T: Real,
    O: LocalObjective<T> + Sync,
{
    let x0 = x_initial.as_matrix();
    if objectives.is_empty() {
        return Err(shape("initialize", "no agents"));
    }
    for (i, o) in objectives.iter().enumerate() {
        if o.dims() != x0.shape() {
            return Err(shape(
                "initialize",
                format!("agent {i} expects {:?}, initial point is {:?}", o.dims(), x0.shape()),
            ));
        }
    }
    objectives
        .par_iter()
        .map(|o| {
            let h = local_direction(x0, o, beta)?;
            Ok(AgentState {
                x: x0.clone(),
                d: h.clone(),
                h,
                x_prev: None,
                d_prev: None,
            })
        })
        .collect()
}
