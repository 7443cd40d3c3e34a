use nalgebra::DMatrix;

use super::state::AgentState;
use crate::error::{Error, Result};
use crate::penalty::{h_value, orth_residual, tangent_projection};
use crate::problems::LocalObjective;
use crate::scalar::Real;

fn mean_of<'a, T: Real>(mut it: impl Iterator<Item = &'a DMatrix<T>>) -> DMatrix<T> {
    let first = it.next().expect("at least one agent");
    let mut acc = first.clone();
    let mut count = 1usize;
    for m in it {
        acc += m;
        count += 1;
    }
    acc / T::lit(count as f64)
}

/// `X̄ = (1/d)·Σ X_i`.
pub fn mean_iterate<T: Real>(states: &[AgentState<T>]) -> DMatrix<T> {
    mean_of(states.iter().map(|s| &s.x))
}

/// `D̄ = (1/d)·Σ D_i`.
pub fn mean_tracker<T: Real>(states: &[AgentState<T>]) -> DMatrix<T> {
    mean_of(states.iter().map(|s| &s.d))
}

/// `H̄ = (1/d)·Σ H_i(X_i)`, from the cached directions.
pub fn mean_direction<T: Real>(states: &[AgentState<T>]) -> DMatrix<T> {
    mean_of(states.iter().map(|s| &s.h))
}

/// `sqrt((1/d)·Σ ‖X_i − X̄‖²_F)`.
pub fn consensus_error<T: Real>(states: &[AgentState<T>]) -> T {
    let xbar = mean_iterate(states);
    let total = states
        .iter()
        .fold(T::zero(), |acc, s| acc + (&s.x - &xbar).norm_squared());
    (total / T::lit(states.len() as f64)).sqrt()
}

/// `sqrt((1/d)·Σ ‖X_iᵀX_i − I‖²_F)`.
pub fn feasibility_violation<T: Real>(states: &[AgentState<T>]) -> T {
    let total = states.iter().fold(T::zero(), |acc, s| {
        acc + orth_residual(&s.x).map(|r| r.norm_squared()).unwrap_or(T::lit(f64::NAN))
    });
    (total / T::lit(states.len() as f64)).sqrt()
}

/// `‖∇f(X) − X·sym(Xᵀ∇f(X))‖_F` at an arbitrary, possibly infeasible `X`.
pub fn riemannian_grad_norm<T: Real, O: LocalObjective<T> + ?Sized>(x: &DMatrix<T>, f: &O) -> Result<T> {
    Ok(tangent_projection(x, &f.euclidean_grad(x)?)?.norm())
}

/// Substationarity value and whether it is relative to the initial point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Substationarity<T> {
    pub value: T,
    /// `false` when the initial Riemannian gradient vanished and `value` is
    /// the absolute norm.
    pub relative: bool,
}

/// The denominator `‖grad f(X̄_0)‖_F`, computed once per run.
#[derive(Debug, Clone, Copy)]
pub struct SubstationarityBaseline<T> {
    initial: T,
}

impl<T: Real> SubstationarityBaseline<T> {
    pub fn new<O: LocalObjective<T> + ?Sized>(x_bar_0: &DMatrix<T>, f: &O) -> Result<Self> {
        Ok(Self {
            initial: riemannian_grad_norm(x_bar_0, f)?,
        })
    }

    pub fn initial_norm(&self) -> T {
        self.initial
    }

    pub fn evaluate<O: LocalObjective<T> + ?Sized>(&self, x_bar_k: &DMatrix<T>, f: &O) -> Result<Substationarity<T>> {
        let norm = riemannian_grad_norm(x_bar_k, f)?;
        Ok(if self.initial > T::zero() {
            Substationarity {
                value: norm / self.initial,
                relative: true,
            }
        } else {
            Substationarity {
                value: norm,
                relative: false,
            }
        })
    }
}

/// `‖grad f(X̄_k)‖_F / ‖grad f(X̄_0)‖_F`, the projection formula applied to
/// `X̄` as-is.
pub fn substationarity_violation<T: Real, O: LocalObjective<T> + ?Sized>(
    x_bar_k: &DMatrix<T>,
    x_bar_0: &DMatrix<T>,
    f: &O,
) -> Result<Substationarity<T>> {
    SubstationarityBaseline::new(x_bar_0, f)?.evaluate(x_bar_k, f)
}

/// `h(X̄) + Σ‖X̄ − X_i‖²_F + ρ·Σ‖D̄ − D_i‖²_F`.
pub fn merit_value<T: Real, O: LocalObjective<T> + ?Sized>(
    states: &[AgentState<T>],
    rho: T,
    f: &O,
    beta: T,
) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "rho",
            detail: format!("must be positive, got {rho}"),
        });
    }
    let xbar = mean_iterate(states);
    let dbar = mean_tracker(states);
    let x_dev = states.iter().fold(T::zero(), |acc, s| acc + (&xbar - &s.x).norm_squared());
    let d_dev = states.iter().fold(T::zero(), |acc, s| acc + (&dbar - &s.d).norm_squared());
    Ok(h_value(&xbar, f, beta)? + x_dev + rho * d_dev)
}

/// `‖D̄ − H̄‖_F`; zero in exact arithmetic under a doubly stochastic `W`.
pub fn tracking_residual<T: Real>(states: &[AgentState<T>]) -> T {
    (mean_tracker(states) - mean_direction(states)).norm()
}
