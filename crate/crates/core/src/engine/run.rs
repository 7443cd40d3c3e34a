use std::time::Instant;

use super::metrics::{consensus_error, feasibility_violation, mean_iterate, SubstationarityBaseline};
use super::round::{Destiny, RoundStep};
use super::state::AgentState;
use super::stepsize::StepsizeRule;
use crate::error::{Error, Result};
use crate::network::MixingMatrix;
use crate::penalty::{h_value, PenaltyParam};
use crate::problems::{Averaged, LocalObjective};
use crate::scalar::Real;
use crate::stiefel::StiefelPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig<T: Real> {
    pub beta: PenaltyParam<T>,
    pub rule: StepsizeRule<T>,
    pub max_rounds: usize,
    pub tol_substationarity: T,
    pub tol_consensus: T,
    pub tol_feasibility: T,
    /// Fill `elapsed_s` in the trace. Off by default so traces are
    /// bitwise reproducible.
    pub record_wall_time: bool,
}

impl<T: Real> RunConfig<T> {
    /// BB rule with default safeguards and all tolerances equal to `tol`.
    pub fn new(beta: T, max_rounds: usize, tol: T) -> Result<Self> {
        let cfg = Self {
            beta: PenaltyParam::new(beta)?,
            rule: StepsizeRule::default(),
            max_rounds,
            tol_substationarity: tol,
            tol_consensus: tol,
            tol_feasibility: tol,
            record_wall_time: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rule(mut self, rule: StepsizeRule<T>) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.rule.validate()?;
        for (name, v) in [
            ("tol_substationarity", self.tol_substationarity),
            ("tol_consensus", self.tol_consensus),
            ("tol_feasibility", self.tol_feasibility),
        ] {
            if !(v > T::zero()) {
                return Err(Error::InvalidParameter {
                    name,
                    detail: format!("must be positive, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Metrics after round `round` (0-based) completed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord<T> {
    pub round: usize,
    pub substationarity: T,
    pub consensus: T,
    pub feasibility: T,
    /// `h(X̄)` for the pooled objective.
    pub h_value: T,
    pub eta_min: T,
    pub eta_max: T,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace<T> {
    pub records: Vec<RoundRecord<T>>,
    /// `false` if the initial Riemannian gradient vanished and
    /// substationarity is reported as an absolute norm.
    pub relative_substationarity: bool,
}

impl<T> Trace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&RoundRecord<T>> {
        self.records.last()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxRounds,
    Diverged { round: usize, what: &'static str },
}

#[derive(Debug, Clone)]
pub struct RunOutcome<T: Real> {
    pub states: Vec<AgentState<T>>,
    pub trace: Trace<T>,
    pub status: RunStatus,
}

/// Runs rounds until all three tolerances are met or `max_rounds` is
/// reached. Divergence ends the run with [`RunStatus::Diverged`] and the
/// partial trace.
pub fn run<T, O>(
    config: &RunConfig<T>,
    mixing: &MixingMatrix<T>,
    objectives: &[O],
    x_initial: &StiefelPoint<T>,
) -> Result<RunOutcome<T>>
where
    T: Real,
    O: LocalObjective<T> + Sync,
{
    run_observed(config, mixing, objectives, x_initial, |_, _, _| {})
}

/// [`run`] with a callback after every completed round.
pub fn run_observed<T, O, F>(
    config: &RunConfig<T>,
    mixing: &MixingMatrix<T>,
    objectives: &[O],
    x_initial: &StiefelPoint<T>,
    mut observer: F,
) -> Result<RunOutcome<T>>
where
    T: Real,
    O: LocalObjective<T> + Sync,
    F: FnMut(&Destiny<'_, T, O>, &RoundStep<T>, &RoundRecord<T>),
{
    config.validate()?;
    let beta = config.beta.get();
    let pooled = Averaged::new(objectives);
    let mut sim = Destiny::new(mixing, objectives, x_initial, beta, config.rule)?;
    let baseline = SubstationarityBaseline::new(&mean_iterate(sim.states()), &pooled)?;
    let mut trace = Trace {
        records: Vec::with_capacity(config.max_rounds.min(1 << 16)),
        relative_substationarity: baseline.initial_norm() > T::zero(),
    };
    let started = Instant::now();
    let mut status = RunStatus::MaxRounds;

    for round in 0..config.max_rounds {
        let step = match sim.step() {
            Ok(step) => step,
            Err(Error::Diverged { round, what }) => {
                status = RunStatus::Diverged { round, what };
                break;
            }
            Err(e) => return Err(e),
        };
        let xbar = mean_iterate(sim.states());
        let substationarity = baseline.evaluate(&xbar, &pooled)?.value;
        let (eta_min, eta_max) = step.eta_range();
        let record = RoundRecord {
            round,
            substationarity,
            consensus: consensus_error(sim.states()),
            feasibility: feasibility_violation(sim.states()),
            h_value: h_value(&xbar, &pooled, beta)?,
            eta_min,
            eta_max,
            elapsed_s: if config.record_wall_time {
                started.elapsed().as_secs_f64()
            } else {
                0.0
            },
        };
        trace.records.push(record);
        observer(&sim, &step, &record);

        let metrics = [record.substationarity, record.consensus, record.feasibility, record.h_value];
        if metrics.iter().any(|v| !v.is_finite()) {
            status = RunStatus::Diverged { round, what: "metrics" };
            break;
        }
        if record.substationarity <= config.tol_substationarity
            && record.consensus <= config.tol_consensus
            && record.feasibility <= config.tol_feasibility
        {
            status = RunStatus::Converged;
            break;
        }
    }

    Ok(RunOutcome {
        states: sim.into_states(),
        trace,
        status,
    })
}
