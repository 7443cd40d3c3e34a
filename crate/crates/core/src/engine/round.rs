use nalgebra::DMatrix;
use rayon::prelude::*;

use super::state::{initialize, AgentState};
use super::stepsize::{bb_stepsize, StepsizeRule};
use crate::error::{shape, Error, Result};
use crate::network::{mix_stack, MixingMatrix};
use crate::penalty::local_direction;
use crate::problems::LocalObjective;
use crate::scalar::Real;
use crate::stiefel::StiefelPoint;

/// What a round used: the stepsize each agent applied to its own message.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundStep<T> {
    pub etas: Vec<T>,
}

impl<T: Real> RoundStep<T> {
    pub fn eta_range(&self) -> (T, T) {
        self.etas.iter().fold(
            (T::max_value().unwrap(), T::min_value().unwrap()),
            |(lo, hi), &e| (lo.min(e), hi.max(e)),
        )
    }
}

fn agent_stepsize<T: Real>(rule: &StepsizeRule<T>, s: &AgentState<T>) -> T {
    match *rule {
        StepsizeRule::Fixed { eta } => eta,
        StepsizeRule::Bb { eta0, eta_min, eta_max } => match (&s.x_prev, &s.d_prev) {
            (Some(xp), Some(dp)) => bb_stepsize(&(&s.x - xp), &(&s.d - dp), eta_min, eta_max),
            _ => eta0,
        },
    }
}

fn all_finite<T: Real>(ms: &[DMatrix<T>]) -> bool {
    ms.iter().all(|m| m.iter().all(|v| v.is_finite()))
}

/// One synchronous round over all agents. `round` only labels errors.
///
/// The tracker update is evaluated as `(Σ_j W(i,j)·D_j − H_old) + H_new`;
/// with a single agent this keeps `D = H(X)` bit for bit.
pub fn destiny_round<T, O>(
    states: &mut [AgentState<T>],
    mixing: &MixingMatrix<T>,
    rule: &StepsizeRule<T>,
    objectives: &[O],
    beta: T,
    round: usize,
) -> Result<RoundStep<T>>
where
    T: Real,
    O: LocalObjective<T> + Sync,
{
    if states.len() != objectives.len() || states.len() != mixing.d() {
        return Err(shape(
            "destiny_round",
            format!(
                "{} states, {} objectives, {}x{} mixing matrix",
                states.len(),
                objectives.len(),
                mixing.d(),
                mixing.d()
            ),
        ));
    }

    let etas: Vec<T> = states.iter().map(|s| agent_stepsize(rule, s)).collect();
    let messages: Vec<DMatrix<T>> = states
        .iter()
        .zip(&etas)
        .map(|(s, &eta)| &s.x - &s.d * eta)
        .collect();
    let trackers: Vec<DMatrix<T>> = states.iter().map(|s| s.d.clone()).collect();

    let new_x = mix_stack(mixing.weights(), &messages)?;
    if !all_finite(&new_x) {
        return Err(Error::Diverged { round, what: "local iterate" });
    }
    let new_h: Vec<DMatrix<T>> = new_x
        .par_iter()
        .zip(objectives)
        .map(|(x, o)| local_direction(x, o, beta))
        .collect::<Result<_>>()?;
    if !all_finite(&new_h) {
        return Err(Error::Diverged { round, what: "local direction" });
    }
    let mixed_d = mix_stack(mixing.weights(), &trackers)?;

    for (((state, x), h), md) in states.iter_mut().zip(new_x).zip(new_h).zip(mixed_d) {
        let d = (md - &state.h) + &h;
        let old_x = std::mem::replace(&mut state.x, x);
        let old_d = std::mem::replace(&mut state.d, d);
        state.x_prev = Some(old_x);
        state.d_prev = Some(old_d);
        state.h = h;
    }
    if states.iter().any(|s| s.d.iter().any(|v| !v.is_finite())) {
        return Err(Error::Diverged { round, what: "tracker" });
    }
    Ok(RoundStep { etas })
}

/// The multi-agent state machine: agents, network, objectives and rule.
pub struct Destiny<'a, T: Real, O> {
    mixing: &'a MixingMatrix<T>,
    objectives: &'a [O],
    beta: T,
    rule: StepsizeRule<T>,
    states: Vec<AgentState<T>>,
    rounds: usize,
}

impl<'a, T, O> Destiny<'a, T, O>
where
    T: Real,
    O: LocalObjective<T> + Sync,
{
    pub fn new(
        mixing: &'a MixingMatrix<T>,
        objectives: &'a [O],
        x_initial: &StiefelPoint<T>,
        beta: T,
        rule: StepsizeRule<T>,
    ) -> Result<Self> {
        rule.validate()?;
        if objectives.len() != mixing.d() {
            return Err(shape(
                "Destiny::new",
                format!("{} objectives for a {}-agent network", objectives.len(), mixing.d()),
            ));
        }
        let states = initialize(x_initial, objectives, beta)?;
        Ok(Self {
            mixing,
            objectives,
            beta,
            rule,
            states,
            rounds: 0,
        })
    }

    pub fn step(&mut self) -> Result<RoundStep<T>> {
        let step = destiny_round(
            &mut self.states,
            self.mixing,
            &self.rule,
            self.objectives,
            self.beta,
            self.rounds,
        )?;
        self.rounds += 1;
        Ok(step)
    }

    pub fn states(&self) -> &[AgentState<T>] {
        &self.states
    }

    pub fn into_states(self) -> Vec<AgentState<T>> {
        self.states
    }

    pub fn rounds_completed(&self) -> usize {
        self.rounds
    }

    pub fn objectives(&self) -> &'a [O] {
        self.objectives
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn mixing(&self) -> &'a MixingMatrix<T> {
        self.mixing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::metrics::{mean_direction, mean_iterate, mean_tracker, tracking_residual};
    use crate::network::{metropolis_weights, Graph};
    use crate::problems::{gaussian_matrix, partition_columns, PcaLocal};
    use crate::stiefel::orthonormalize;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pca_agents(d: usize, seed: u64) -> (Vec<PcaLocal<f64>>, StiefelPoint<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: DMatrix<f64> = gaussian_matrix(6, 4 * d, &mut rng);
        let objs = partition_columns(&a, d)
            .unwrap()
            .into_iter()
            .map(|b| PcaLocal::new(b, 2).unwrap())
            .collect();
        let x0 = orthonormalize(&gaussian_matrix(6, 2, &mut rng)).unwrap();
        (objs, x0)
    }

    #[test]
    fn single_agent_is_penalty_gradient_descent() {
        let (objs, x0) = pca_agents(1, 1);
        let w = MixingMatrix::from_weights_unchecked(DMatrix::from_element(1, 1, 1.0));
        let mut sim = Destiny::new(&w, &objs, &x0, 1.0, StepsizeRule::Fixed { eta: 0.05 }).unwrap();
        let mut x = x0.as_matrix().clone();
        for _ in 0..20 {
            let h = local_direction(&x, &objs[0], 1.0).unwrap();
            x = &x - &h * 0.05;
            sim.step().unwrap();
            assert_eq!(sim.states()[0].x, x);
            assert_eq!(sim.states()[0].d, local_direction(&x, &objs[0], 1.0).unwrap());
        }
    }

    #[test]
    fn identical_agents_stay_identical() {
        let (objs, x0) = pca_agents(1, 2);
        let objs = vec![objs[0].clone(); 4];
        let w = metropolis_weights(&Graph::path(4).unwrap()).unwrap();
        let mut sim = Destiny::new(&w, &objs, &x0, 1.0, StepsizeRule::default()).unwrap();
        for _ in 0..5 {
            sim.step().unwrap();
            let first = &sim.states()[0];
            for s in &sim.states()[1..] {
                assert!((&s.x - &first.x).norm() <= 1e-14 * (1.0 + first.x.norm()));
                let scale = 1.0 + first.d.norm() + first.h.norm();
                assert!((&s.d - &first.d).norm() <= 1e-14 * scale, "{} vs {}", (&s.d - &first.d).norm(), scale);
            }
        }
    }

    #[test]
    fn averaged_iterate_identities_hold() {
        let (objs, x0) = pca_agents(3, 3);
        let w = metropolis_weights(&Graph::path(3).unwrap()).unwrap();
        let mut sim = Destiny::new(&w, &objs, &x0, 1.0, StepsizeRule::Fixed { eta: 0.01 }).unwrap();
        for _ in 0..5 {
            let xbar = mean_iterate(sim.states());
            let dbar = mean_tracker(sim.states());
            let hbar = mean_direction(sim.states());
            assert!((&dbar - &hbar).norm() <= 1e-12 * (1.0 + hbar.norm()));
            sim.step().unwrap();
            let next = mean_iterate(sim.states());
            let expect = &xbar - &dbar * 0.01;
            assert!((&next - &expect).norm() <= 1e-12 * expect.norm());
            assert!(tracking_residual(sim.states()) <= 1e-12);
        }
    }

    #[test]
    fn divergence_is_reported_with_round() {
        let (objs, x0) = pca_agents(2, 4);
        let w = metropolis_weights(&Graph::path(2).unwrap()).unwrap();
        let mut sim = Destiny::new(&w, &objs, &x0, 1.0, StepsizeRule::Fixed { eta: 1e120 }).unwrap();
        let mut err = None;
        for _ in 0..10 {
            if let Err(e) = sim.step() {
                err = Some(e);
                break;
            }
        }
        assert!(matches!(err, Some(Error::Diverged { .. })), "{err:?}");
    }

    #[test]
    fn mismatched_network_rejected() {
        let (objs, x0) = pca_agents(2, 5);
        let w = metropolis_weights(&Graph::path(3).unwrap()).unwrap();
        assert!(Destiny::new(&w, &objs, &x0, 1.0, StepsizeRule::default()).is_err());
    }
}
