//! Builds a run from an [`ExperimentConfig`] and executes it.

use destiny_core::engine::{run, RunConfig, RunOutcome, RunStatus};
use destiny_core::network::{erdos_renyi, metropolis_weights, verify_assumption2, write_edge_list, Assumption2Report, Graph};
use destiny_core::penalty::PenaltyParam;
use destiny_core::problems::{
    gaussian_matrix, generate_synthetic_olsr, generate_synthetic_pca, generate_synthetic_sdl, load_matrix_csv,
    partition_columns, Family, LocalProblem, OlsrLocal, PcaLocal, SdlLocal, SyntheticSpec,
};
use destiny_core::stiefel::{orthonormalize, StiefelPoint};
use destiny_core::{Matrix, Mixing};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{DataSource, ExperimentConfig};
use crate::trace::write_trace_csv;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Core(#[from] destiny_core::Error),
    #[error("writing {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("mixing matrix fails its checks: {0}")]
    Mixing(String),
}

/// The communication side of an experiment.
pub struct NetworkSetup {
    pub graph: Graph,
    pub mixing: Mixing,
    pub report: Assumption2Report<f64>,
}

pub fn build_network(cfg: &ExperimentConfig) -> Result<NetworkSetup, ExperimentError> {
    let graph = erdos_renyi(cfg.d, cfg.prob, cfg.seed)?;
    let mixing: Mixing = metropolis_weights(&graph)?;
    let report = verify_assumption2(mixing.weights(), &graph);
    Ok(NetworkSetup { graph, mixing, report })
}

/// Generates or loads the data and splits it across `cfg.d` agents.
pub fn build_objectives(cfg: &ExperimentConfig) -> Result<Vec<LocalProblem<f64>>, ExperimentError> {
    let p = cfg.p;
    let (data, labels): (Matrix, Option<Matrix>) = match &cfg.data {
        DataSource::Synthetic { n, m, xi } => match cfg.problem {
            Family::Pca => {
                let spec = SyntheticSpec { n: *n, m: *m, p, xi: *xi, seed: cfg.seed };
                (generate_synthetic_pca(&spec)?, None)
            }
            Family::Olsr => {
                let (c, d) = generate_synthetic_olsr(*n, *m, p, cfg.seed)?;
                (c, Some(d))
            }
            Family::Sdl => (generate_synthetic_sdl(*n, *m, cfg.seed)?, None),
        },
        DataSource::Csv { data, labels } => {
            let a = load_matrix_csv(data)?;
            let d = labels.as_ref().map(load_matrix_csv).transpose()?;
            (a, d)
        }
    };
    let blocks = partition_columns(&data, cfg.d)?;
    let objectives = match cfg.problem {
        Family::Pca => blocks
            .into_iter()
            .map(|a| PcaLocal::new(a, p).map(LocalProblem::Pca))
            .collect::<Result<_, _>>()?,
        Family::Sdl => blocks
            .into_iter()
            .map(|b| SdlLocal::new(b, p).map(LocalProblem::Sdl))
            .collect::<Result<_, _>>()?,
        Family::Olsr => {
            let labels = labels.expect("olsr data carries labels");
            let label_blocks = partition_columns(&labels, cfg.d)?;
            blocks
                .into_iter()
                .zip(label_blocks)
                .map(|(c, d)| OlsrLocal::new(c, d).map(LocalProblem::Olsr))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(objectives)
}

/// Seeded random starting point, drawn from a stream separate from the data.
pub fn initial_point(n: usize, p: usize, seed: u64) -> Result<StiefelPoint<f64>, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let g: Matrix = gaussian_matrix(n, p, &mut rng);
    Ok(orthonormalize(&g)?)
}

pub fn run_config(cfg: &ExperimentConfig) -> Result<RunConfig<f64>, ExperimentError> {
    let rc = RunConfig {
        beta: PenaltyParam::new(cfg.beta)?,
        rule: cfg.stepsize,
        max_rounds: cfg.max_rounds,
        tol_substationarity: cfg.tol_substationarity,
        tol_consensus: cfg.tol_consensus,
        tol_feasibility: cfg.tol_feasibility,
        record_wall_time: cfg.wall_time,
    };
    rc.validate()?;
    Ok(rc)
}

pub struct ExperimentReport {
    pub lambda: f64,
    pub outcome: RunOutcome<f64>,
}

impl ExperimentReport {
    pub fn summary(&self) -> String {
        let status = match &self.outcome.status {
            RunStatus::Converged => "converged".to_string(),
            RunStatus::MaxRounds => "max_rounds".to_string(),
            RunStatus::Diverged { round, what } => format!("diverged(round {round}, {what})"),
        };
        match self.outcome.trace.last() {
            Some(r) => format!(
                "status={status} rounds={} substationarity={:.3e} consensus={:.3e} feasibility={:.3e} h={:.6e} lambda={:.4}",
                self.outcome.trace.len(),
                r.substationarity,
                r.consensus,
                r.feasibility,
                r.h_value,
                self.lambda
            ),
            None => format!("status={status} rounds=0 lambda={:.4}", self.lambda),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.outcome.status {
            RunStatus::Converged => 0,
            RunStatus::MaxRounds => 2,
            RunStatus::Diverged { .. } => 3,
        }
    }
}

/// Runs the experiment and writes the trace (and optional edge list).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let rc = run_config(cfg)?;
    let net = build_network(cfg)?;
    if !net.report.all_passed() {
        return Err(ExperimentError::Mixing(net.report.to_string()));
    }
    if let Some(path) = &cfg.graph_output {
        write_edge_list(&net.graph, path)?;
    }
    let objectives = build_objectives(cfg)?;
    let (n, p) = destiny_core::problems::LocalObjective::dims(&objectives[0]);
    let x0 = initial_point(n, p, cfg.seed)?;
    let outcome = run(&rc, &net.mixing, &objectives, &x0)?;
    write_trace_csv(&cfg.output, &outcome.trace).map_err(|source| ExperimentError::Output {
        path: cfg.output.display().to_string(),
        source,
    })?;
    Ok(ExperimentReport {
        lambda: net.mixing.lambda(),
        outcome,
    })
}
