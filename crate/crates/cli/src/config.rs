//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! problem = pca          # pca | olsr | sdl            (required)
//! data = synthetic       # synthetic | csv             (default synthetic)
//! n = 100                # synthetic only              (required)
//! m = 800                # synthetic only              (required)
//! xi = 0.9               # synthetic pca only          (default 0.9)
//! data_path = a.csv      # csv only: A, C or B         (required)
//! labels_path = d.csv    # csv olsr only: indicators D (required)
//! p = 5                  # columns of X                (required)
//! d = 16                 # agents                      (required)
//! prob = 0.5             # Erdős–Rényi edge probability (default 0.5)
//! beta = 1               # penalty parameter           (default 1)
//! stepsize = bb          # bb | fixed                  (default bb)
//! eta = 0.001            # fixed only                  (default 1e-3)
//! eta0 = 0.001           # bb only                     (default 1e-3)
//! eta_min = 1e-10        # bb only                     (default 1e-10)
//! eta_max = 1            # bb only                     (default 1)
//! max_rounds = 3000      #                             (default 3000)
//! tol_substationarity = 1e-4  #                        (default 1e-4)
//! tol_consensus = 1e-6   #                             (default 1e-6)
//! tol_feasibility = 1e-6 #                             (default 1e-6)
//! seed = 0               #                             (default 0)
//! output = trace.csv     # trace CSV path              (default trace.csv)
//! graph_output = g.txt   # optional edge-list dump
//! wall_time = false      # record elapsed seconds      (default false)
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use destiny_core::engine::StepsizeRule;
use destiny_core::problems::Family;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: {source}")]
    Io {
        origin: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: expected `key = value`, got {text:?}")]
    Syntax { origin: String, line: usize, text: String },
    #[error("{origin}:{line}: unknown key `{key}`")]
    UnknownKey { origin: String, line: usize, key: String },
    #[error("{origin}:{line}: key `{key}` given twice")]
    Duplicate { origin: String, line: usize, key: String },
    #[error("{origin}: missing required key `{key}`")]
    Missing { origin: String, key: &'static str },
    #[error("{origin}:{line}: invalid value for `{key}`: {detail}")]
    Invalid {
        origin: String,
        line: usize,
        key: &'static str,
        detail: String,
    },
}

const KEYS: &[&str] = &[
    "problem",
    "data",
    "n",
    "m",
    "xi",
    "data_path",
    "labels_path",
    "p",
    "d",
    "prob",
    "beta",
    "stepsize",
    "eta",
    "eta0",
    "eta_min",
    "eta_max",
    "max_rounds",
    "tol_substationarity",
    "tol_consensus",
    "tol_feasibility",
    "seed",
    "output",
    "graph_output",
    "wall_time",
];

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Generated data; `xi` only matters for PCA.
    Synthetic { n: usize, m: usize, xi: f64 },
    /// `data` holds A (PCA), C (OLSR) or B (SDL); `labels` holds D for OLSR.
    Csv { data: PathBuf, labels: Option<PathBuf> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Family,
    pub data: DataSource,
    pub p: usize,
    pub d: usize,
    pub prob: f64,
    pub beta: f64,
    pub stepsize: StepsizeRule<f64>,
    pub max_rounds: usize,
    pub tol_substationarity: f64,
    pub tol_consensus: f64,
    pub tol_feasibility: f64,
    pub seed: u64,
    pub output: PathBuf,
    pub graph_output: Option<PathBuf>,
    pub wall_time: bool,
}

struct Entries<'a> {
    origin: &'a str,
    map: BTreeMap<&'static str, (usize, String)>,
}

impl Entries<'_> {
    fn raw(&self, key: &'static str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn line(&self, key: &'static str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn invalid(&self, key: &'static str, detail: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            origin: self.origin.to_string(),
            line: self.line(key),
            key,
            detail: detail.into(),
        }
    }

    fn parsed<V: FromStr>(&self, key: &'static str) -> Result<Option<V>, ConfigError>
    where
        V::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((_, text)) => text
                .parse()
                .map(Some)
                .map_err(|e: V::Err| self.invalid(key, format!("{text:?}: {e}"))),
        }
    }

    fn required<V: FromStr>(&self, key: &'static str) -> Result<V, ConfigError>
    where
        V::Err: std::fmt::Display,
    {
        self.parsed(key)?.ok_or(ConfigError::Missing {
            origin: self.origin.to_string(),
            key,
        })
    }

    fn or<V: FromStr>(&self, key: &'static str, default: V) -> Result<V, ConfigError>
    where
        V::Err: std::fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn forbid(&self, key: &'static str, why: &str) -> Result<(), ConfigError> {
        match self.raw(key) {
            Some(_) => Err(self.invalid(key, format!("not applicable {why}"))),
            None => Ok(()),
        }
    }

    fn positive(&self, key: &'static str, v: f64) -> Result<f64, ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.invalid(key, format!("must be positive, got {v}")))
        }
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = PathBuf::from(p);
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

/// Parses and validates a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        origin: origin.clone(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base, &origin)
}

/// Parses config text; relative paths resolve against `base`, and `origin`
/// labels error messages.
pub fn parse_config_str(text: &str, base: &Path, origin: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            origin: origin.to_string(),
            line,
            text: raw.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| ConfigError::UnknownKey {
            origin: origin.to_string(),
            line,
            key: key.to_string(),
        })?;
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                origin: origin.to_string(),
                line,
                text: raw.to_string(),
            });
        }
        if map.insert(*known, (line, value.to_string())).is_some() {
            return Err(ConfigError::Duplicate {
                origin: origin.to_string(),
                line,
                key: key.to_string(),
            });
        }
    }
    let e = Entries { origin, map };

    let problem: Family = e.required("problem")?;
    let p: usize = e.required("p")?;
    let d: usize = e.required("d")?;
    if p == 0 {
        return Err(e.invalid("p", "must be at least 1"));
    }
    if d == 0 {
        return Err(e.invalid("d", "must be at least 1"));
    }

    let kind: String = e.or("data", "synthetic".to_string())?;
    let data = match kind.as_str() {
        "synthetic" => {
            e.forbid("data_path", "to synthetic data")?;
            e.forbid("labels_path", "to synthetic data")?;
            if problem != Family::Pca {
                e.forbid("xi", "outside pca")?;
            }
            let n: usize = e.required("n")?;
            let m: usize = e.required("m")?;
            let xi: f64 = e.or("xi", 0.9)?;
            if p > n {
                return Err(e.invalid("p", format!("need p <= n = {n}, got {p}")));
            }
            if problem == Family::Pca && n > m {
                return Err(e.invalid("m", format!("synthetic pca needs n <= m, got n = {n}, m = {m}")));
            }
            if m == 0 {
                return Err(e.invalid("m", "must be at least 1"));
            }
            if !(xi > 0.0 && xi < 1.0) {
                return Err(e.invalid("xi", format!("must lie in (0, 1), got {xi}")));
            }
            DataSource::Synthetic { n, m, xi }
        }
        "csv" => {
            for k in ["n", "m", "xi"] {
                e.forbid(k, "to csv data")?;
            }
            let data_path: String = e.required("data_path")?;
            let data = resolve(base, &data_path);
            if !data.is_file() {
                return Err(e.invalid("data_path", format!("{} does not exist", data.display())));
            }
            let labels = if problem == Family::Olsr {
                let l: String = e.required("labels_path")?;
                let l = resolve(base, &l);
                if !l.is_file() {
                    return Err(e.invalid("labels_path", format!("{} does not exist", l.display())));
                }
                Some(l)
            } else {
                e.forbid("labels_path", "outside olsr")?;
                None
            };
            DataSource::Csv { data, labels }
        }
        other => return Err(e.invalid("data", format!("expected synthetic or csv, got {other:?}"))),
    };

    let prob: f64 = e.or("prob", 0.5)?;
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(e.invalid("prob", format!("must lie in (0, 1], got {prob}")));
    }
    let beta = e.positive("beta", e.or("beta", 1.0)?)?;

    let rule_name: String = e.or("stepsize", "bb".to_string())?;
    let stepsize = match rule_name.as_str() {
        "bb" => {
            e.forbid("eta", "to the bb rule")?;
            let eta0 = e.positive("eta0", e.or("eta0", 1e-3)?)?;
            let eta_min = e.positive("eta_min", e.or("eta_min", 1e-10)?)?;
            let eta_max = e.positive("eta_max", e.or("eta_max", 1.0)?)?;
            if !(eta_min <= eta0 && eta0 <= eta_max) {
                return Err(e.invalid(
                    "eta0",
                    format!("need eta_min <= eta0 <= eta_max, got {eta_min} <= {eta0} <= {eta_max}"),
                ));
            }
            StepsizeRule::Bb { eta0, eta_min, eta_max }
        }
        "fixed" => {
            for k in ["eta0", "eta_min", "eta_max"] {
                e.forbid(k, "to the fixed rule")?;
            }
            StepsizeRule::Fixed {
                eta: e.positive("eta", e.or("eta", 1e-3)?)?,
            }
        }
        other => return Err(e.invalid("stepsize", format!("expected bb or fixed, got {other:?}"))),
    };

    let max_rounds: usize = e.or("max_rounds", 3000)?;
    let tol_substationarity = e.positive("tol_substationarity", e.or("tol_substationarity", 1e-4)?)?;
    let tol_consensus = e.positive("tol_consensus", e.or("tol_consensus", 1e-6)?)?;
    let tol_feasibility = e.positive("tol_feasibility", e.or("tol_feasibility", 1e-6)?)?;
    let seed: u64 = e.or("seed", 0)?;
    let output = resolve(base, &e.or("output", "trace.csv".to_string())?);
    let graph_output = e.parsed::<String>("graph_output")?.map(|g| resolve(base, &g));
    let wall_time: bool = e.or("wall_time", false)?;

    Ok(ExperimentConfig {
        problem,
        data,
        p,
        d,
        prob,
        beta,
        stepsize,
        max_rounds,
        tol_substationarity,
        tol_consensus,
        tol_feasibility,
        seed,
        output,
        graph_output,
        wall_time,
    })
}

impl ExperimentConfig {
    /// Serializes every field; reparsing the text gives back `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &dyn std::fmt::Display| {
            writeln!(s, "{k} = {v}").expect("writing to a String");
        };
        put("problem", &self.problem.as_str());
        match &self.data {
            DataSource::Synthetic { n, m, xi } => {
                put("data", &"synthetic");
                put("n", n);
                put("m", m);
                if self.problem == Family::Pca {
                    put("xi", xi);
                }
            }
            DataSource::Csv { data, labels } => {
                put("data", &"csv");
                put("data_path", &data.display());
                if let Some(l) = labels {
                    put("labels_path", &l.display());
                }
            }
        }
        put("p", &self.p);
        put("d", &self.d);
        put("prob", &self.prob);
        put("beta", &self.beta);
        match self.stepsize {
            StepsizeRule::Fixed { eta } => {
                put("stepsize", &"fixed");
                put("eta", &eta);
            }
            StepsizeRule::Bb { eta0, eta_min, eta_max } => {
                put("stepsize", &"bb");
                put("eta0", &eta0);
                put("eta_min", &eta_min);
                put("eta_max", &eta_max);
            }
        }
        put("max_rounds", &self.max_rounds);
        put("tol_substationarity", &self.tol_substationarity);
        put("tol_consensus", &self.tol_consensus);
        put("tol_feasibility", &self.tol_feasibility);
        put("seed", &self.seed);
        put("output", &self.output.display());
        if let Some(g) = &self.graph_output {
            put("graph_output", &g.display());
        }
        put("wall_time", &self.wall_time);
        s
    }
}
