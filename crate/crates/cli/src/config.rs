use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walklab_core::asymptotics::DecayModel;
use walklab_core::scales::Symbol;
use walklab_core::{GroupKind, MeasureSpec, MomentScale, QuotientKind};

use crate::verify::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Walk,
    Mc,
    Spectral,
    Fit,
    Verify,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Walk => "walk",
            Task::Mc => "mc",
            Task::Spectral => "spectral",
            Task::Fit => "fit",
            Task::Verify => "verify",
        }
    }
}

/// How `walk` and `fit` obtain return probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesRoute {
    /// Rationals for small uniform balls, the Fourier symbol for heavy
    /// tails on `Z`, float convolution otherwise.
    #[default]
    Auto,
    Rational,
    Exact,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// Collision counts of `n`-step endpoints, estimating `φ^(2n)(e)`.
    #[default]
    Collision,
    /// `E[2^{−R}; S = 0]` for switch-walk measures on lamplighters.
    RangeIdentity,
    /// Visited-site counts of lattice walks.
    Range,
}

/// One experiment, read from a JSON file.
///
/// Unknown fields are rejected. Paths are not part of the config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// May be left out when the command line names the task.
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub measure: Option<String>,
    /// Largest even `n` of a return series.
    #[serde(default, alias = "nMax")]
    pub n_max: Option<u64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub method: Option<SeriesRoute>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Walk lengths for `mc`.
    #[serde(default)]
    pub ns: Option<Vec<u64>>,
    #[serde(default)]
    pub estimator: Option<Estimator>,
    #[serde(default)]
    pub rho: Option<String>,
    #[serde(default)]
    pub psi: Option<String>,
    #[serde(default)]
    pub quotient: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default, alias = "nRange")]
    pub n_range: Option<(u64, u64)>,
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub suite: Option<String>,
    /// Convolution powers to materialize through the cache.
    #[serde(default)]
    pub powers: Option<Vec<u64>>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
}

/// A config problem, located in the source text when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Spec strings of a config, parsed.
#[derive(Debug, Clone, Default)]
pub struct Parsed {
    pub group: Option<GroupKind>,
    pub measure: Option<MeasureSpec>,
    pub rho: Option<MomentScale>,
    pub psi: Option<Symbol>,
    pub quotient: Option<QuotientKind>,
    pub model: Option<DecayModel>,
    pub suite: Option<Suite>,
}

/// 1-based line and column of the key `"field"` in `text`, or `(1, 1)`.
fn locate(text: &str, field: &str) -> (usize, usize) {
    let needle = format!("\"{field}\"");
    let mut from = 0;
    while let Some(i) = text[from..].find(&needle) {
        let at = from + i;
        let after = text[at + needle.len()..].trim_start();
        if after.starts_with(':') {
            let line = text[..at].matches('\n').count() + 1;
            let column = at - text[..at].rfind('\n').map_or(0, |j| j + 1) + 1;
            return (line, column);
        }
        from = at + needle.len();
    }
    (1, 1)
}

impl ExperimentConfig {
    /// Parses and validates a JSON config.
    pub fn parse(text: &str) -> Result<(Self, Parsed), ConfigError> {
        Self::parse_for(text, None, None)
    }

    /// Parses a config for the task named on the command line, which must
    /// agree with the file if the file names one too. A command-line seed
    /// replaces the file's.
    pub fn parse_for(text: &str, task: Option<Task>, seed: Option<u64>) -> Result<(Self, Parsed), ConfigError> {
        let mut config: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            line: e.line(),
            column: e.column(),
            field: None,
            message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
        })?;
        match (config.task, task) {
            (Some(a), Some(b)) if a != b => {
                let (line, column) = locate(text, "task");
                return Err(ConfigError {
                    line,
                    column,
                    field: Some("task".into()),
                    message: format!("config is for task {}, command line asks for {}", a.as_str(), b.as_str()),
                });
            }
            (None, b) => config.task = b,
            _ => {}
        }
        if seed.is_some() {
            config.seed = seed;
        }
        let parsed = config.validate().map_err(|(field, message)| {
            let (line, column) = locate(text, field);
            ConfigError { line, column, field: Some(field.to_string()), message }
        })?;
        Ok((config, parsed))
    }

    /// Checks that spec strings parse and the task has what it needs.
    pub fn validate(&self) -> Result<Parsed, (&'static str, String)> {
        let task = self.task.ok_or(("task", "no task given in the config or on the command line".to_string()))?;
        fn spec<T: std::str::FromStr<Err = walklab_core::Error>>(
            field: &'static str,
            v: &Option<String>,
        ) -> Result<Option<T>, (&'static str, String)> {
            v.as_deref().map(|s| s.parse::<T>().map_err(|e| (field, e.to_string()))).transpose()
        }
        let parsed = Parsed {
            group: spec("group", &self.group)?,
            measure: spec("measure", &self.measure)?,
            rho: spec("rho", &self.rho)?,
            psi: spec("psi", &self.psi)?,
            quotient: spec("quotient", &self.quotient)?,
            model: spec("model", &self.model)?,
            suite: self.suite.as_deref().map(|s| s.parse::<Suite>().map_err(|e| ("suite", e))).transpose()?,
        };
        let need = |field: &'static str, present: bool| {
            if present {
                Ok(())
            } else {
                Err((field, format!("required for task {}", task.as_str())))
            }
        };
        match task {
            Task::Walk => {
                need("group", parsed.group.is_some())?;
                need("measure", parsed.measure.is_some())?;
                need("n_max", self.n_max.is_some())?;
            }
            Task::Mc => {
                need("group", parsed.group.is_some())?;
                need("measure", parsed.measure.is_some())?;
                need("seed", self.seed.is_some())?;
                need("ns", self.ns.as_ref().is_some_and(|v| !v.is_empty()))?;
            }
            Task::Spectral => {
                need("group", parsed.group.is_some())?;
                need("measure", parsed.measure.is_some())?;
                need("quotient", parsed.quotient.is_some())?;
            }
            Task::Fit => {
                need("group", parsed.group.is_some())?;
                need("measure", parsed.measure.is_some())?;
                need("model", parsed.model.is_some())?;
                need("n_range", self.n_range.is_some())?;
            }
            Task::Verify => need("suite", parsed.suite.is_some())?,
        }
        if let Some(n) = self.n_max {
            if n < 2 || n % 2 != 0 {
                return Err(("n_max", format!("must be an even number ≥ 2, got {n}")));
            }
        }
        if let Some((lo, hi)) = self.n_range {
            if lo == 0 || lo > hi {
                return Err(("n_range", format!("need 0 < lo ≤ hi, got [{lo}, {hi}]")));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(("epsilon", format!("must be finite and nonnegative, got {eps}")));
            }
        }
        if self.samples == Some(0) {
            return Err(("samples", "must be positive".into()));
        }
        Ok(parsed)
    }

    /// The task; set once the config has been validated.
    pub fn task(&self) -> Task {
        self.task.expect("validated configs have a task")
    }

    /// SHA-256 of the config with output and cache paths removed.
    pub fn hash(&self) -> String {
        let mut bare = self.clone();
        bare.out = None;
        bare.cache = None;
        let text = serde_json::to_string(&bare).expect("configs serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
