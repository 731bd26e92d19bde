//! Plain-text experiment configuration.
//!
//! Configs are `key = value` lines; blank lines and lines starting with `#`
//! are ignored. Lists are comma-separated, the curve is given as a kind tag
//! followed by its numeric parameters, and unknown or duplicated keys are
//! hard errors. Example:
//!
//! ```text
//! experiment = variance
//! energies = 11, 101, 1009
//! curve = torus-helix 0.25
//! trials = 1000
//! master_seed = 7
//! points_per_wavelength = 32
//! grid_per_wavelength = 8
//! c0 = 0.1
//! output = runs/variance.jsonl
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::curve::{Curve, CurveError};

/// Default number of Monte Carlo trials.
pub const DEFAULT_TRIALS: u64 = 1000;
/// Default zero-counting grid density (points per wavelength 1/√E).
pub const DEFAULT_POINTS_PER_WAVELENGTH: usize = 32;
/// Default moment-quadrature grid density per axis.
pub const DEFAULT_GRID_PER_WAVELENGTH: usize = 8;
/// Default singular-cube subdivision constant.
pub const DEFAULT_C0: f64 = 0.1;
/// Default curve when a config omits the `curve` key.
pub const DEFAULT_CURVE: &str = "torus-helix 0.25";

/// Errors from parsing or validating a configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    /// The config file could not be read.
    #[error("cannot read config {path}: {message}")]
    Unreadable { path: String, message: String },
    /// A line is not `key = value`, a comment, or blank.
    #[error("line {line}: expected `key = value`, got {text:?}")]
    MalformedLine { line: usize, text: String },
    /// Keys must match the experiment fields exactly.
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    /// Each key may appear at most once.
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    /// A value failed to parse or violated a field invariant.
    #[error("line {line}: bad value for {key}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    /// The experiment tag is not in the catalog.
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    /// A required key is absent.
    #[error("missing required key {0:?}")]
    MissingKey(&'static str),
    /// The curve spec does not describe a valid curve.
    #[error("invalid curve spec: {0}")]
    BadCurve(String),
}

/// The experiment catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    /// Monte Carlo mean of the normalized zero count against 2L/√3.
    Expectation,
    /// Monte Carlo variance of the normalized zero count across an energy
    /// ladder, with the second-moment proxy for comparison.
    Variance,
    /// Deterministic second-moment functional R₂(E) across energies.
    R2Scaling,
    /// Riesz s-energies of projected lattice shells against the uniform
    /// sphere limit.
    Riesz,
    /// Oscillatory-integral decay fit along the curve.
    Oscillatory,
    /// Singular-cube census of the two-point correlation domain.
    Singular,
    /// Shell sizes and admissibility flags across an energy range.
    ShellCensus,
}

impl ExperimentKind {
    /// All kinds, in catalog order.
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Expectation,
        ExperimentKind::Variance,
        ExperimentKind::R2Scaling,
        ExperimentKind::Riesz,
        ExperimentKind::Oscillatory,
        ExperimentKind::Singular,
        ExperimentKind::ShellCensus,
    ];

    /// Stable tag used in configs, CLI subcommands, and records.
    pub fn tag(&self) -> &'static str {
        match self {
            ExperimentKind::Expectation => "expectation",
            ExperimentKind::Variance => "variance",
            ExperimentKind::R2Scaling => "r2-scaling",
            ExperimentKind::Riesz => "riesz",
            ExperimentKind::Oscillatory => "oscillatory",
            ExperimentKind::Singular => "singular",
            ExperimentKind::ShellCensus => "shell-census",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

/// A curve given as kind tag plus numeric parameters, e.g.
/// `torus-helix 0.25 0.2` or `straight-segment 0 0.3 0.7 1 0.3 0.7`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    /// Kind tag understood by the curve catalog.
    pub kind: String,
    /// Positional numeric parameters for that kind.
    pub params: Vec<f64>,
}

impl CurveSpec {
    /// Parses `"<kind> <p1> <p2> …"`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut tokens = text.split_whitespace();
        let kind = tokens.next().ok_or("empty curve spec")?.to_string();
        let params = tokens
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| format!("bad curve parameter {tok:?}"))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        Ok(CurveSpec { kind, params })
    }

    /// Instantiates the curve.
    pub fn build(&self) -> Result<Curve, CurveError> {
        Curve::from_spec(&self.kind, &self.params)
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind)?;
        for p in &self.params {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Which experiment to run.
    pub experiment: ExperimentKind,
    /// Energy ladder (eigenvalues E). For `shell-census` a single entry M is
    /// read as the range 1..=M.
    pub energies: Vec<i64>,
    /// The curve to restrict waves to.
    pub curve: CurveSpec,
    /// Monte Carlo trials per energy.
    pub trials: u64,
    /// Master seed; per-trial seeds are derived from (master, E, trial).
    pub master_seed: u64,
    /// Zero-counting grid density.
    pub points_per_wavelength: usize,
    /// Moment-quadrature grid density per axis.
    pub grid_per_wavelength: usize,
    /// Singular-cube subdivision constant, in (0, 1].
    pub c0: f64,
    /// Where to append records (None prints to stdout).
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses config text. Missing optional keys take the documented
    /// defaults; `experiment` and `energies` are required.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut experiment: Option<ExperimentKind> = None;
        let mut energies: Option<Vec<i64>> = None;
        let mut curve: Option<CurveSpec> = None;
        let mut trials: Option<u64> = None;
        let mut master_seed: Option<u64> = None;
        let mut points_per_wavelength: Option<usize> = None;
        let mut grid_per_wavelength: Option<usize> = None;
        let mut c0: Option<f64> = None;
        let mut output: Option<PathBuf> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::MalformedLine {
                line,
                text: trimmed.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |message: String| ConfigError::BadValue {
                line,
                key: key.to_string(),
                message,
            };
            let duplicate = || ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            };
            match key {
                "experiment" => {
                    if experiment.replace(value.parse()?).is_some() {
                        return Err(duplicate());
                    }
                }
                "energies" => {
                    let list = value
                        .split(',')
                        .map(|tok| {
                            let tok = tok.trim();
                            tok.parse::<i64>().map_err(|_| bad(format!("{tok:?} is not an integer")))
                        })
                        .collect::<Result<Vec<i64>, ConfigError>>()?;
                    if list.is_empty() || value.trim().is_empty() {
                        return Err(bad("energy list is empty".into()));
                    }
                    if let Some(&e) = list.iter().find(|&&e| e <= 0) {
                        return Err(bad(format!("energies must be positive, got {e}")));
                    }
                    if energies.replace(list).is_some() {
                        return Err(duplicate());
                    }
                }
                "curve" => {
                    let spec = CurveSpec::parse(value).map_err(bad)?;
                    if curve.replace(spec).is_some() {
                        return Err(duplicate());
                    }
                }
                "trials" => {
                    let n = value.parse::<u64>().map_err(|_| bad(format!("{value:?} is not a count")))?;
                    if n == 0 {
                        return Err(bad("trials must be ≥ 1".into()));
                    }
                    if trials.replace(n).is_some() {
                        return Err(duplicate());
                    }
                }
                "master_seed" => {
                    let s = value.parse::<u64>().map_err(|_| bad(format!("{value:?} is not a seed")))?;
                    if master_seed.replace(s).is_some() {
                        return Err(duplicate());
                    }
                }
                "points_per_wavelength" => {
                    let n = value.parse::<usize>().map_err(|_| bad(format!("{value:?} is not a count")))?;
                    if n == 0 {
                        return Err(bad("points_per_wavelength must be ≥ 1".into()));
                    }
                    if points_per_wavelength.replace(n).is_some() {
                        return Err(duplicate());
                    }
                }
                "grid_per_wavelength" => {
                    let n = value.parse::<usize>().map_err(|_| bad(format!("{value:?} is not a count")))?;
                    if n == 0 {
                        return Err(bad("grid_per_wavelength must be ≥ 1".into()));
                    }
                    if grid_per_wavelength.replace(n).is_some() {
                        return Err(duplicate());
                    }
                }
                "c0" => {
                    let v = value.parse::<f64>().map_err(|_| bad(format!("{value:?} is not a number")))?;
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(bad(format!("c0 must lie in (0, 1], got {v}")));
                    }
                    if c0.replace(v).is_some() {
                        return Err(duplicate());
                    }
                }
                "output" => {
                    if value.is_empty() {
                        return Err(bad("output path is empty".into()));
                    }
                    if output.replace(PathBuf::from(value)).is_some() {
                        return Err(duplicate());
                    }
                }
                other => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: other.to_string(),
                    })
                }
            }
        }

        let curve = match curve {
            Some(spec) => spec,
            None => CurveSpec::parse(DEFAULT_CURVE).expect("default curve spec parses"),
        };
        curve
            .build()
            .map_err(|e| ConfigError::BadCurve(format!("{curve}: {e}")))?;

        Ok(ExperimentConfig {
            experiment: experiment.ok_or(ConfigError::MissingKey("experiment"))?,
            energies: energies.ok_or(ConfigError::MissingKey("energies"))?,
            curve,
            trials: trials.unwrap_or(DEFAULT_TRIALS),
            master_seed: master_seed.unwrap_or(0),
            points_per_wavelength: points_per_wavelength.unwrap_or(DEFAULT_POINTS_PER_WAVELENGTH),
            grid_per_wavelength: grid_per_wavelength.unwrap_or(DEFAULT_GRID_PER_WAVELENGTH),
            c0: c0.unwrap_or(DEFAULT_C0),
            output,
        })
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Instantiates the configured curve (already validated at parse time).
    pub fn build_curve(&self) -> Result<Curve, CurveError> {
        self.curve.build()
    }
}
