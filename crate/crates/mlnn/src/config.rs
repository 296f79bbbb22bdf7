//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is also a
//! command-line flag of the same name, applied after the file.
//!
//! | key | value |
//! |---|---|
//! | `loss` | `ce` or `pwe` |
//! | `weighting` | `unit` or `inverse_cardinality`; defaults by loss |
//! | `hidden_units` | integer ≥ 1 |
//! | `hidden_activation` | `relu`, `tanh` or `sigmoid` |
//! | `dropout` | rate in [0, 1) |
//! | `optimizer` | `sgd`, `momentum` or `adagrad` |
//! | `eta0` | a rate, or a comma-separated grid chosen by validation |
//! | `momentum` | coefficient in [0, 1) |
//! | `epochs`, `max_updates`, `batch_size`, `eval_every`, `seed` | integers |
//! | `lambda` | threshold regressor penalty ≥ 0 |
//! | `valid_fraction` | share of `train` held out when `valid` is unset |
//! | `dim`, `label_count` | dataset shape overrides |
//! | `train`, `valid`, `test`, `model`, `report`, `log` | paths |

use std::path::PathBuf;

use mlnn_core::network::{Activation, LabelWeighting, LossConfig, LossKind};
use mlnn_core::optim::OptimizerKind;
use mlnn_core::train::TrainConfig;

use crate::FormatError;

pub const KEYS: [&str; 23] = [
    "loss",
    "weighting",
    "hidden_units",
    "hidden_activation",
    "dropout",
    "optimizer",
    "eta0",
    "momentum",
    "epochs",
    "max_updates",
    "batch_size",
    "eval_every",
    "seed",
    "lambda",
    "valid_fraction",
    "dim",
    "label_count",
    "train",
    "valid",
    "test",
    "model",
    "report",
    "log",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Paths {
    pub train: Option<PathBuf>,
    pub valid: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    /// Set when `eta0` lists more than one rate.
    pub eta0_grid: Option<Vec<f64>>,
    pub valid_fraction: f64,
    pub dim: Option<usize>,
    pub label_count: Option<usize>,
    pub paths: Paths,
    weighting: Option<LabelWeighting>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            eta0_grid: None,
            valid_fraction: 0.1,
            dim: None,
            label_count: None,
            paths: Paths::default(),
            weighting: None,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

impl RunConfig {
    /// Parses a configuration file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| FormatError::syntax(n + 1, "expected key = value"))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|m| FormatError::syntax(n + 1, m))?;
        }
        Ok(cfg)
    }

    /// Sets one key, validating its value on its own. Cross-field checks
    /// happen in [`RunConfig::finish`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let t = &mut self.train;
        match key {
            "loss" => {
                let kind = LossKind::from_name(value)
                    .ok_or_else(|| format!("loss: expected ce or pwe, got {value:?}"))?;
                t.loss = LossConfig::of_kind(kind);
            }
            "weighting" => {
                self.weighting = Some(match value {
                    "unit" => LabelWeighting::Unit,
                    "inverse_cardinality" => LabelWeighting::InverseCardinality,
                    _ => return Err(format!("weighting: unknown {value:?}")),
                })
            }
            "hidden_units" => t.hidden_units = num(key, value)?,
            "hidden_activation" => {
                t.hidden_activation = Activation::from_name(value)
                    .ok_or_else(|| format!("hidden_activation: unknown {value:?}"))?
            }
            "dropout" => t.dropout = num(key, value)?,
            "optimizer" => {
                t.optimizer = OptimizerKind::from_name(value)
                    .ok_or_else(|| format!("optimizer: unknown {value:?}"))?
            }
            "eta0" => {
                let rates = value
                    .split(',')
                    .map(|v| num(key, v.trim()))
                    .collect::<Result<Vec<f64>, _>>()?;
                t.eta0 = rates[0];
                self.eta0_grid = (rates.len() > 1).then_some(rates);
            }
            "momentum" => t.momentum = num(key, value)?,
            "epochs" => t.epochs = num(key, value)?,
            "max_updates" => {
                t.max_updates = match value {
                    "none" => None,
                    v => Some(num(key, v)?),
                }
            }
            "batch_size" => t.batch_size = num(key, value)?,
            "eval_every" => t.eval_every = num(key, value)?,
            "seed" => t.seed = num(key, value)?,
            "lambda" => t.lambda = num(key, value)?,
            "valid_fraction" => self.valid_fraction = num(key, value)?,
            "dim" => self.dim = Some(num(key, value)?),
            "label_count" => self.label_count = Some(num(key, value)?),
            "train" => self.paths.train = Some(value.into()),
            "valid" => self.paths.valid = Some(value.into()),
            "test" => self.paths.test = Some(value.into()),
            "model" => self.paths.model = Some(value.into()),
            "report" => self.paths.report = Some(value.into()),
            "log" => self.paths.log = Some(value.into()),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies the weighting override and validates the training settings.
    pub fn finish(mut self) -> Result<Self, FormatError> {
        if let Some(w) = self.weighting {
            self.train.loss.weighting = w;
        }
        self.train.validate()?;
        if let Some(grid) = &self.eta0_grid {
            if grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(FormatError::Invalid(
                    "eta0 grid entries must be positive".into(),
                ));
            }
        }
        Ok(self)
    }
}
