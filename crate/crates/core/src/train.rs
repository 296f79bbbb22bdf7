//! Stochastic gradient training with validation-based model selection,
//! followed by threshold calibration.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::data::{Dataset, LabelSet, SparseVector};
use crate::metrics::{evaluate, EvaluationReport};
use crate::network::{
    forward, loss_and_gradient, Activation, Dims, Dropout, Gradients, LossConfig, NetworkParams,
};
use crate::optim::{OptimizerKind, OptimizerState};
use crate::threshold::{
    fit_threshold_regressor_with, threshold_targets, FitReport, RidgeSolver, ThresholdModel,
};
use crate::{rng, Error, Result};

/// Base learning rates tried by [`select_learning_rate`] by default.
pub const ETA0_GRID: [f64; 3] = [0.001, 0.01, 0.1];

// stream tags for seed derivation
const INIT: u64 = 1;
const SHUFFLE: u64 = 2;
const DROPOUT: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub loss: LossConfig,
    pub hidden_units: usize,
    pub hidden_activation: Activation,
    /// Hidden-layer dropout rate; 0 disables dropout.
    pub dropout: f64,
    pub optimizer: OptimizerKind,
    pub eta0: f64,
    pub momentum: f64,
    pub epochs: usize,
    /// Stop after this many optimizer updates even if epochs remain.
    pub max_updates: Option<u64>,
    pub batch_size: usize,
    /// Evaluate on the validation set every this many updates.
    pub eval_every: u64,
    pub seed: u64,
    /// ℓ2 penalty of the threshold regressor.
    pub lambda: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss: LossConfig::cross_entropy(),
            hidden_units: 1000,
            hidden_activation: Activation::Relu,
            dropout: 0.5,
            optimizer: OptimizerKind::AdaGrad,
            eta0: 0.01,
            momentum: 0.9,
            epochs: 10,
            max_updates: None,
            batch_size: 1,
            eval_every: 1000,
            seed: 0,
            lambda: crate::threshold::DEFAULT_LAMBDA,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let checks: [(bool, &'static str); 8] = [
            (self.hidden_units >= 1, "hidden_units must be at least 1"),
            (
                self.eta0 > 0.0 && self.eta0.is_finite(),
                "eta0 must be positive",
            ),
            (
                (0.0..1.0).contains(&self.dropout),
                "dropout must lie in [0, 1)",
            ),
            (
                (0.0..1.0).contains(&self.momentum),
                "momentum must lie in [0, 1)",
            ),
            (self.epochs >= 1, "epochs must be at least 1"),
            (self.batch_size >= 1, "batch_size must be at least 1"),
            (self.eval_every >= 1, "eval_every must be at least 1"),
            (
                self.lambda >= 0.0 && self.lambda.is_finite(),
                "lambda must be nonnegative",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidConfig(msg)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub updates: u64,
    /// Mean training cost since the previous entry.
    pub train_loss: f64,
    pub val_rank_loss: f64,
    pub val_map: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub entries: Vec<LogEntry>,
}

impl RunLog {
    pub fn last(&self) -> Option<&LogEntry> {
        self.entries.last()
    }

    /// The entry with the lowest validation rank loss (earliest on ties).
    pub fn best(&self) -> Option<&LogEntry> {
        self.entries
            .iter()
            .filter(|e| !e.val_rank_loss.is_nan())
            .fold(None, |best: Option<&LogEntry>, e| match best {
                Some(b) if b.val_rank_loss <= e.val_rank_loss => Some(b),
                _ => Some(e),
            })
    }
}

/// A trained network plus its optional threshold predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub params: NetworkParams,
    pub hidden_activation: Activation,
    pub loss: LossConfig,
    pub threshold: Option<ThresholdModel>,
}

impl Model {
    pub fn output_activation(&self) -> Activation {
        self.loss.output_activation()
    }

    /// Inference-mode label scores.
    pub fn scores(&self, x: &SparseVector) -> Result<Vec<f64>> {
        Ok(forward(
            &self.params,
            x,
            self.hidden_activation,
            self.output_activation(),
            None,
        )?
        .o)
    }

    pub fn score_dataset(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        self.check_dataset(data)?;
        data.iter()
            .map(|inst| self.scores(&inst.features))
            .collect()
    }

    /// Label assignments through the threshold predictor, if there is one.
    pub fn predict(&self, x: &SparseVector) -> Result<Option<Vec<bool>>> {
        let Some(t) = &self.threshold else {
            return Ok(None);
        };
        let scores = self.scores(x)?;
        Ok(Some(t.predict_bipartition(x, &scores)))
    }

    fn check_dataset(&self, data: &Dataset) -> Result<()> {
        let dims = self.params.dims();
        if data.dim() != dims.input {
            return Err(Error::DimensionMismatch {
                what: "dataset feature dimension",
                expected: dims.input,
                found: data.dim(),
            });
        }
        if data.label_count() != dims.labels {
            return Err(Error::DimensionMismatch {
                what: "dataset label count",
                expected: dims.labels,
                found: data.label_count(),
            });
        }
        Ok(())
    }

    /// Ranking measures always; bipartition measures when a threshold
    /// predictor is present.
    pub fn evaluate(&self, data: &Dataset) -> Result<EvaluationReport> {
        let scores = self.score_dataset(data)?;
        let gold: Vec<&LabelSet> = data.iter().map(|i| &i.labels).collect();
        let bips: Option<Vec<Vec<bool>>> = self.threshold.as_ref().map(|t| {
            data.iter()
                .zip(&scores)
                .map(|(inst, s)| t.predict_bipartition(&inst.features, s))
                .collect()
        });
        evaluate(&scores, bips.as_deref(), &gold)
    }

    /// Fits the threshold predictor on the F1-optimal cutoffs of `data`'s
    /// own scores.
    pub fn fit_threshold(&mut self, data: &Dataset, lambda: f64) -> Result<FitReport> {
        let scores = self.score_dataset(data)?;
        let gold: Vec<&LabelSet> = data.iter().map(|i| &i.labels).collect();
        let targets = threshold_targets(&scores, &gold)?;
        let xs: Vec<&SparseVector> = data.iter().map(|i| &i.features).collect();
        let (model, report) =
            fit_threshold_regressor_with(&xs, &targets, lambda, RidgeSolver::default())?;
        self.threshold = Some(model);
        Ok(report)
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Invalid(#[from] Error),
    /// Training produced a non-finite cost or gradient. `checkpoint` holds
    /// the best parameters validated so far, or the initial ones if nothing
    /// has been validated yet.
    #[error("training diverged at update {updates}: {reason}")]
    Diverged {
        updates: u64,
        reason: &'static str,
        checkpoint: Box<NetworkParams>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: Model,
    pub log: RunLog,
    /// Total optimizer updates performed.
    pub updates: u64,
    /// Update count at which the returned parameters were taken.
    pub selected_at: u64,
    /// Example visits skipped because the loss was undefined for them.
    pub skipped_examples: u64,
    pub threshold_fit: FitReport,
}

fn validation_measures(
    params: &NetworkParams,
    hidden: Activation,
    loss: LossConfig,
    valid: &Dataset,
) -> Result<(f64, f64)> {
    let mut scores = Vec::with_capacity(valid.len());
    for inst in valid {
        scores.push(
            forward(
                params,
                &inst.features,
                hidden,
                loss.output_activation(),
                None,
            )?
            .o,
        );
    }
    let gold: Vec<&LabelSet> = valid.iter().map(|i| &i.labels).collect();
    let r = evaluate(&scores, None, &gold)?;
    Ok((r.rank_loss, r.map))
}

/// Runs SGD on `train` as configured, evaluating on `valid` every
/// `eval_every` updates and once at the end. The parameters with the lowest
/// validation rank loss are kept, then the threshold predictor is fitted on
/// `train`.
///
/// Examples are reshuffled every epoch from a seed derived from
/// `config.seed` and the epoch number, and dropout masks from the seed,
/// update count and position in the batch, so a run is fully reproducible.
pub fn train(
    config: &TrainConfig,
    train: &Dataset,
    valid: &Dataset,
) -> core::result::Result<TrainOutcome, TrainError> {
    config.validate()?;
    if train.dim() != valid.dim() || train.label_count() != valid.label_count() {
        return Err(Error::DimensionMismatch {
            what: "validation set shape",
            expected: train.dim(),
            found: valid.dim(),
        }
        .into());
    }
    let dims = Dims::new(train.dim(), config.hidden_units, train.label_count());
    let hidden = config.hidden_activation;
    let loss = config.loss;
    let mut params = NetworkParams::init(dims, rng::derive(config.seed, &[INIT]));
    let mut opt =
        OptimizerState::new(config.optimizer, config.eta0, dims)?.with_momentum(config.momentum)?;
    let max_updates = config.max_updates.unwrap_or(u64::MAX);

    let mut log = RunLog::default();
    let mut best: Option<(f64, NetworkParams, u64)> = None;
    let (mut loss_sum, mut loss_count) = (0.0, 0u64);
    let mut skipped = 0u64;

    let record = |log: &mut RunLog,
                  params: &NetworkParams,
                  updates: u64,
                  loss_sum: &mut f64,
                  loss_count: &mut u64,
                  best: &mut Option<(f64, NetworkParams, u64)>|
     -> Result<()> {
        let (rl, map) = validation_measures(params, hidden, loss, valid)?;
        log.entries.push(LogEntry {
            updates,
            train_loss: if *loss_count == 0 {
                f64::NAN
            } else {
                *loss_sum / *loss_count as f64
            },
            val_rank_loss: rl,
            val_map: map,
        });
        *loss_sum = 0.0;
        *loss_count = 0;
        let improves = match best {
            Some((b, _, _)) => rl < *b,
            None => !rl.is_nan(),
        };
        if improves {
            *best = Some((rl, params.clone(), updates));
        }
        Ok(())
    };

    let initial = params.clone();
    let diverged = |updates, reason, best: &Option<(f64, NetworkParams, u64)>| {
        let checkpoint = best
            .as_ref()
            .map_or_else(|| initial.clone(), |b| b.1.clone());
        TrainError::Diverged {
            updates,
            reason,
            checkpoint: Box::new(checkpoint),
        }
    };

    let mut order: Vec<usize> = (0..train.len()).collect();
    let instances = train.instances();
    'epochs: for epoch in 0..config.epochs {
        order.sort_unstable();
        order.shuffle(&mut rng::seeded(rng::derive(
            config.seed,
            &[SHUFFLE, epoch as u64],
        )));
        for batch in order.chunks(config.batch_size) {
            if opt.step() >= max_updates {
                break 'epochs;
            }
            let mut acc: Option<Gradients> = None;
            let mut used = 0usize;
            for (k, &i) in batch.iter().enumerate() {
                let inst = &instances[i];
                let dropout = (config.dropout > 0.0).then(|| Dropout {
                    rate: config.dropout,
                    seed: rng::derive(config.seed, &[DROPOUT, opt.step(), k as u64]),
                });
                let Some((value, grad)) = loss_and_gradient(
                    &loss,
                    &params,
                    &inst.features,
                    &inst.labels,
                    hidden,
                    dropout,
                )?
                else {
                    skipped += 1;
                    continue;
                };
                if !value.is_finite() {
                    return Err(diverged(opt.step(), "non-finite training cost", &best));
                }
                loss_sum += value;
                loss_count += 1;
                used += 1;
                match acc.as_mut() {
                    Some(a) => a.accumulate(&grad),
                    None => acc = Some(grad),
                }
            }
            let Some(mut grad) = acc else { continue };
            if used > 1 {
                grad.scale(1.0 / used as f64);
            }
            match opt.update(&mut params, &grad) {
                Ok(()) => {}
                Err(Error::NonFiniteGradient(_)) => {
                    return Err(diverged(opt.step(), "non-finite gradient", &best));
                }
                Err(e) => return Err(e.into()),
            }
            if opt.step() % config.eval_every == 0 {
                record(
                    &mut log,
                    &params,
                    opt.step(),
                    &mut loss_sum,
                    &mut loss_count,
                    &mut best,
                )?;
            }
        }
    }
    if log.last().map(|e| e.updates) != Some(opt.step()) {
        record(
            &mut log,
            &params,
            opt.step(),
            &mut loss_sum,
            &mut loss_count,
            &mut best,
        )?;
    }

    let updates = opt.step();
    let (params, selected_at) = match best {
        Some((_, p, at)) => (p, at),
        None => (params, updates),
    };
    let mut model = Model {
        params,
        hidden_activation: hidden,
        loss,
        threshold: None,
    };
    let threshold_fit = model.fit_threshold(train, config.lambda)?;
    Ok(TrainOutcome {
        model,
        log,
        updates,
        selected_at,
        skipped_examples: skipped,
        threshold_fit,
    })
}

/// Trains once per base learning rate in `grid` and keeps the run whose
/// best validation rank loss is lowest (earliest on ties).
pub fn select_learning_rate(
    config: &TrainConfig,
    grid: &[f64],
    train_set: &Dataset,
    valid: &Dataset,
) -> core::result::Result<(f64, TrainOutcome), TrainError> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("learning-rate grid is empty").into());
    }
    let mut best: Option<(f64, f64, TrainOutcome)> = None;
    for &eta0 in grid {
        let cfg = TrainConfig {
            eta0,
            ..config.clone()
        };
        let outcome = train(&cfg, train_set, valid)?;
        let score = outcome
            .log
            .best()
            .map_or(f64::INFINITY, |e| e.val_rank_loss);
        if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
            best = Some((score, eta0, outcome));
        }
    }
    let (_, eta0, outcome) = best.expect("grid is nonempty");
    Ok((eta0, outcome))
}
