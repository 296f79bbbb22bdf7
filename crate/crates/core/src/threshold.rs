//! Turning label rankings into bipartitions.
//!
//! For every training example the cutoff that maximizes its F1 score is
//! found by exhaustive search over the gaps of its sorted scores. A ridge
//! regressor then learns to predict that cutoff from the example's input
//! features, and at test time labels scoring strictly above the predicted
//! cutoff are assigned.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::data::{LabelSet, SparseVector};
use crate::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 1.0;

/// One F1-optimal cutoff per training example.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTargets(pub Vec<f64>);

impl ThresholdTargets {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Label ids sorted by descending score, ties by ascending id.
pub(crate) fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// The chosen cutoff together with the example F1 it achieves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub value: f64,
    pub f1: f64,
    /// Number of labels scoring above `value`.
    pub predicted: usize,
}

/// Example-level F1 `2 |ŷ ∩ y| / (|ŷ| + |y|)`, with F1 = 1 when both sets
/// are empty.
pub fn example_f1(predicted: &[bool], y: &LabelSet) -> f64 {
    let tp = predicted
        .iter()
        .enumerate()
        .filter(|&(l, &p)| p && y.contains(l))
        .count();
    let npred = predicted.iter().filter(|&&p| p).count();
    if npred + y.len() == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (npred + y.len()) as f64
    }
}

/// The cutoff maximizing example F1 (see [`best_cutoff`]).
pub fn best_threshold(scores: &[f64], y: &LabelSet) -> f64 {
    best_cutoff(scores, y).value
}

/// Searches every midpoint between adjacent distinct sorted scores, plus a
/// cutoff below the lowest score (predict everything). Ties in F1 go to the
/// wider gap, then to the higher cutoff.
///
/// An example with no relevant label gets a cutoff above its highest score
/// and one with every label relevant a cutoff below its lowest; the offset
/// is half the smallest positive gap between scores, or `1e-6` when all
/// scores coincide.
pub fn best_cutoff(scores: &[f64], y: &LabelSet) -> Cutoff {
    let l = scores.len();
    debug_assert_eq!(l, y.label_count());
    if l == 0 {
        return Cutoff {
            value: 0.0,
            f1: 1.0,
            predicted: 0,
        };
    }
    let order = descending_order(scores);
    let sorted: Vec<f64> = order.iter().map(|&i| scores[i]).collect();
    let offset = sorted
        .windows(2)
        .map(|w| w[0] - w[1])
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    let offset = if offset.is_finite() {
        offset / 2.0
    } else {
        1e-6
    };

    if y.is_empty() {
        return Cutoff {
            value: sorted[0] + offset,
            f1: 1.0,
            predicted: 0,
        };
    }
    if y.is_full() {
        return Cutoff {
            value: sorted[l - 1] - offset,
            f1: 1.0,
            predicted: l,
        };
    }

    let relevant = y.len();
    // (true positives, predicted count, gap, cutoff)
    let mut best: Option<(usize, usize, f64, f64)> = None;
    let mut tp = 0;
    for k in 1..=l {
        if y.contains(order[k - 1]) {
            tp += 1;
        }
        let (gap, cutoff) = if k == l {
            (0.0, sorted[l - 1] - offset)
        } else if sorted[k - 1] > sorted[k] {
            (sorted[k - 1] - sorted[k], 0.5 * (sorted[k - 1] + sorted[k]))
        } else {
            continue;
        };
        let better = match best {
            None => true,
            Some((btp, bk, bgap, bcut)) => {
                // F1 = 2 tp / (k + |y|); compare fractions exactly
                let lhs = tp * (bk + relevant);
                let rhs = btp * (k + relevant);
                lhs > rhs || (lhs == rhs && (gap > bgap || (gap == bgap && cutoff > bcut)))
            }
        };
        if better {
            best = Some((tp, k, gap, cutoff));
        }
    }
    let (tp, k, _, value) = best.expect("k = L is always a candidate");
    Cutoff {
        value,
        f1: 2.0 * tp as f64 / (k + relevant) as f64,
        predicted: k,
    }
}

/// Best cutoffs for a batch of scored examples.
pub fn threshold_targets(scores: &[Vec<f64>], labels: &[&LabelSet]) -> Result<ThresholdTargets> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "threshold targets",
            expected: labels.len(),
            found: scores.len(),
        });
    }
    Ok(ThresholdTargets(
        scores
            .iter()
            .zip(labels)
            .map(|(s, y)| best_threshold(s, y))
            .collect(),
    ))
}

/// Linear cutoff predictor `T(x) = θᵀx + b` with ℓ2 penalty `lambda` on θ.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

impl ThresholdModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn predict(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.intercept
    }

    /// `ŷ_l = 1` iff `scores_l > T(x)`.
    pub fn predict_bipartition(&self, x: &SparseVector, scores: &[f64]) -> Vec<bool> {
        let t = self.predict(x);
        scores.iter().map(|&s| s > t).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.intercept.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

/// Stopping rule of the conjugate-gradient ridge solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeSolver {
    /// Stop once the gradient norm of the objective falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RidgeSolver {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
    /// Objective value at the start and after every iteration.
    pub objective: Vec<f64>,
}

/// Minimizes `(1/2M) Σ (θᵀx_m + b - t_m)² + (λ/2) ‖θ‖²` with the default
/// solver settings.
pub fn fit_threshold_regressor(
    xs: &[&SparseVector],
    targets: &ThresholdTargets,
    lambda: f64,
) -> Result<ThresholdModel> {
    fit_threshold_regressor_with(xs, targets, lambda, RidgeSolver::default()).map(|(m, _)| m)
}

/// Conjugate gradients on the normal equations, touching only the nonzero
/// features of each example. The intercept is not penalized.
pub fn fit_threshold_regressor_with(
    xs: &[&SparseVector],
    targets: &ThresholdTargets,
    lambda: f64,
    solver: RidgeSolver,
) -> Result<(ThresholdModel, FitReport)> {
    if xs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if xs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            what: "threshold regression targets",
            expected: xs.len(),
            found: targets.len(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(
            "lambda must be nonnegative and finite",
        ));
    }
    let dim = xs[0].dim();
    if let Some(x) = xs.iter().find(|x| x.dim() != dim) {
        return Err(Error::DimensionMismatch {
            what: "threshold regression features",
            expected: dim,
            found: x.dim(),
        });
    }
    let problem = Ridge {
        xs,
        t: targets.as_slice(),
        lambda,
        dim,
    };

    // unknowns: θ (dim) followed by b
    let mut w = alloc::vec![0.0; dim + 1];
    let mut r: Vec<f64> = problem.gradient(&w).iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let mut objective = alloc::vec![problem.objective(&w)];
    let mut iterations = 0;
    while iterations < solver.max_iterations && libm::sqrt(rs) >= solver.tolerance {
        let ap = problem.hessian_apply(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rs / pap;
        for i in 0..w.len() {
            w[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_next = dot(&r, &r);
        let beta = rs_next / rs;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_next;
        iterations += 1;
        objective.push(problem.objective(&w));
    }
    let gradient_norm = libm::sqrt(problem.gradient(&w).iter().map(|g| g * g).sum());
    let intercept = w.pop().expect("dim + 1 unknowns");
    Ok((
        ThresholdModel {
            weights: w,
            intercept,
            lambda,
        },
        FitReport {
            iterations,
            gradient_norm,
            converged: gradient_norm < solver.tolerance,
            objective,
        },
    ))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Ridge<'a> {
    xs: &'a [&'a SparseVector],
    t: &'a [f64],
    lambda: f64,
    dim: usize,
}

impl Ridge<'_> {
    fn predict(&self, w: &[f64], x: &SparseVector) -> f64 {
        x.dot(&w[..self.dim]) + w[self.dim]
    }

    fn objective(&self, w: &[f64]) -> f64 {
        let m = self.xs.len() as f64;
        let sse: f64 = self
            .xs
            .iter()
            .zip(self.t)
            .map(|(x, t)| {
                let r = self.predict(w, x) - t;
                r * r
            })
            .sum();
        sse / (2.0 * m) + 0.5 * self.lambda * dot(&w[..self.dim], &w[..self.dim])
    }

    /// (1/M) X̃ᵀ(X̃w - t) + λ Pw
    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let m = self.xs.len() as f64;
        let mut g = alloc::vec![0.0; self.dim + 1];
        for (x, t) in self.xs.iter().zip(self.t) {
            let r = (self.predict(w, x) - t) / m;
            for (i, v) in x.iter() {
                g[i] += r * v;
            }
            g[self.dim] += r;
        }
        for i in 0..self.dim {
            g[i] += self.lambda * w[i];
        }
        g
    }

    /// ((1/M) X̃ᵀX̃ + λP) p
    fn hessian_apply(&self, p: &[f64]) -> Vec<f64> {
        let m = self.xs.len() as f64;
        let mut out = alloc::vec![0.0; self.dim + 1];
        for x in self.xs {
            let u = self.predict(p, x) / m;
            for (i, v) in x.iter() {
                out[i] += u * v;
            }
            out[self.dim] += u;
        }
        for i in 0..self.dim {
            out[i] += self.lambda * p[i];
        }
        out
    }
}
