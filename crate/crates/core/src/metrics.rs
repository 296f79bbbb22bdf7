//! Ranking and bipartition evaluation measures.
//!
//! | measure | range | better |
//! |---------|-------|--------|
//! | rank loss | [0, 1] | lower |
//! | one-error | {0, 1} | lower |
//! | coverage | [0, L-1] | lower |
//! | average precision | (0, 1] | higher |
//! | micro/macro P, R, F1 | [0, 1] | higher |
//!
//! Rankings sort labels by descending score and break ties by ascending
//! label id. Rank loss does not depend on that tie-break because tied pairs
//! count one half.

use alloc::vec::Vec;

use crate::data::LabelSet;
use crate::threshold::descending_order;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedList {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl RankedList {
    pub fn from_scores(scores: &[f64]) -> Self {
        let order = descending_order(scores);
        let mut rank = alloc::vec![0; scores.len()];
        for (pos, &l) in order.iter().enumerate() {
            rank[l] = pos + 1;
        }
        Self { order, rank }
    }

    /// Label ids from best to worst.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// 1-based rank r(l).
    pub fn rank(&self, label: usize) -> usize {
        self.rank[label]
    }

    pub fn top(&self) -> Option<usize> {
        self.order.first().copied()
    }
}

/// Fraction of (relevant, irrelevant) pairs the scores put in the wrong
/// order, ties counting one half. `None` for empty or full label sets.
pub fn rank_loss(scores: &[f64], y: &LabelSet) -> Option<f64> {
    if !y.has_pairs() {
        return None;
    }
    let irrelevant: Vec<usize> = y.irrelevant().collect();
    let mut wrong = 0.0;
    for &p in y.relevant() {
        for &n in &irrelevant {
            if scores[n] > scores[p] {
                wrong += 1.0;
            } else if scores[n] == scores[p] {
                wrong += 0.5;
            }
        }
    }
    Some(wrong / (y.len() * irrelevant.len()) as f64)
}

/// 1 if the top-ranked label is irrelevant (always 1 for an empty `y`).
pub fn one_error(scores: &[f64], y: &LabelSet) -> f64 {
    match RankedList::from_scores(scores).top() {
        Some(top) if y.contains(top) => 0.0,
        _ => 1.0,
    }
}

/// `max_{l ∈ y} r(l) - 1`; `None` for an empty `y`.
pub fn coverage(scores: &[f64], y: &LabelSet) -> Option<f64> {
    let ranked = RankedList::from_scores(scores);
    y.relevant()
        .iter()
        .map(|&l| ranked.rank(l))
        .max()
        .map(|r| (r - 1) as f64)
}

/// `(1/|y|) Σ_{l ∈ y} |{l' ∈ y : r(l') ≤ r(l)}| / r(l)`; `None` for an
/// empty `y`.
pub fn average_precision(scores: &[f64], y: &LabelSet) -> Option<f64> {
    if y.is_empty() {
        return None;
    }
    let ranked = RankedList::from_scores(scores);
    let mut ranks: Vec<usize> = y.relevant().iter().map(|&l| ranked.rank(l)).collect();
    ranks.sort_unstable();
    // the i-th smallest relevant rank has exactly i + 1 relevant labels at
    // or above it
    let sum: f64 = ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| (i + 1) as f64 / r as f64)
        .sum();
    Some(sum / ranks.len() as f64)
}

/// Per-label confusion counts pooled over examples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: Vec<u64>,
    pub fp: Vec<u64>,
    pub fn_: Vec<u64>,
    pub tn: Vec<u64>,
}

impl ConfusionCounts {
    pub fn new(label_count: usize) -> Self {
        let z = alloc::vec![0; label_count];
        Self {
            tp: z.clone(),
            fp: z.clone(),
            fn_: z.clone(),
            tn: z,
        }
    }

    pub fn label_count(&self) -> usize {
        self.tp.len()
    }

    pub fn add(&mut self, predicted: &[bool], y: &LabelSet) -> Result<()> {
        if predicted.len() != self.label_count() || y.label_count() != self.label_count() {
            return Err(Error::DimensionMismatch {
                what: "bipartition length",
                expected: self.label_count(),
                found: predicted.len(),
            });
        }
        for (l, &p) in predicted.iter().enumerate() {
            match (p, y.contains(l)) {
                (true, true) => self.tp[l] += 1,
                (true, false) => self.fp[l] += 1,
                (false, true) => self.fn_[l] += 1,
                (false, false) => self.tn[l] += 1,
            }
        }
        Ok(())
    }

    pub fn from_predictions(predicted: &[Vec<bool>], gold: &[&LabelSet]) -> Result<Self> {
        let l = gold.first().map_or(0, |y| y.label_count());
        let mut counts = Self::new(l);
        for (p, y) in predicted.iter().zip(gold) {
            counts.add(p, y)?;
        }
        Ok(counts)
    }

    /// Associative merge of two partial counts.
    pub fn merge(&mut self, other: &ConfusionCounts) {
        for (a, b) in [
            (&mut self.tp, &other.tp),
            (&mut self.fp, &other.fp),
            (&mut self.fn_, &other.fn_),
            (&mut self.tn, &other.tn),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartitionScores {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Micro measures from pooled counts; macro measures as unweighted means of
/// per-label values. Any 0/0 ratio counts as 0.
pub fn micro_macro(counts: &ConfusionCounts) -> BipartitionScores {
    let tp: u64 = counts.tp.iter().sum();
    let fp: u64 = counts.fp.iter().sum();
    let fn_: u64 = counts.fn_.iter().sum();
    let l = counts.label_count();
    let mean = |f: &dyn Fn(usize) -> f64| {
        if l == 0 {
            0.0
        } else {
            (0..l).map(f).sum::<f64>() / l as f64
        }
    };
    BipartitionScores {
        micro_precision: ratio(tp, tp + fp),
        micro_recall: ratio(tp, tp + fn_),
        micro_f1: ratio(2 * tp, 2 * tp + fp + fn_),
        macro_precision: mean(&|i| ratio(counts.tp[i], counts.tp[i] + counts.fp[i])),
        macro_recall: mean(&|i| ratio(counts.tp[i], counts.tp[i] + counts.fn_[i])),
        macro_f1: mean(&|i| {
            ratio(
                2 * counts.tp[i],
                2 * counts.tp[i] + counts.fp[i] + counts.fn_[i],
            )
        }),
    }
}

/// The full set of measures over a test set.
///
/// Rank loss, coverage and MAP average over examples whose label set is
/// neither empty nor full; `skipped_examples` counts the rest. One-error
/// averages over every example. If no example qualifies, the averaged
/// ranking measures are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub examples: usize,
    pub skipped_examples: usize,
    pub rank_loss: f64,
    pub one_error: f64,
    pub coverage: f64,
    pub map: f64,
    /// Absent when no bipartitions were supplied.
    pub bipartition: Option<BipartitionScores>,
}

pub fn evaluate(
    scores: &[Vec<f64>],
    bipartitions: Option<&[Vec<bool>]>,
    gold: &[&LabelSet],
) -> Result<EvaluationReport> {
    if gold.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if scores.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            what: "number of scored examples",
            expected: gold.len(),
            found: scores.len(),
        });
    }
    let l = gold[0].label_count();
    for (s, y) in scores.iter().zip(gold) {
        if s.len() != l || y.label_count() != l {
            return Err(Error::DimensionMismatch {
                what: "score vector length",
                expected: l,
                found: s.len(),
            });
        }
    }
    let (mut rl, mut cov, mut ap, mut oe) = (0.0, 0.0, 0.0, 0.0);
    let mut ranked = 0usize;
    for (s, y) in scores.iter().zip(gold) {
        oe += one_error(s, y);
        if y.has_pairs() {
            rl += rank_loss(s, y).expect("has pairs");
            cov += coverage(s, y).expect("nonempty");
            ap += average_precision(s, y).expect("nonempty");
            ranked += 1;
        }
    }
    let n = ranked as f64;
    let bipartition = match bipartitions {
        Some(b) => {
            if b.len() != gold.len() {
                return Err(Error::DimensionMismatch {
                    what: "number of bipartitions",
                    expected: gold.len(),
                    found: b.len(),
                });
            }
            Some(micro_macro(&ConfusionCounts::from_predictions(b, gold)?))
        }
        None => None,
    };
    Ok(EvaluationReport {
        examples: gold.len(),
        skipped_examples: gold.len() - ranked,
        rank_loss: rl / n,
        one_error: oe / gold.len() as f64,
        coverage: cov / n,
        map: ap / n,
        bipartition,
    })
}
