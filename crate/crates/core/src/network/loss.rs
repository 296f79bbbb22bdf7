use alloc::vec::Vec;

use super::{Activation, ForwardTrace};
use crate::data::LabelSet;
use crate::{Error, Result};

/// Outputs are clamped to `[CE_CLAMP, 1 - CE_CLAMP]` before taking logs.
pub const CE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    /// Per-label cross entropy on sigmoid outputs.
    CrossEntropy,
    /// BP-MLL pairwise exponential error on tanh outputs.
    Pairwise,
}

impl LossKind {
    pub const ALL: [LossKind; 2] = [LossKind::CrossEntropy, LossKind::Pairwise];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::CrossEntropy => "ce",
            LossKind::Pairwise => "pwe",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// The per-example factor `w(y)` applied to a loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelWeighting {
    Unit,
    /// `1 / (|y| |ȳ|)`; undefined for empty or full label sets.
    InverseCardinality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LossConfig {
    pub kind: LossKind,
    pub weighting: LabelWeighting,
}

/// Counts floating-point operations spent on output deltas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub flops: u64,
}

impl OpCounter {
    #[inline]
    fn add(&mut self, n: u64) {
        self.flops += n;
    }
}

impl LossConfig {
    pub fn cross_entropy() -> Self {
        Self {
            kind: LossKind::CrossEntropy,
            weighting: LabelWeighting::Unit,
        }
    }

    pub fn pairwise() -> Self {
        Self {
            kind: LossKind::Pairwise,
            weighting: LabelWeighting::InverseCardinality,
        }
    }

    /// The default weighting of a loss kind.
    pub fn of_kind(kind: LossKind) -> Self {
        match kind {
            LossKind::CrossEntropy => Self::cross_entropy(),
            LossKind::Pairwise => Self::pairwise(),
        }
    }

    pub fn output_activation(&self) -> Activation {
        match self.kind {
            LossKind::CrossEntropy => Activation::Sigmoid,
            LossKind::Pairwise => Activation::Tanh,
        }
    }

    pub fn check_output(&self, output_act: Activation) -> Result<()> {
        if output_act == self.output_activation() {
            Ok(())
        } else {
            Err(Error::Incompatible(match self.kind {
                LossKind::CrossEntropy => "cross entropy requires sigmoid outputs",
                LossKind::Pairwise => "pairwise error requires tanh outputs",
            }))
        }
    }

    /// Whether the loss is defined for `y`. Pairwise losses and the
    /// inverse-cardinality weight need both a relevant and an irrelevant
    /// label.
    pub fn accepts(&self, y: &LabelSet) -> bool {
        match (self.kind, self.weighting) {
            (LossKind::CrossEntropy, LabelWeighting::Unit) => true,
            _ => y.has_pairs(),
        }
    }

    fn weight(&self, y: &LabelSet) -> f64 {
        match self.weighting {
            LabelWeighting::Unit => 1.0,
            LabelWeighting::InverseCardinality => 1.0 / (y.len() * y.irrelevant_len()) as f64,
        }
    }

    /// Cost of outputs `o` against `y`, or `None` when `y` is not accepted.
    pub fn loss(&self, o: &[f64], y: &LabelSet) -> Option<f64> {
        if !self.accepts(y) {
            return None;
        }
        let raw = match self.kind {
            LossKind::CrossEntropy => loss_cross_entropy(o, y),
            LossKind::Pairwise => pairwise_sum(o, y),
        };
        Some(self.weight(y) * raw)
    }

    /// δ2 = ∂J/∂z2 for the trace's outputs, or `None` when `y` is not
    /// accepted.
    pub fn output_deltas(&self, trace: &ForwardTrace, y: &LabelSet) -> Option<Vec<f64>> {
        self.output_deltas_counted(trace, y, &mut OpCounter::default())
    }

    /// [`LossConfig::output_deltas`] with operation counting.
    ///
    /// Cross entropy costs O(L): with sigmoid outputs the delta collapses to
    /// `w (o_l - y_l)`. The pairwise error sums over the opposite side of
    /// every label, `|y| |ȳ|` terms per side.
    pub fn output_deltas_counted(
        &self,
        trace: &ForwardTrace,
        y: &LabelSet,
        ops: &mut OpCounter,
    ) -> Option<Vec<f64>> {
        if !self.accepts(y) {
            return None;
        }
        let w = self.weight(y);
        let o = &trace.o;
        let deltas = match self.kind {
            LossKind::CrossEntropy => {
                let target = y.to_indicator();
                o.iter()
                    .zip(target)
                    .map(|(&o, t)| {
                        ops.add(2);
                        w * (o - if t { 1.0 } else { 0.0 })
                    })
                    .collect()
            }
            LossKind::Pairwise => {
                let relevant = y.relevant();
                let irrelevant: Vec<usize> = y.irrelevant().collect();
                let mut deltas = alloc::vec![0.0; o.len()];
                for &p in relevant {
                    let mut s = 0.0;
                    for &n in &irrelevant {
                        ops.add(3);
                        s += libm::exp(-(o[p] - o[n]));
                    }
                    deltas[p] = -s;
                }
                for &n in &irrelevant {
                    let mut s = 0.0;
                    for &p in relevant {
                        ops.add(3);
                        s += libm::exp(-(o[p] - o[n]));
                    }
                    deltas[n] = s;
                }
                for (l, d) in deltas.iter_mut().enumerate() {
                    ops.add(2);
                    *d *= w * trace.output_act.derivative(trace.z2[l], o[l]);
                }
                deltas
            }
        };
        Some(deltas)
    }
}

/// `-Σ_l [y_l ln o_l + (1 - y_l) ln(1 - o_l)]` with `o` clamped away from
/// 0 and 1.
pub fn loss_cross_entropy(o: &[f64], y: &LabelSet) -> f64 {
    let target = y.to_indicator();
    -o.iter()
        .zip(target)
        .map(|(&o, t)| {
            let o = o.clamp(CE_CLAMP, 1.0 - CE_CLAMP);
            if t {
                libm::log(o)
            } else {
                libm::log(1.0 - o)
            }
        })
        .sum::<f64>()
}

/// `(1 / (|y| |ȳ|)) Σ_{(p, n) ∈ y × ȳ} exp(-(o_p - o_n))`, or `None` when
/// `y` is empty or full.
pub fn loss_pairwise(o: &[f64], y: &LabelSet) -> Option<f64> {
    y.has_pairs()
        .then(|| pairwise_sum(o, y) / (y.len() * y.irrelevant_len()) as f64)
}

fn pairwise_sum(o: &[f64], y: &LabelSet) -> f64 {
    let irrelevant: Vec<usize> = y.irrelevant().collect();
    y.relevant()
        .iter()
        .map(|&p| {
            irrelevant
                .iter()
                .map(|&n| libm::exp(-(o[p] - o[n])))
                .sum::<f64>()
        })
        .sum()
}

#[inline]
fn ln_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -libm::log1p(libm::exp(-z))
    } else {
        z - libm::log1p(libm::exp(z))
    }
}

/// Cross entropy of one label evaluated from its logit:
/// `-(y ln σ(z) + (1 - y) ln σ(-z))`, using `1 - σ(z) = σ(-z)`.
pub fn cross_entropy_from_logit(z: f64, relevant: bool) -> f64 {
    if relevant {
        -ln_sigmoid(z)
    } else {
        -ln_sigmoid(-z)
    }
}

/// Logistic loss `ln(1 + exp(-ẏ z))` with `ẏ ∈ {-1, 1}`.
pub fn log_loss(z: f64, signed_target: f64) -> f64 {
    let m = -signed_target * z;
    // ln(1 + e^m) = max(m, 0) + ln(1 + e^{-|m|})
    m.max(0.0) + libm::log1p(libm::exp(-libm::fabs(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ys(l: usize, rel: &[usize]) -> LabelSet {
        LabelSet::new(l, rel.to_vec()).unwrap()
    }

    #[test]
    fn cross_entropy_values() {
        let v = loss_cross_entropy(&[0.5], &ys(1, &[0]));
        assert!((v - core::f64::consts::LN_2).abs() < 1e-15);
        let eps = 1e-9;
        let v = loss_cross_entropy(&[1.0 - eps, eps], &ys(2, &[0]));
        assert!((v - 2.0 * eps).abs() < 1e-12);
        // saturated outputs stay finite
        assert!(loss_cross_entropy(&[0.0, 1.0], &ys(2, &[0])).is_finite());
    }

    #[test]
    fn pairwise_values() {
        assert_eq!(loss_pairwise(&[0.3, 0.3], &ys(2, &[0])), Some(1.0));
        let far = loss_pairwise(&[40.0, -40.0], &ys(2, &[0])).unwrap();
        assert!(far < 1e-30);
        assert_eq!(loss_pairwise(&[0.1, 0.2], &ys(2, &[])), None);
        assert_eq!(loss_pairwise(&[0.1, 0.2], &ys(2, &[0, 1])), None);
    }

    #[test]
    fn pairwise_matches_pair_enumeration() {
        let o = [0.31, -0.72, 0.05, 0.64];
        let y = ys(4, &[1, 3]);
        let mut brute = 0.0;
        let mut pairs = 0;
        for p in 0..4 {
            for n in 0..4 {
                if y.contains(p) && !y.contains(n) {
                    brute += libm::exp(-(o[p] - o[n]));
                    pairs += 1;
                }
            }
        }
        let v = loss_pairwise(&o, &y).unwrap();
        assert!((v - brute / pairs as f64).abs() < 1e-15);
    }

    #[test]
    fn pairing_with_output_activation() {
        assert!(LossConfig::cross_entropy()
            .check_output(Activation::Sigmoid)
            .is_ok());
        assert!(LossConfig::cross_entropy()
            .check_output(Activation::Tanh)
            .is_err());
        assert!(LossConfig::pairwise()
            .check_output(Activation::Tanh)
            .is_ok());
        assert!(LossConfig::pairwise()
            .check_output(Activation::Sigmoid)
            .is_err());
    }

    #[test]
    fn degenerate_labels_are_rejected_by_pairwise_only() {
        let empty = ys(3, &[]);
        assert!(LossConfig::cross_entropy()
            .loss(&[0.5; 3], &empty)
            .is_some());
        assert!(LossConfig::pairwise().loss(&[0.0; 3], &empty).is_none());
        let ce_weighted = LossConfig {
            kind: LossKind::CrossEntropy,
            weighting: LabelWeighting::InverseCardinality,
        };
        assert!(ce_weighted.loss(&[0.5; 3], &ys(3, &[0, 1, 2])).is_none());
        let v = ce_weighted.loss(&[0.5; 3], &ys(3, &[0])).unwrap();
        assert!((v - 3.0 * core::f64::consts::LN_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn logit_forms_agree() {
        for &z in &[-30.0, -2.5, 0.0, 0.7, 15.0] {
            for (rel, sy) in [(true, 1.0), (false, -1.0)] {
                let a = cross_entropy_from_logit(z, rel);
                let b = log_loss(z, sy);
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!((log_loss(800.0, -1.0) - 800.0).abs() < 1e-12);
    }
}
