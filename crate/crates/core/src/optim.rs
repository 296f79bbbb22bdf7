//! Parameter-update rules: plain SGD, SGD with momentum, and AdaGrad.
//!
//! All three rules skip parameters whose gradient is exactly zero, and W1
//! columns absent from a sparse gradient are never visited. For momentum
//! this means velocity is applied lazily: a parameter's velocity only moves
//! it on steps where that parameter receives a gradient.

use crate::network::{Block, Dims, Gradients, NetworkParams};
use crate::{Error, Result};

pub const ADAGRAD_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Sgd,
    Momentum,
    AdaGrad,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Momentum => "momentum",
            OptimizerKind::AdaGrad => "adagrad",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            OptimizerKind::Sgd,
            OptimizerKind::Momentum,
            OptimizerKind::AdaGrad,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    kind: OptimizerKind,
    eta0: f64,
    momentum: f64,
    epsilon: f64,
    /// Velocity (momentum) or accumulated squared gradients (AdaGrad).
    buffer: Option<NetworkParams>,
    step: u64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, eta0: f64, dims: Dims) -> Result<Self> {
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning rate must be positive and finite",
            ));
        }
        let buffer = match kind {
            OptimizerKind::Sgd => None,
            OptimizerKind::Momentum | OptimizerKind::AdaGrad => Some(NetworkParams::zeros(dims)),
        };
        Ok(Self {
            kind,
            eta0,
            momentum: 0.9,
            epsilon: ADAGRAD_EPSILON,
            buffer,
            step: 0,
        })
    }

    pub fn with_momentum(mut self, coeff: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&coeff) {
            return Err(Error::InvalidConfig(
                "momentum coefficient must lie in [0, 1)",
            ));
        }
        self.momentum = coeff;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidConfig("epsilon must be nonnegative"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// Number of completed updates τ.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// The accumulated squared gradients, AdaGrad only.
    pub fn grad_sq_accum(&self, block: Block) -> Option<&[f64]> {
        match self.kind {
            OptimizerKind::AdaGrad => self.buffer.as_ref().map(|b| b.block(block)),
            _ => None,
        }
    }

    pub fn velocity(&self, block: Block) -> Option<&[f64]> {
        match self.kind {
            OptimizerKind::Momentum => self.buffer.as_ref().map(|b| b.block(block)),
            _ => None,
        }
    }

    /// The learning rate the next update would apply to a parameter,
    /// `η0 / (sqrt(Σ g²) + ε)` for AdaGrad and `η0` otherwise. An untouched
    /// AdaGrad dimension reports `η0 / ε`.
    pub fn effective_rate(&self, block: Block, index: usize) -> f64 {
        match (self.kind, &self.buffer) {
            (OptimizerKind::AdaGrad, Some(acc)) => {
                self.eta0 / (libm::sqrt(acc.block(block)[index]) + self.epsilon)
            }
            _ => self.eta0,
        }
    }

    /// Applies one update. Nothing is modified if any gradient entry is
    /// non-finite.
    pub fn update(&mut self, params: &mut NetworkParams, grads: &Gradients) -> Result<()> {
        if params.dims() != grads.dims() {
            return Err(Error::DimensionMismatch {
                what: "gradient parameter count",
                expected: params.dims().param_count(),
                found: grads.dims().param_count(),
            });
        }
        if let Some(block) = grads.non_finite_block() {
            return Err(Error::NonFiniteGradient(block.name()));
        }
        let rule = Rule {
            kind: self.kind,
            eta0: self.eta0,
            momentum: self.momentum,
            epsilon: self.epsilon,
        };
        let hidden = params.dims().hidden;
        let mut dummy: [f64; 0] = [];
        for (j, col) in grads.w1.iter() {
            let range = j * hidden..(j + 1) * hidden;
            let buf = match self.buffer.as_mut() {
                Some(b) => &mut b.block_mut(Block::W1)[range.clone()],
                None => &mut dummy[..],
            };
            rule.apply(&mut params.block_mut(Block::W1)[range], col, buf);
        }
        for (block, g) in [
            (Block::B1, &grads.b1),
            (Block::W2, &grads.w2),
            (Block::B2, &grads.b2),
        ] {
            let buf = match self.buffer.as_mut() {
                Some(b) => b.block_mut(block),
                None => &mut dummy[..],
            };
            rule.apply(params.block_mut(block), g, buf);
        }
        self.step += 1;
        Ok(())
    }
}

struct Rule {
    kind: OptimizerKind,
    eta0: f64,
    momentum: f64,
    epsilon: f64,
}

impl Rule {
    #[inline]
    fn apply(&self, params: &mut [f64], grads: &[f64], buffer: &mut [f64]) {
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, &g) in params.iter_mut().zip(grads) {
                    if g != 0.0 {
                        *p -= self.eta0 * g;
                    }
                }
            }
            OptimizerKind::Momentum => {
                for ((p, &g), v) in params.iter_mut().zip(grads).zip(buffer) {
                    if g != 0.0 {
                        *v = self.momentum * *v - self.eta0 * g;
                        *p += *v;
                    }
                }
            }
            OptimizerKind::AdaGrad => {
                for ((p, &g), acc) in params.iter_mut().zip(grads).zip(buffer) {
                    if g != 0.0 {
                        *acc += g * g;
                        *p -= self.eta0 * g / (libm::sqrt(*acc) + self.epsilon);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LabelSet, SparseVector};
    use crate::network::{loss_and_gradient, Activation, LossConfig};
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::Rng;

    fn dims() -> Dims {
        Dims::new(1, 1, 1)
    }

    /// Gradient with value `g` on b2 only.
    fn bias_grad(g: f64) -> Gradients {
        let mut grads = Gradients::zeros(dims());
        grads.b2[0] = g;
        grads
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(OptimizerState::new(OptimizerKind::Sgd, 0.0, dims()).is_err());
        assert!(OptimizerState::new(OptimizerKind::Sgd, f64::NAN, dims()).is_err());
        let s = OptimizerState::new(OptimizerKind::Momentum, 0.1, dims()).unwrap();
        assert!(s.clone().with_momentum(1.0).is_err());
        assert!(s.with_momentum(-0.1).is_err());
    }

    #[test]
    fn sgd_step() {
        let mut s = OptimizerState::new(OptimizerKind::Sgd, 0.1, dims()).unwrap();
        let mut p = NetworkParams::zeros(dims());
        s.update(&mut p, &bias_grad(2.0)).unwrap();
        assert!((p.block(Block::B2)[0] + 0.2).abs() < 1e-15);
        assert_eq!(s.step(), 1);
    }

    #[test]
    fn adagrad_first_step_has_magnitude_eta0() {
        for g in [3.5, -0.02] {
            let mut s = OptimizerState::new(OptimizerKind::AdaGrad, 0.1, dims())
                .unwrap()
                .with_epsilon(0.0)
                .unwrap();
            let mut p = NetworkParams::zeros(dims());
            s.update(&mut p, &bias_grad(g)).unwrap();
            assert!((p.block(Block::B2)[0] + 0.1 * g.signum()).abs() < 1e-15);
        }
    }

    #[test]
    fn adagrad_constant_gradient_rate() {
        let g = 0.7;
        let mut s = OptimizerState::new(OptimizerKind::AdaGrad, 0.05, dims())
            .unwrap()
            .with_epsilon(0.0)
            .unwrap();
        let mut p = NetworkParams::zeros(dims());
        for tau in 1..=50u32 {
            s.update(&mut p, &bias_grad(g)).unwrap();
            let expected = 0.05 / (g * libm::sqrt(tau as f64));
            assert!((s.effective_rate(Block::B2, 0) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_zero_is_sgd() {
        let mut rng = crate::rng::seeded(4);
        let mut a = NetworkParams::init(Dims::new(3, 2, 2), 1);
        let mut b = a.clone();
        let mut sgd = OptimizerState::new(OptimizerKind::Sgd, 0.03, a.dims()).unwrap();
        let mut mom = OptimizerState::new(OptimizerKind::Momentum, 0.03, a.dims())
            .unwrap()
            .with_momentum(0.0)
            .unwrap();
        for _ in 0..20 {
            let x = SparseVector::from_dense(&[
                rng.gen_range(-1.0..1.0),
                0.0,
                rng.gen_range(-1.0..1.0),
            ])
            .unwrap();
            let y = LabelSet::new(2, vec![rng.gen_range(0..2)]).unwrap();
            let (_, g) = loss_and_gradient(
                &LossConfig::cross_entropy(),
                &a,
                &x,
                &y,
                Activation::Tanh,
                None,
            )
            .unwrap()
            .unwrap();
            sgd.update(&mut a, &g).unwrap();
            mom.update(&mut b, &g).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn momentum_accumulates_velocity() {
        let mut s = OptimizerState::new(OptimizerKind::Momentum, 0.1, dims())
            .unwrap()
            .with_momentum(0.5)
            .unwrap();
        let mut p = NetworkParams::zeros(dims());
        s.update(&mut p, &bias_grad(1.0)).unwrap();
        s.update(&mut p, &bias_grad(1.0)).unwrap();
        // v1 = -0.1, v2 = -0.05 - 0.1
        assert!((s.velocity(Block::B2).unwrap()[0] + 0.15).abs() < 1e-15);
        assert!((p.block(Block::B2)[0] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_finite_gradient_aborts_without_mutation() {
        for kind in [
            OptimizerKind::Sgd,
            OptimizerKind::Momentum,
            OptimizerKind::AdaGrad,
        ] {
            let mut s = OptimizerState::new(kind, 0.1, Dims::new(2, 2, 2)).unwrap();
            let mut p = NetworkParams::init(Dims::new(2, 2, 2), 3);
            let before = p.clone();
            let mut g = Gradients::zeros(p.dims());
            g.b1[0] = 1.0;
            g.w2[3] = f64::INFINITY;
            assert_eq!(s.update(&mut p, &g), Err(Error::NonFiniteGradient("W2")));
            assert_eq!(p, before);
            assert_eq!(s.step(), 0);
        }
    }

    #[test]
    fn zero_gradients_leave_parameters_untouched() {
        let d = Dims::new(6, 3, 2);
        let x = SparseVector::new(6, vec![(1, 0.5), (4, -1.0)]).unwrap();
        let y = LabelSet::new(2, vec![0]).unwrap();
        for kind in [
            OptimizerKind::Sgd,
            OptimizerKind::Momentum,
            OptimizerKind::AdaGrad,
        ] {
            let mut p = NetworkParams::init(d, 2);
            let mut s = OptimizerState::new(kind, 0.1, d).unwrap();
            for _ in 0..3 {
                let before = p.clone();
                let (_, g) = loss_and_gradient(
                    &LossConfig::cross_entropy(),
                    &p,
                    &x,
                    &y,
                    Activation::Relu,
                    None,
                )
                .unwrap()
                .unwrap();
                s.update(&mut p, &g).unwrap();
                for b in Block::ALL {
                    let dense = g.dense(b);
                    for (i, gi) in dense.iter().enumerate() {
                        if *gi == 0.0 {
                            assert_eq!(p.block(b)[i], before.block(b)[i], "{kind:?} {b:?}[{i}]");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn adagrad_rates_never_increase() {
        let d = Dims::new(4, 3, 2);
        let mut s = OptimizerState::new(OptimizerKind::AdaGrad, 0.1, d).unwrap();
        let mut p = NetworkParams::init(d, 9);
        let mut rng = crate::rng::seeded(1);
        let mut prev: Vec<f64> = (0..d.labels * d.hidden)
            .map(|i| s.effective_rate(Block::W2, i))
            .collect();
        let mut prev_acc = vec![0.0; d.labels * d.hidden];
        for _ in 0..30 {
            let x = SparseVector::from_dense(&[
                rng.gen_range(-1.0..1.0),
                0.0,
                0.3,
                rng.gen_range(-1.0..1.0),
            ])
            .unwrap();
            let y = LabelSet::new(2, vec![rng.gen_range(0..2)]).unwrap();
            let (_, g) = loss_and_gradient(
                &LossConfig::cross_entropy(),
                &p,
                &x,
                &y,
                Activation::Tanh,
                None,
            )
            .unwrap()
            .unwrap();
            s.update(&mut p, &g).unwrap();
            for i in 0..prev.len() {
                let r = s.effective_rate(Block::W2, i);
                assert!(r <= prev[i]);
                let acc = s.grad_sq_accum(Block::W2).unwrap()[i];
                assert!(acc >= prev_acc[i]);
                prev[i] = r;
                prev_acc[i] = acc;
            }
        }
    }
}
