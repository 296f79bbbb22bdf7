use alloc::vec::Vec;

use rand::Rng;

use super::{Activation, NetworkParams};
use crate::data::SparseVector;
use crate::{rng, Error, Result};

/// Training-mode dropout on the hidden layer. The keep mask is drawn from
/// `seed`, so a given (rate, seed) pair always drops the same units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dropout {
    pub rate: f64,
    pub seed: u64,
}

impl Dropout {
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidConfig("dropout rate must lie in [0, 1)"));
        }
        Ok(Self { rate, seed })
    }

    pub fn mask(&self, hidden: usize) -> Vec<bool> {
        let mut rng = rng::seeded(self.seed);
        (0..hidden).map(|_| rng.gen::<f64>() >= self.rate).collect()
    }

    /// Survivors are scaled by 1 / (1 - rate) so inference needs no
    /// rescaling.
    pub fn scale(&self) -> f64 {
        1.0 / (1.0 - self.rate)
    }
}

/// Activations recorded by [`forward`] for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub z1: Vec<f64>,
    pub h: Vec<f64>,
    pub z2: Vec<f64>,
    pub o: Vec<f64>,
    pub hidden_act: Activation,
    pub output_act: Activation,
    /// Keep mask and survivor scale when dropout was applied.
    pub dropout: Option<(Vec<bool>, f64)>,
}

impl ForwardTrace {
    /// dh_f / dz1_f, including the dropout gate.
    pub(crate) fn hidden_gate(&self, f: usize) -> f64 {
        let d = self
            .hidden_act
            .derivative(self.z1[f], self.hidden_act.apply(self.z1[f]));
        match &self.dropout {
            Some((keep, scale)) => {
                if keep[f] {
                    d * scale
                } else {
                    0.0
                }
            }
            None => d,
        }
    }
}

/// Computes z1 = W1 x + b1, h = f_h(z1), z2 = W2 h + b2, o = f_o(z2).
/// With `dropout = None` the pass runs in inference mode.
pub fn forward(
    params: &NetworkParams,
    x: &SparseVector,
    hidden_act: Activation,
    output_act: Activation,
    dropout: Option<Dropout>,
) -> Result<ForwardTrace> {
    let dims = params.dims();
    if x.dim() != dims.input {
        return Err(Error::DimensionMismatch {
            what: "input dimension",
            expected: dims.input,
            found: x.dim(),
        });
    }
    let mut z1 = params.b1.clone();
    for (j, v) in x.iter() {
        for (z, w) in z1.iter_mut().zip(params.w1_column(j)) {
            *z += w * v;
        }
    }
    let mut h: Vec<f64> = z1.iter().map(|&z| hidden_act.apply(z)).collect();
    let dropout = match dropout {
        Some(d) => {
            let d = Dropout::new(d.rate, d.seed)?;
            let keep = d.mask(dims.hidden);
            let scale = d.scale();
            for (a, &k) in h.iter_mut().zip(&keep) {
                *a = if k { *a * scale } else { 0.0 };
            }
            Some((keep, scale))
        }
        None => None,
    };
    let z2: Vec<f64> = params
        .w2
        .chunks_exact(dims.hidden.max(1))
        .take(dims.labels)
        .zip(&params.b2)
        .map(|(row, b)| b + row.iter().zip(&h).map(|(w, a)| w * a).sum::<f64>())
        .collect();
    let o = z2.iter().map(|&z| output_act.apply(z)).collect();
    Ok(ForwardTrace {
        z1,
        h,
        z2,
        o,
        hidden_act,
        output_act,
        dropout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Dims;
    use alloc::vec;

    #[test]
    fn zero_params_give_midpoint_outputs() {
        let p = NetworkParams::zeros(Dims::new(3, 4, 5));
        let x = SparseVector::new(3, vec![(0, 1.0), (2, -2.0)]).unwrap();
        let t = forward(&p, &x, Activation::Relu, Activation::Sigmoid, None).unwrap();
        assert!(t.o.iter().all(|&o| o == 0.5));
        let t = forward(&p, &x, Activation::Relu, Activation::Tanh, None).unwrap();
        assert!(t.o.iter().all(|&o| o == 0.0));
    }

    #[test]
    fn relu_hidden_layer() {
        let mut p = NetworkParams::zeros(Dims::new(1, 2, 1));
        p.set_w1(0, 0, -1.0);
        p.set_w1(1, 0, 2.0);
        let x = SparseVector::new(1, vec![(0, 1.0)]).unwrap();
        let t = forward(&p, &x, Activation::Relu, Activation::Sigmoid, None).unwrap();
        assert_eq!(t.z1, vec![-1.0, 2.0]);
        assert_eq!(t.h, vec![0.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let p = NetworkParams::zeros(Dims::new(3, 2, 2));
        let x = SparseVector::empty(4);
        assert!(matches!(
            forward(&p, &x, Activation::Relu, Activation::Sigmoid, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dropout_zeroes_and_rescales() {
        let p = NetworkParams::init(Dims::new(4, 64, 3), 3);
        let x = SparseVector::from_dense(&[0.5, -0.2, 0.1, 0.9]).unwrap();
        let plain = forward(&p, &x, Activation::Tanh, Activation::Sigmoid, None).unwrap();
        let d = Dropout::new(0.5, 77).unwrap();
        let t = forward(&p, &x, Activation::Tanh, Activation::Sigmoid, Some(d)).unwrap();
        let (keep, scale) = t.dropout.as_ref().unwrap();
        assert_eq!(*scale, 2.0);
        assert!(keep.iter().any(|k| !k) && keep.iter().any(|&k| k));
        for (f, &kept) in keep.iter().enumerate() {
            if kept {
                assert_eq!(t.h[f], plain.h[f] * 2.0);
            } else {
                assert_eq!(t.h[f], 0.0);
            }
        }
        assert_eq!(
            t,
            forward(&p, &x, Activation::Tanh, Activation::Sigmoid, Some(d)).unwrap()
        );
        assert!(Dropout::new(1.0, 0).is_err());
        assert!(Dropout::new(-0.1, 0).is_err());
    }
}
