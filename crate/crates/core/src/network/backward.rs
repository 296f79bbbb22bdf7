use alloc::vec::Vec;

use super::{forward, Activation, Block, Dims, Dropout, ForwardTrace, LossConfig, NetworkParams};
use crate::data::{LabelSet, SparseVector};
use crate::Result;

/// Gradient of W1 restricted to the input features that were nonzero.
/// Column `k` holds the F partial derivatives for feature `indices[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumns {
    hidden: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseColumns {
    pub fn new(hidden: usize) -> Self {
        Self {
            hidden,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.chunks_exact(self.hidden))
    }

    pub fn column(&self, input: usize) -> Option<&[f64]> {
        let k = self.indices.binary_search(&input).ok()?;
        Some(&self.values[k * self.hidden..(k + 1) * self.hidden])
    }

    fn values(&self) -> &[f64] {
        &self.values
    }

    /// Adds `other` column-wise, merging the sorted index lists.
    fn add(&mut self, other: &SparseColumns) {
        let f = self.hidden;
        let mut indices = Vec::with_capacity(self.indices.len() + other.indices.len());
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        let (mut a, mut b) = (0, 0);
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(usize::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(usize::MAX);
            if ia < ib {
                indices.push(ia);
                values.extend_from_slice(&self.values[a * f..(a + 1) * f]);
                a += 1;
            } else if ib < ia {
                indices.push(ib);
                values.extend_from_slice(&other.values[b * f..(b + 1) * f]);
                b += 1;
            } else {
                indices.push(ia);
                values.extend(
                    self.values[a * f..(a + 1) * f]
                        .iter()
                        .zip(&other.values[b * f..(b + 1) * f])
                        .map(|(x, y)| x + y),
                );
                a += 1;
                b += 1;
            }
        }
        self.indices = indices;
        self.values = values;
    }
}

/// ∇Θ J, shaped like [`NetworkParams`] except that W1 is sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    dims: Dims,
    pub w1: SparseColumns,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Gradients {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            w1: SparseColumns::new(dims.hidden),
            b1: alloc::vec![0.0; dims.hidden],
            w2: alloc::vec![0.0; dims.labels * dims.hidden],
            b2: alloc::vec![0.0; dims.labels],
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn accumulate(&mut self, other: &Gradients) {
        debug_assert_eq!(self.dims, other.dims);
        self.w1.add(&other.w1);
        for (a, b) in [
            (&mut self.b1, &other.b1),
            (&mut self.w2, &other.w2),
            (&mut self.b2, &other.b2),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self
            .w1
            .values
            .iter_mut()
            .chain(&mut self.b1)
            .chain(&mut self.w2)
            .chain(&mut self.b2)
        {
            *v *= factor;
        }
    }

    /// The gradient of `block` laid out exactly like
    /// [`NetworkParams::block`]; W1 is densified.
    pub fn dense(&self, block: Block) -> Vec<f64> {
        match block {
            Block::W1 => {
                let f = self.dims.hidden;
                let mut out = alloc::vec![0.0; self.dims.input * f];
                for (j, col) in self.w1.iter() {
                    out[j * f..(j + 1) * f].copy_from_slice(col);
                }
                out
            }
            Block::B1 => self.b1.clone(),
            Block::W2 => self.w2.clone(),
            Block::B2 => self.b2.clone(),
        }
    }

    /// The first block holding a NaN or infinity.
    pub fn non_finite_block(&self) -> Option<Block> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        [
            (Block::W1, self.w1.values()),
            (Block::B1, &self.b1[..]),
            (Block::W2, &self.w2[..]),
            (Block::B2, &self.b2[..]),
        ]
        .into_iter()
        .find(|(_, v)| !finite(v))
        .map(|(b, _)| b)
    }
}

/// Backpropagates output deltas δ2 = ∂J/∂z2 through the network.
///
/// Hidden deltas are `δ1 = (W2ᵀ δ2) ⊙ f_h'(z1)`, gated by the dropout mask
/// recorded in the trace, and only the W1 columns of nonzero inputs are
/// produced.
pub fn backward(
    params: &NetworkParams,
    x: &SparseVector,
    trace: &ForwardTrace,
    output_deltas: &[f64],
) -> Gradients {
    let dims = params.dims();
    let f = dims.hidden;
    let mut g = Gradients::zeros(dims);
    g.b2.copy_from_slice(output_deltas);
    let mut back = alloc::vec![0.0; f];
    for (l, &d) in output_deltas.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let row = &params.w2[l * f..(l + 1) * f];
        let grow = &mut g.w2[l * f..(l + 1) * f];
        for k in 0..f {
            grow[k] = d * trace.h[k];
            back[k] += d * row[k];
        }
    }
    for (k, b) in back.iter_mut().enumerate() {
        *b *= trace.hidden_gate(k);
    }
    g.w1.indices = x.indices().to_vec();
    g.w1.values = Vec::with_capacity(x.nnz() * f);
    for (_, v) in x.iter() {
        g.w1.values.extend(back.iter().map(|d| d * v));
    }
    g.b1 = back;
    g
}

/// Exact gradient of the unit-weighted cross entropy; the trace must come
/// from sigmoid outputs.
pub fn backward_cross_entropy(
    trace: &ForwardTrace,
    params: &NetworkParams,
    x: &SparseVector,
    y: &LabelSet,
) -> Gradients {
    let deltas = LossConfig::cross_entropy()
        .output_deltas(trace, y)
        .expect("cross entropy accepts every label set");
    backward(params, x, trace, &deltas)
}

/// Exact gradient of the pairwise error; `None` for empty or full label
/// sets. The trace must come from tanh outputs.
pub fn backward_pairwise(
    trace: &ForwardTrace,
    params: &NetworkParams,
    x: &SparseVector,
    y: &LabelSet,
) -> Option<Gradients> {
    let deltas = LossConfig::pairwise().output_deltas(trace, y)?;
    Some(backward(params, x, trace, &deltas))
}

/// Forward pass, cost and gradient for one example. `Ok(None)` when the
/// loss is undefined for `y`.
pub fn loss_and_gradient(
    loss: &LossConfig,
    params: &NetworkParams,
    x: &SparseVector,
    y: &LabelSet,
    hidden_act: Activation,
    dropout: Option<Dropout>,
) -> Result<Option<(f64, Gradients)>> {
    let trace = forward(params, x, hidden_act, loss.output_activation(), dropout)?;
    let Some(deltas) = loss.output_deltas(&trace, y) else {
        return Ok(None);
    };
    let value = loss.loss(&trace.o, y).expect("accepted label set");
    Ok(Some((value, backward(params, x, &trace, &deltas))))
}
