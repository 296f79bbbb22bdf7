use alloc::vec::Vec;

use rand::Rng;

use crate::rng;

/// Layer sizes: `input` features (D), `hidden` units (F), `labels` (L).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub input: usize,
    pub hidden: usize,
    pub labels: usize,
}

impl Dims {
    pub fn new(input: usize, hidden: usize, labels: usize) -> Self {
        Self {
            input,
            hidden,
            labels,
        }
    }

    pub fn block_len(&self, block: Block) -> usize {
        match block {
            Block::W1 => self.input * self.hidden,
            Block::B1 => self.hidden,
            Block::W2 => self.labels * self.hidden,
            Block::B2 => self.labels,
        }
    }

    pub fn param_count(&self) -> usize {
        Block::ALL.iter().map(|&b| self.block_len(b)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Block {
    W1,
    B1,
    W2,
    B2,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::W1, Block::B1, Block::W2, Block::B2];

    pub fn name(self) -> &'static str {
        match self {
            Block::W1 => "W1",
            Block::B1 => "b1",
            Block::W2 => "W2",
            Block::B2 => "b2",
        }
    }
}

/// Θ = {W1, b1, W2, b2}.
///
/// `W1` is stored input-major: the F weights fanning out of input feature
/// `j` are contiguous at `w1[j * F..(j + 1) * F]`, so a sparse input only
/// touches the columns of its nonzero features. `W2` is row-major L×F.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    dims: Dims,
    pub(crate) w1: Vec<f64>,
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Vec<f64>,
    pub(crate) b2: Vec<f64>,
}

impl NetworkParams {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            w1: alloc::vec![0.0; dims.block_len(Block::W1)],
            b1: alloc::vec![0.0; dims.hidden],
            w2: alloc::vec![0.0; dims.block_len(Block::W2)],
            b2: alloc::vec![0.0; dims.labels],
        }
    }

    /// Weights uniform in ±sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn init(dims: Dims, seed: u64) -> Self {
        let mut p = Self::zeros(dims);
        let mut rng = rng::seeded(seed);
        let b1 = libm::sqrt(6.0 / (dims.input + dims.hidden) as f64);
        for w in &mut p.w1 {
            *w = rng.gen_range(-b1..=b1);
        }
        let b2 = libm::sqrt(6.0 / (dims.hidden + dims.labels) as f64);
        for w in &mut p.w2 {
            *w = rng.gen_range(-b2..=b2);
        }
        p
    }

    /// Builds parameters from blocks laid out as described on the type.
    pub fn from_blocks(
        dims: Dims,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: Vec<f64>,
    ) -> crate::Result<Self> {
        let p = Self {
            dims,
            w1,
            b1,
            w2,
            b2,
        };
        for b in Block::ALL {
            let found = p.block(b).len();
            let expected = dims.block_len(b);
            if found != expected {
                return Err(crate::Error::DimensionMismatch {
                    what: b.name(),
                    expected,
                    found,
                });
            }
        }
        Ok(p)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn block(&self, block: Block) -> &[f64] {
        match block {
            Block::W1 => &self.w1,
            Block::B1 => &self.b1,
            Block::W2 => &self.w2,
            Block::B2 => &self.b2,
        }
    }

    pub fn block_mut(&mut self, block: Block) -> &mut [f64] {
        match block {
            Block::W1 => &mut self.w1,
            Block::B1 => &mut self.b1,
            Block::W2 => &mut self.w2,
            Block::B2 => &mut self.b2,
        }
    }

    /// W1[f][j]
    pub fn w1(&self, hidden: usize, input: usize) -> f64 {
        self.w1[input * self.dims.hidden + hidden]
    }

    pub fn set_w1(&mut self, hidden: usize, input: usize, value: f64) {
        self.w1[input * self.dims.hidden + hidden] = value;
    }

    /// W2[l][f]
    pub fn w2(&self, label: usize, hidden: usize) -> f64 {
        self.w2[label * self.dims.hidden + hidden]
    }

    pub fn set_w2(&mut self, label: usize, hidden: usize, value: f64) {
        self.w2[label * self.dims.hidden + hidden] = value;
    }

    pub(crate) fn w1_column(&self, input: usize) -> &[f64] {
        let f = self.dims.hidden;
        &self.w1[input * f..(input + 1) * f]
    }

    pub fn is_finite(&self) -> bool {
        Block::ALL
            .iter()
            .all(|&b| self.block(b).iter().all(|v| v.is_finite()))
    }
}
