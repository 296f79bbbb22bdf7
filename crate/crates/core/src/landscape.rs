//! Two-parameter slices of the cost surface of a toy network.
//!
//! The toy network has a scalar input, one hidden unit and four outputs.
//! Only the input-to-hidden weight and the weight from the hidden unit to
//! output 0 vary; the other three hidden-to-output weights are fixed to a
//! constant `c` and all biases are zero.

use alloc::vec::Vec;

use crate::data::{LabelSet, SparseVector};
use crate::network::{forward, Activation, Dims, LossConfig, NetworkParams};
use crate::{Error, Result};

pub const OUTPUTS: usize = 4;

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::EmptyRange);
        }
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::InvalidConfig("grid range needs finite lo <= hi"));
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.steps <= 1 {
            0.0
        } else {
            (self.hi - self.lo) / (self.steps - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub x: f64,
    pub y: LabelSet,
    pub c: f64,
}

impl Default for Fixture {
    /// Input 1, only output 0 relevant, `c = 0`.
    fn default() -> Self {
        Self {
            x: 1.0,
            y: LabelSet::new(OUTPUTS, alloc::vec![0]).expect("label 0 < 4"),
            c: 0.0,
        }
    }
}

/// Cost values over a `w1 × w2` grid, row-major in `w1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub w1: GridRange,
    pub w2: GridRange,
    pub cost: Vec<f64>,
}

impl LandscapeGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.w2.steps + j]
    }

    /// `(w1, w2, cost)` triples in row-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.w1.steps).flat_map(move |i| {
            (0..self.w2.steps).map(move |j| (self.w1.value(i), self.w2.value(j), self.at(i, j)))
        })
    }

    pub fn min(&self) -> f64 {
        self.cost.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Interior cells whose central-difference partial derivatives are both
    /// below `grad_tol` in magnitude while the cost exceeds the grid minimum
    /// by more than `excess`.
    pub fn plateau_cells(&self, grad_tol: f64, excess: f64) -> Vec<(usize, usize)> {
        let (n1, n2) = (self.w1.steps, self.w2.steps);
        if n1 < 3 || n2 < 3 {
            return Vec::new();
        }
        let (h1, h2) = (self.w1.spacing(), self.w2.spacing());
        let floor = self.min() + excess;
        let mut out = Vec::new();
        for i in 1..n1 - 1 {
            for j in 1..n2 - 1 {
                let d1 = (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * h1);
                let d2 = (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * h2);
                if d1.abs() < grad_tol && d2.abs() < grad_tol && self.at(i, j) > floor {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Cost `J(w1, w2)` of the toy network at one point.
pub fn cost_at(
    w1: f64,
    w2: f64,
    loss: LossConfig,
    hidden_act: Activation,
    fixture: &Fixture,
) -> Result<f64> {
    if fixture.y.label_count() != OUTPUTS {
        return Err(Error::DimensionMismatch {
            what: "landscape fixture labels",
            expected: OUTPUTS,
            found: fixture.y.label_count(),
        });
    }
    let mut p = NetworkParams::zeros(Dims::new(1, 1, OUTPUTS));
    p.set_w1(0, 0, w1);
    p.set_w2(0, 0, w2);
    for l in 1..OUTPUTS {
        p.set_w2(l, 0, fixture.c);
    }
    let x = SparseVector::from_dense(&[fixture.x])?;
    let trace = forward(&p, &x, hidden_act, loss.output_activation(), None)?;
    loss.loss(&trace.o, &fixture.y).ok_or(Error::Incompatible(
        "loss undefined for the fixture's label set",
    ))
}

pub fn landscape_grid(
    w1: GridRange,
    w2: GridRange,
    loss: LossConfig,
    hidden_act: Activation,
    fixture: &Fixture,
) -> Result<LandscapeGrid> {
    let w1 = GridRange::new(w1.lo, w1.hi, w1.steps)?;
    let w2 = GridRange::new(w2.lo, w2.hi, w2.steps)?;
    let mut cost = Vec::with_capacity(w1.steps * w2.steps);
    for i in 0..w1.steps {
        for j in 0..w2.steps {
            cost.push(cost_at(
                w1.value(i),
                w2.value(j),
                loss,
                hidden_act,
                fixture,
            )?);
        }
    }
    Ok(LandscapeGrid { w1, w2, cost })
}
