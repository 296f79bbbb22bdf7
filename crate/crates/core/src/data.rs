//! Sparse instances, label sets and the dataset container.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::{rng, Error, Result};

/// A sparse real vector of fixed dimensionality.
///
/// Indices are strictly increasing and every stored value is nonzero and
/// finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds a vector from entries that must already be sorted by index.
    /// Zero values are dropped.
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut last: Option<usize> = None;
        for (index, value) in entries {
            if index >= dim {
                return Err(Error::FeatureOutOfRange { index, dim });
            }
            if let Some(prev) = last {
                if index == prev {
                    return Err(Error::DuplicateFeature(index));
                }
                if index < prev {
                    return Err(Error::UnsortedFeatures(index));
                }
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteFeature(index));
            }
            last = Some(index);
            if value != 0.0 {
                indices.push(index);
                values.push(value);
            }
        }
        Ok(Self {
            dim,
            indices,
            values,
        })
    }

    /// Like [`SparseVector::new`] but sorts the entries first. Duplicate
    /// indices are still rejected.
    pub fn from_unsorted(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        Self::new(dim, entries)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), values.iter().copied().enumerate().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    /// Inner product with a dense vector of the same dimension.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        debug_assert_eq!(dense.len(), self.dim);
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub(crate) fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// The relevant labels of one instance, out of `label_count` labels.
///
/// The irrelevant labels are the complement and are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    label_count: usize,
    relevant: Vec<usize>,
}

impl LabelSet {
    /// Sorts and deduplicates `relevant`.
    pub fn new(label_count: usize, mut relevant: Vec<usize>) -> Result<Self> {
        relevant.sort_unstable();
        relevant.dedup();
        if let Some(&label) = relevant.last() {
            if label >= label_count {
                return Err(Error::LabelOutOfRange { label, label_count });
            }
        }
        Ok(Self {
            label_count,
            relevant,
        })
    }

    pub fn from_indicator(indicator: &[bool]) -> Self {
        Self {
            label_count: indicator.len(),
            relevant: indicator
                .iter()
                .enumerate()
                .filter_map(|(l, &on)| on.then_some(l))
                .collect(),
        }
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn relevant(&self) -> &[usize] {
        &self.relevant
    }

    pub fn irrelevant(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.label_count).filter(move |l| !self.contains(*l))
    }

    pub fn contains(&self, label: usize) -> bool {
        self.relevant.binary_search(&label).is_ok()
    }

    /// |y|
    pub fn len(&self) -> usize {
        self.relevant.len()
    }

    /// |ȳ|
    pub fn irrelevant_len(&self) -> usize {
        self.label_count - self.relevant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relevant.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.relevant.len() == self.label_count
    }

    /// True when the set has at least one relevant and one irrelevant label,
    /// i.e. when pairwise quantities are defined.
    pub fn has_pairs(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn to_indicator(&self) -> Vec<bool> {
        let mut out = alloc::vec![false; self.label_count];
        for &l in &self.relevant {
            out[l] = true;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: SparseVector,
    pub labels: LabelSet,
}

impl Instance {
    pub fn new(features: SparseVector, labels: LabelSet) -> Self {
        Self { features, labels }
    }
}

/// An immutable, nonempty collection of instances sharing `dim` and
/// `label_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    label_count: usize,
    instances: Vec<Instance>,
}

impl Dataset {
    pub fn new(dim: usize, label_count: usize, instances: Vec<Instance>) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for inst in &instances {
            if inst.features.dim() != dim {
                return Err(Error::DimensionMismatch {
                    what: "feature dimension",
                    expected: dim,
                    found: inst.features.dim(),
                });
            }
            if inst.labels.label_count() != label_count {
                return Err(Error::DimensionMismatch {
                    what: "label count",
                    expected: label_count,
                    found: inst.labels.label_count(),
                });
            }
        }
        Ok(Self {
            dim,
            label_count,
            instances,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Instance> {
        self.instances.iter()
    }

    pub fn into_instances(self) -> Vec<Instance> {
        self.instances
    }

    /// Mean number of relevant labels per instance.
    pub fn label_cardinality(&self) -> f64 {
        let total: usize = self.instances.iter().map(|i| i.labels.len()).sum();
        total as f64 / self.instances.len() as f64
    }

    /// Randomly partitions the dataset into two nonempty parts, the first
    /// holding `round(fraction * M)` instances (clamped to `1..M`).
    ///
    /// The permutation is drawn from `seed`, so the result depends on the
    /// input order: the same seed applied to a reordered dataset may select
    /// different instances. Both outputs keep the input's relative order.
    pub fn split(&self, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidFraction(fraction));
        }
        let m = self.instances.len();
        if m < 2 {
            return Err(Error::TooSmallToSplit(m));
        }
        let first_len = (libm::round(fraction * m as f64) as usize).clamp(1, m - 1);
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng::seeded(seed));
        let mut in_first = alloc::vec![false; m];
        for &i in &order[..first_len] {
            in_first[i] = true;
        }
        let (mut a, mut b) = (
            Vec::with_capacity(first_len),
            Vec::with_capacity(m - first_len),
        );
        for (inst, first) in self.instances.iter().zip(in_first) {
            if first {
                a.push(inst.clone());
            } else {
                b.push(inst.clone());
            }
        }
        Ok((
            Dataset::new(self.dim, self.label_count, a)?,
            Dataset::new(self.dim, self.label_count, b)?,
        ))
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Instance;
    type IntoIter = core::slice::Iter<'a, Instance>;

    fn into_iter(self) -> Self::IntoIter {
        self.instances.iter()
    }
}
