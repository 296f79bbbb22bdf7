#![allow(dead_code)]

use mlnn_core::data::{Dataset, Instance, LabelSet, SparseVector};
use mlnn_core::rng;
use rand::Rng;

/// Labels come from a fixed random linear teacher on `informative`
/// features; every label bit is then flipped with probability `noise`.
/// Each example also carries `nuisance` random features drawn from the
/// remaining dimensions, which a large network can use to memorize the
/// noisy labels.
#[derive(Debug, Clone, Copy)]
pub struct TeacherTask {
    pub dim: usize,
    pub labels: usize,
    pub informative: usize,
    pub nuisance: usize,
    pub noise: f64,
    pub teacher_seed: u64,
}

impl TeacherTask {
    pub fn sample(&self, m: usize, seed: u64) -> Dataset {
        let mut t = rng::seeded(self.teacher_seed);
        let w: Vec<Vec<f64>> = (0..self.labels)
            .map(|_| {
                (0..self.informative)
                    .map(|_| t.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let mut r = rng::seeded(seed);
        let instances = (0..m)
            .map(|_| {
                let mut entries: Vec<(usize, f64)> = (0..self.informative)
                    .map(|f| (f, r.gen_range(-1.0..1.0)))
                    .collect();
                for _ in 0..self.nuisance {
                    let f = r.gen_range(self.informative..self.dim);
                    if !entries.iter().any(|e| e.0 == f) {
                        entries.push((f, r.gen_range(0.5..1.5)));
                    }
                }
                let x_inf: Vec<f64> = entries[..self.informative].iter().map(|e| e.1).collect();
                let mut y = Vec::new();
                for (l, wl) in w.iter().enumerate() {
                    let s: f64 = wl.iter().zip(&x_inf).map(|(a, b)| a * b).sum();
                    let mut bit = s > 0.6;
                    if r.gen_bool(self.noise) {
                        bit = !bit;
                    }
                    if bit {
                        y.push(l);
                    }
                }
                Instance::new(
                    SparseVector::from_unsorted(self.dim, entries).unwrap(),
                    LabelSet::new(self.labels, y).unwrap(),
                )
            })
            .collect();
        Dataset::new(self.dim, self.labels, instances).unwrap()
    }
}

/// Two features, three labels, each label a half-plane through the origin,
/// so the task is linearly separable.
pub fn separable_task(m: usize, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let dirs: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let instances = (0..m)
        .map(|_| {
            let (a, b): (f64, f64) = loop {
                let p = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
                // keep a margin around every decision boundary
                if dirs.iter().all(|d| (d.0 * p.0 + d.1 * p.1).abs() > 0.1) {
                    break p;
                }
            };
            let y: Vec<usize> = dirs
                .iter()
                .enumerate()
                .filter(|(_, d)| d.0 * a + d.1 * b > 0.0)
                .map(|(l, _)| l)
                .collect();
            Instance::new(
                SparseVector::from_dense(&[a, b]).unwrap(),
                LabelSet::new(3, y).unwrap(),
            )
        })
        .collect();
    Dataset::new(2, 3, instances).unwrap()
}
