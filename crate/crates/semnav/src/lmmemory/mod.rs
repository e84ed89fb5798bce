//! Key-value landmark memory.
//!
//! The store holds `n x m` embedded landmark descriptors as keys (one value,
//! a place id, per landmark) behind two trainable linear maps: `F` embeds
//! keys, `W` embeds query regions. A query view of `R x R` region
//! descriptors is scored per landmark by the summed cosine similarity
//!
//! ```text
//! alpha_i = sum over regions l, sum over keys j of  cos(W q_l, F k_ij)
//! ```
//!
//! During training the scores pass through a softmax that appends a constant
//! unknown-class score `alpha_unk`; at detection time the softmax is
//! replaced by a hard maximum and `alpha_unk` acts as the acceptance
//! threshold.

pub mod checkpoint;
mod train;

pub use train::{train, Sample, TrainHyper, TrainReport};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use thiserror::Error;

use crate::places::PlaceId;
use crate::worldsim::DescriptorGrid;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MemoryError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degenerate embedding: key {landmark},{slot} has near-zero norm")]
    DegenerateEmbedding { landmark: usize, slot: usize },
    #[error("landmark values must be injective: {0} repeats")]
    DuplicateValue(PlaceId),
    #[error("training dataset is empty")]
    EmptyDataset,
}

/// Per-landmark scores of one query view.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub alpha: Vec<f64>,
    pub alpha_unk: f64,
}

impl ScoreVector {
    /// Softmax over `(alpha_1..alpha_n, alpha_unk)`.
    pub fn probabilities(&self) -> Vec<f64> {
        probabilities(&self.alpha, self.alpha_unk)
    }
}

/// Stable softmax over the landmark scores with the unknown score appended;
/// the result has length `n + 1` and sums to one.
pub fn probabilities(alpha: &[f64], alpha_unk: f64) -> Vec<f64> {
    let max = alpha
        .iter()
        .copied()
        .chain(std::iter::once(alpha_unk))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut exps: Vec<f64> = alpha.iter().map(|a| (a - max).exp()).collect();
    exps.push((alpha_unk - max).exp());
    let sum: f64 = exps.iter().sum();
    for e in exps.iter_mut() {
        *e /= sum;
    }
    exps
}

/// Detection outcome under the hard-maximum rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    Place(PlaceId),
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryStore {
    n: usize,
    m: usize,
    dim: usize,
    /// Key embedding map, D x D.
    f: Array2<f64>,
    /// Query embedding map, D x D.
    w: Array2<f64>,
    /// Raw descriptors, (n*m) x D, row `i*m + j`.
    raw: Array2<f64>,
    /// Embedded, renormalized keys, (n*m) x D.
    keys: Array2<f64>,
    /// Per-landmark sums of the m embedded keys, n x D.
    key_sums: Array2<f64>,
    values: Vec<PlaceId>,
    pub alpha_unk: f64,
}

impl MemoryStore {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[PlaceId] {
        &self.values
    }

    pub fn value(&self, landmark_index: usize) -> PlaceId {
        self.values[landmark_index]
    }

    pub fn f(&self) -> &Array2<f64> {
        &self.f
    }

    pub fn w(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn raw(&self) -> &Array2<f64> {
        &self.raw
    }

    pub fn keys(&self) -> &Array2<f64> {
        &self.keys
    }

    pub(crate) fn set_maps(&mut self, f: Array2<f64>, w: Array2<f64>) -> Result<(), MemoryError> {
        self.f = f;
        self.w = w;
        self.reembed()
    }

    /// Recompute keys from raw descriptors under the current `F`.
    pub(crate) fn reembed(&mut self) -> Result<(), MemoryError> {
        let mut keys = self.raw.dot(&self.f.t());
        for (row_idx, mut row) in keys.axis_iter_mut(Axis(0)).enumerate() {
            let norm = row.dot(&row).sqrt();
            if norm < 1e-12 {
                return Err(MemoryError::DegenerateEmbedding {
                    landmark: row_idx / self.m,
                    slot: row_idx % self.m,
                });
            }
            row.mapv_inplace(|x| x / norm);
        }
        let mut key_sums = Array2::zeros((self.n, self.dim));
        for i in 0..self.n {
            for j in 0..self.m {
                let key = keys.row(i * self.m + j);
                key_sums.row_mut(i).zip_mut_with(&key, |a, b| *a += b);
            }
        }
        self.keys = keys;
        self.key_sums = key_sums;
        Ok(())
    }

    /// Score a query view given as an `(R*R) x D` matrix of region
    /// descriptors: exactly the double sum of cosines, computed as
    /// normalized embedded queries dotted with per-landmark key sums.
    pub fn score(&self, view: &ArrayView2<f64>) -> Result<ScoreVector, MemoryError> {
        if view.ncols() != self.dim {
            return Err(MemoryError::ShapeMismatch(format!(
                "view descriptor dim {} != memory dim {}",
                view.ncols(),
                self.dim
            )));
        }
        let mut q = view.dot(&self.w.t());
        for mut row in q.axis_iter_mut(Axis(0)) {
            let norm = row.dot(&row).sqrt();
            if norm > 1e-12 {
                row.mapv_inplace(|x| x / norm);
            } else {
                // cos with a zero vector contributes nothing
                row.fill(0.0);
            }
        }
        let s: Array1<f64> = q.sum_axis(Axis(0));
        let alpha = self.key_sums.dot(&s);
        Ok(ScoreVector {
            alpha: alpha.to_vec(),
            alpha_unk: self.alpha_unk,
        })
    }

    pub fn score_grid(&self, grid: &DescriptorGrid) -> Result<ScoreVector, MemoryError> {
        let view = grid_view(grid);
        self.score(&view.view())
    }

    /// Hard-maximum detection: the best-scoring landmark's place when its
    /// score beats `alpha_unk`, ties broken toward the lowest index.
    pub fn detect(&self, view: &ArrayView2<f64>) -> Result<Detection, MemoryError> {
        let scores = self.score(view)?;
        let mut best = 0usize;
        for (i, &a) in scores.alpha.iter().enumerate() {
            if a > scores.alpha[best] {
                best = i;
            }
        }
        if scores.alpha.is_empty() || scores.alpha[best] <= self.alpha_unk {
            Ok(Detection::Unknown)
        } else {
            Ok(Detection::Place(self.values[best]))
        }
    }

    pub fn detect_grid(&self, grid: &DescriptorGrid) -> Result<Detection, MemoryError> {
        let view = grid_view(grid);
        self.detect(&view.view())
    }
}

/// Copy a descriptor grid into an `(R*R) x D` matrix.
pub fn grid_view(grid: &DescriptorGrid) -> Array2<f64> {
    let r2 = grid.r() * grid.r();
    Array2::from_shape_vec((r2, grid.dim()), grid.flat().to_vec())
        .expect("descriptor grid is dense row-major")
}

/// Build a memory store: keys are `normalize(F * descriptor)` for each of
/// the `n x m` raw descriptors.
pub fn build_memory(
    raw_descriptors: &[Vec<Vec<f64>>],
    values: Vec<PlaceId>,
    f: Array2<f64>,
    w: Array2<f64>,
    alpha_unk: f64,
) -> Result<MemoryStore, MemoryError> {
    let n = raw_descriptors.len();
    if n == 0 {
        return Err(MemoryError::ShapeMismatch("no landmarks".into()));
    }
    if values.len() != n {
        return Err(MemoryError::ShapeMismatch(format!(
            "{} values for {} landmarks",
            values.len(),
            n
        )));
    }
    let m = raw_descriptors[0].len();
    if m == 0 || raw_descriptors.iter().any(|lm| lm.len() != m) {
        return Err(MemoryError::ShapeMismatch(
            "every landmark needs exactly m descriptors".into(),
        ));
    }
    let dim = raw_descriptors[0][0].len();
    if raw_descriptors
        .iter()
        .flatten()
        .any(|d| d.len() != dim)
    {
        return Err(MemoryError::ShapeMismatch(
            "descriptor dimensions disagree".into(),
        ));
    }
    for (k, shape) in [("F", f.shape()), ("W", w.shape())] {
        if shape != [dim, dim] {
            return Err(MemoryError::ShapeMismatch(format!(
                "{k} must be {dim}x{dim}, got {shape:?}"
            )));
        }
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(MemoryError::DuplicateValue(*v));
        }
    }

    let mut raw = Array2::zeros((n * m, dim));
    for (i, lm) in raw_descriptors.iter().enumerate() {
        for (j, d) in lm.iter().enumerate() {
            raw.row_mut(i * m + j)
                .assign(&ArrayView1::from(d.as_slice()));
        }
    }
    let mut store = MemoryStore {
        n,
        m,
        dim,
        f,
        w,
        raw,
        keys: Array2::zeros((n * m, dim)),
        key_sums: Array2::zeros((n, dim)),
        values,
        alpha_unk,
    };
    store.reembed()?;
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eye(d: usize) -> Array2<f64> {
        Array2::eye(d)
    }

    fn unit(v: Vec<f64>) -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect()
    }

    #[test]
    fn identity_embedding_keeps_descriptor() {
        let d = unit(vec![1.0, 2.0, 2.0]);
        let store = build_memory(
            &[vec![d.clone()]],
            vec![PlaceId::Entrance(1)],
            eye(3),
            eye(3),
            0.0,
        )
        .unwrap();
        for (a, b) in store.keys().row(0).iter().zip(&d) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn full_size_store_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let raw: Vec<Vec<Vec<f64>>> = (0..80)
            .map(|_| {
                (0..4)
                    .map(|_| unit((0..64).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                    .collect()
            })
            .collect();
        let values: Vec<PlaceId> = (1..=80).map(PlaceId::Entrance).collect();
        let store = build_memory(&raw, values, eye(64), eye(64), 0.0).unwrap();
        assert_eq!(store.keys().nrows(), 320);
        assert_eq!(store.n(), 80);
        let distinct: std::collections::BTreeSet<_> = store.values().iter().collect();
        assert_eq!(distinct.len(), 80);
    }

    #[test]
    fn zero_embedding_is_an_error() {
        let d = unit(vec![1.0, 0.0, 0.0]);
        let err = build_memory(
            &[vec![d]],
            vec![PlaceId::Entrance(1)],
            Array2::zeros((3, 3)),
            eye(3),
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, MemoryError::DegenerateEmbedding { .. }));
    }

    #[test]
    fn duplicate_values_rejected() {
        let d = unit(vec![1.0, 1.0, 0.0]);
        let err = build_memory(
            &[vec![d.clone()], vec![d]],
            vec![PlaceId::Entrance(1), PlaceId::Entrance(1)],
            eye(3),
            eye(3),
            0.0,
        )
        .unwrap_err();
        assert_eq!(err, MemoryError::DuplicateValue(PlaceId::Entrance(1)));
    }

    #[test]
    fn identical_unit_vectors_score_one() {
        let d = unit(vec![3.0, 4.0, 0.0]);
        let store = build_memory(
            &[vec![d.clone()]],
            vec![PlaceId::Entrance(1)],
            eye(3),
            eye(3),
            0.0,
        )
        .unwrap();
        let view = Array2::from_shape_vec((1, 3), d).unwrap();
        let scores = store.score(&view.view()).unwrap();
        assert!((scores.alpha[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_regions_score_zero() {
        let store = build_memory(
            &[vec![vec![1.0, 0.0, 0.0]], vec![vec![0.0, 1.0, 0.0]]],
            vec![PlaceId::Entrance(1), PlaceId::Entrance(2)],
            eye(3),
            eye(3),
            0.0,
        )
        .unwrap();
        let view = Array2::from_shape_vec((1, 3), vec![0.0, 0.0, 1.0]).unwrap();
        let scores = store.score(&view.view()).unwrap();
        assert!(scores.alpha.iter().all(|a| a.abs() < 1e-12));
    }

    /// Scalar-loop oracle: the double sum written exactly as in the formula.
    fn brute_force_alpha(store: &MemoryStore, view: &Array2<f64>) -> Vec<f64> {
        let cos = |a: ArrayView1<f64>, b: ArrayView1<f64>| -> f64 {
            let na = a.dot(&a).sqrt();
            let nb = b.dot(&b).sqrt();
            if na < 1e-12 || nb < 1e-12 {
                0.0
            } else {
                a.dot(&b) / (na * nb)
            }
        };
        (0..store.n())
            .map(|i| {
                let mut alpha = 0.0;
                for l in 0..view.nrows() {
                    let q = store.w().dot(&view.row(l));
                    for j in 0..store.m() {
                        let k = store.f().dot(&store.raw().row(i * store.m() + j));
                        alpha += cos(q.view(), k.view());
                    }
                }
                alpha
            })
            .collect()
    }

    #[test]
    fn vectorized_score_matches_scalar_double_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let (n, m, r, d) = (
                rng.gen_range(1..=4usize),
                rng.gen_range(1..=3usize),
                rng.gen_range(1..=3usize),
                rng.gen_range(2..=6usize),
            );
            let raw: Vec<Vec<Vec<f64>>> = (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| unit((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                        .collect()
                })
                .collect();
            let values: Vec<PlaceId> = (1..=n as u32).map(PlaceId::Entrance).collect();
            let f = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
            let w = Array2::from_shape_fn((d, d), |_| rng.gen_range(-1.0..1.0));
            let store = match build_memory(&raw, values, f, w, 0.0) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let view = Array2::from_shape_fn((r * r, d), |_| rng.gen_range(-1.0..1.0));
            let fast = store.score(&view.view()).unwrap().alpha;
            let slow = brute_force_alpha(&store, &view);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn probabilities_uniform_and_analytic() {
        let p = probabilities(&[0.0, 0.0], 0.0);
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        let p = probabilities(&[10.0, 0.0], 0.0);
        let expect = 10f64.exp() / (10f64.exp() + 2.0);
        assert!((p[0] - expect).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_shift_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let alpha: Vec<f64> = (0..6).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let unk = rng.gen_range(-5.0..5.0);
            let c = rng.gen_range(-100.0..100.0);
            let shifted: Vec<f64> = alpha.iter().map(|a| a + c).collect();
            let p0 = probabilities(&alpha, unk);
            let p1 = probabilities(&shifted, unk + c);
            for (a, b) in p0.iter().zip(&p1) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn detect_picks_best_or_unknown() {
        let store = build_memory(
            &[vec![vec![1.0, 0.0, 0.0]], vec![vec![0.0, 1.0, 0.0]]],
            vec![PlaceId::Entrance(1), PlaceId::Entrance(2)],
            eye(3),
            eye(3),
            -1e6,
        )
        .unwrap();
        let view = Array2::from_shape_vec((1, 3), vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            store.detect(&view.view()).unwrap(),
            Detection::Place(PlaceId::Entrance(2))
        );
        // An unreachable threshold forces Unknown: |alpha_i| <= R^2 * m = 1.
        let mut high = store.clone();
        high.alpha_unk = 1.5;
        assert_eq!(high.detect(&view.view()).unwrap(), Detection::Unknown);
    }

    #[test]
    fn detect_tie_breaks_to_lowest_index() {
        // Two landmarks with identical descriptors tie exactly; the lower
        // index wins.
        let d = unit(vec![1.0, 1.0, 0.0]);
        let store = build_memory(
            &[vec![d.clone()], vec![d.clone()]],
            vec![PlaceId::Entrance(1), PlaceId::Entrance(2)],
            eye(3),
            eye(3),
            -10.0,
        )
        .unwrap();
        let view = Array2::from_shape_vec((1, 3), d).unwrap();
        assert_eq!(
            store.detect(&view.view()).unwrap(),
            Detection::Place(PlaceId::Entrance(1))
        );
    }

    #[test]
    fn detect_invariant_under_monotone_rescale() {
        // Scaling all raw scores by a positive factor (monotone transform of
        // alpha) cannot change the argmax; emulate by scaling W.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let raw: Vec<Vec<Vec<f64>>> = (0..5)
            .map(|_| vec![unit((0..8).map(|_| rng.gen_range(-1.0..1.0)).collect())])
            .collect();
        let values: Vec<PlaceId> = (1..=5).map(PlaceId::Entrance).collect();
        let store = build_memory(&raw, values.clone(), eye(8), eye(8), -1e9).unwrap();
        let view = Array2::from_shape_fn((4, 8), |_| rng.gen_range(-1.0..1.0));
        let base = store.detect(&view.view()).unwrap();
        // cos() is scale-invariant, so scaling W is a strictly monotone
        // no-op on every alpha; argmax must match.
        let scaled = build_memory(&raw, values, eye(8), eye(8) * 3.0, -1e9).unwrap();
        assert_eq!(scaled.detect(&view.view()).unwrap(), base);
    }

    #[test]
    fn alpha_bounded_by_regions_times_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let raw: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|_| {
                (0..2)
                    .map(|_| unit((0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                    .collect()
            })
            .collect();
        let values: Vec<PlaceId> = (1..=3).map(PlaceId::Entrance).collect();
        let store = build_memory(&raw, values, eye(6), eye(6), 0.0).unwrap();
        for _ in 0..50 {
            let r = rng.gen_range(1..=3usize);
            let view = Array2::from_shape_fn((r * r, 6), |_| rng.gen_range(-1.0..1.0));
            let scores = store.score(&view.view()).unwrap();
            let bound = (r * r) as f64 * store.m() as f64 + 1e-9;
            for a in &scores.alpha {
                assert!(a.abs() <= bound);
            }
        }
    }

    #[test]
    fn score_rejects_wrong_dim() {
        let store = build_memory(
            &[vec![vec![1.0, 0.0, 0.0]]],
            vec![PlaceId::Entrance(1)],
            eye(3),
            eye(3),
            0.0,
        )
        .unwrap();
        let view = array![[1.0, 0.0]];
        assert!(matches!(
            store.score(&view.view()),
            Err(MemoryError::ShapeMismatch(_))
        ));
    }
}
