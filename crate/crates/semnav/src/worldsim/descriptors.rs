//! Synthetic region descriptors standing in for pretrained CNN features.
//!
//! Each landmark owns a ground-truth unit vector confined to the first half
//! of the descriptor space; distractor regions (walls, floors, clutter) draw
//! from a pool of prototypes confined to the complementary half plus a small
//! full-space jitter. The split mirrors how real landmark features separate
//! from background texture and is what makes the landmark memory trainable
//! and calibratable.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::floorplan::FloorPlan;

/// Number of distractor prototypes.
const DISTRACTOR_POOL: usize = 32;
/// Full-space jitter mixed into distractor draws.
const DISTRACTOR_JITTER: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct DescriptorLibrary {
    dim: usize,
    seed: u64,
    landmarks: BTreeMap<u32, Vec<f64>>,
    pool: Vec<Vec<f64>>,
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1e-12 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn random_unit(rng: &mut impl Rng, dim: usize, lo: usize, hi: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    loop {
        for x in v[lo..hi].iter_mut() {
            *x = gauss(rng);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            return v;
        }
    }
}

/// Standard normal via Box-Muller; keeps rand's API surface minimal.
pub(crate) fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

impl DescriptorLibrary {
    /// Deterministic library for a set of landmark ids.
    pub fn new(landmark_ids: impl IntoIterator<Item = u32>, dim: usize, seed: u64) -> Self {
        assert!(dim >= 4, "descriptor dimension too small");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0xD15C);
        let half = dim / 2;
        let mut landmarks = BTreeMap::new();
        for id in landmark_ids {
            // Resample on near-duplicates so ground truth stays pairwise
            // distinct.
            let v = loop {
                let v = random_unit(&mut rng, dim, 0, half);
                let distinct = landmarks
                    .values()
                    .all(|u: &Vec<f64>| dot(u, &v) < 0.99);
                if distinct {
                    break v;
                }
            };
            landmarks.insert(id, v);
        }
        let pool = (0..DISTRACTOR_POOL)
            .map(|_| random_unit(&mut rng, dim, half, dim))
            .collect();
        DescriptorLibrary {
            dim,
            seed,
            landmarks,
            pool,
        }
    }

    /// Library covering every landmark of a plan.
    pub fn for_plan(plan: &FloorPlan, seed: u64) -> Self {
        Self::new(plan.landmarks.iter().map(|l| l.id), 64, seed)
    }

    pub fn with_dim(plan: &FloorPlan, dim: usize, seed: u64) -> Self {
        Self::new(plan.landmarks.iter().map(|l| l.id), dim, seed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn landmark_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.landmarks.keys().copied()
    }

    pub fn ground_truth(&self, id: u32) -> Option<&[f64]> {
        self.landmarks.get(&id).map(|v| v.as_slice())
    }

    /// A noisy observation of a landmark descriptor, renormalized.
    pub fn noisy_landmark(&self, id: u32, sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
        let mut v = self.landmarks[&id].clone();
        for x in v.iter_mut() {
            *x += sigma * gauss(rng);
        }
        normalize(&mut v);
        v
    }

    /// A fresh distractor region descriptor.
    pub fn distractor(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut v = self.pool[rng.gen_range(0..self.pool.len())].clone();
        for x in v.iter_mut() {
            *x += DISTRACTOR_JITTER * gauss(rng);
        }
        normalize(&mut v);
        v
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
