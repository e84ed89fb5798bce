//! Gradient training of the two embedding maps.
//!
//! Cross-entropy of the softmax-with-unknown probabilities against labeled
//! views, minimized over `F` and `W` with Adam (the usual moment defaults),
//! analytic gradients through the cosine normalizations. Keys are
//! re-embedded from the raw descriptors after every `F` update.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{MemoryError, MemoryStore};

/// One labeled training view: `label` is the landmark index, or `None` for
/// the unknown class.
#[derive(Debug, Clone)]
pub struct Sample {
    pub view: Array2<f64>,
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainHyper {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        TrainHyper {
            learning_rate: 1e-4,
            batch_size: 256,
            epochs: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean cross-entropy per epoch, evaluated as the epoch runs.
    pub epoch_losses: Vec<f64>,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

struct Adam {
    m: Array2<f64>,
    v: Array2<f64>,
    t: u64,
}

impl Adam {
    fn new(dim: usize) -> Adam {
        Adam {
            m: Array2::zeros((dim, dim)),
            v: Array2::zeros((dim, dim)),
            t: 0,
        }
    }

    fn step(&mut self, param: &mut Array2<f64>, grad: &Array2<f64>, lr: f64) {
        self.t += 1;
        self.m.zip_mut_with(grad, |m, g| *m = BETA1 * *m + (1.0 - BETA1) * g);
        self.v
            .zip_mut_with(grad, |v, g| *v = BETA2 * *v + (1.0 - BETA2) * g * g);
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        ndarray::Zip::from(param)
            .and(&self.m)
            .and(&self.v)
            .for_each(|p, &m, &v| {
                let mhat = m / bc1;
                let vhat = v / bc2;
                *p -= lr * mhat / (vhat.sqrt() + ADAM_EPS);
            });
    }
}

/// Per-sample loss and gradients with respect to `W` and `F`.
///
/// Forward: `alpha_i = kbar_i . s` with `s = sum_l normalize(W q_l)` and
/// `kbar_i = sum_j normalize(F k_ij)`; loss is the cross-entropy of the
/// softmax over `(alpha, alpha_unk)` against the label.
pub(crate) fn loss_and_grads(
    store: &MemoryStore,
    view: &ArrayView2<f64>,
    label: Option<usize>,
) -> Result<(f64, Array2<f64>, Array2<f64>), MemoryError> {
    let dim = store.dim();
    let n = store.n();
    let m = store.m();

    // Forward pass, keeping normalization intermediates.
    let u = view.dot(&store.w().t()); // (R^2) x D embedded queries
    let mut q_hat = u.clone();
    let mut u_norms = Vec::with_capacity(u.nrows());
    for mut row in q_hat.axis_iter_mut(Axis(0)) {
        let norm = row.dot(&row).sqrt();
        u_norms.push(norm);
        if norm > 1e-12 {
            row.mapv_inplace(|x| x / norm);
        } else {
            row.fill(0.0);
        }
    }
    let s: Array1<f64> = q_hat.sum_axis(Axis(0));
    // keys() are already the normalized embeddings under the current F.
    let alpha: Vec<f64> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| store.keys().row(i * m + j).dot(&s))
                .sum::<f64>()
        })
        .collect();
    let probs = super::probabilities(&alpha, store.alpha_unk);
    let target = label.unwrap_or(n);
    let loss = -(probs[target].max(1e-300)).ln();

    // dL/dalpha_i for the landmark entries (alpha_unk is constant).
    let g_alpha: Vec<f64> = (0..n)
        .map(|i| probs[i] - if target == i { 1.0 } else { 0.0 })
        .collect();

    // dL/ds = sum_i g_i kbar_i.
    let mut g_s = Array1::<f64>::zeros(dim);
    for i in 0..n {
        for j in 0..m {
            g_s.scaled_add(g_alpha[i], &store.keys().row(i * m + j));
        }
    }

    // dL/dW = sum_l [(g_s - (qhat_l . g_s) qhat_l) / |u_l|] outer q_l.
    let mut g_w = Array2::<f64>::zeros((dim, dim));
    for (l, q_l) in view.axis_iter(Axis(0)).enumerate() {
        let norm = u_norms[l];
        if norm <= 1e-12 {
            continue;
        }
        let qh = q_hat.row(l);
        let coeff = qh.dot(&g_s);
        // du = (g_s - coeff * qh) / norm
        for a in 0..dim {
            let du_a = (g_s[a] - coeff * qh[a]) / norm;
            if du_a != 0.0 {
                for b in 0..dim {
                    g_w[[a, b]] += du_a * q_l[b];
                }
            }
        }
    }

    // dL/dF = sum_ij g_i [(s - (khat_ij . s) khat_ij) / |v_ij|] outer r_ij.
    let mut g_f = Array2::<f64>::zeros((dim, dim));
    for i in 0..n {
        if g_alpha[i] == 0.0 {
            continue;
        }
        for j in 0..m {
            let r_ij = store.raw().row(i * m + j);
            let v = store.f().dot(&r_ij);
            let norm = v.dot(&v).sqrt();
            if norm <= 1e-12 {
                continue;
            }
            let kh = store.keys().row(i * m + j);
            let coeff = kh.dot(&s);
            for a in 0..dim {
                let dv_a = g_alpha[i] * (s[a] - coeff * kh[a]) / norm;
                if dv_a != 0.0 {
                    for b in 0..dim {
                        g_f[[a, b]] += dv_a * r_ij[b];
                    }
                }
            }
        }
    }

    Ok((loss, g_w, g_f))
}

/// Train `F` and `W` on the labeled dataset; keys are re-embedded after
/// every batch update. Returns per-epoch mean losses.
pub fn train(
    store: &mut MemoryStore,
    dataset: &[Sample],
    hyper: &TrainHyper,
) -> Result<TrainReport, MemoryError> {
    if dataset.is_empty() {
        return Err(MemoryError::EmptyDataset);
    }
    for (i, sample) in dataset.iter().enumerate() {
        if sample.view.ncols() != store.dim() {
            return Err(MemoryError::ShapeMismatch(format!(
                "sample {i} descriptor dim {} != memory dim {}",
                sample.view.ncols(),
                store.dim()
            )));
        }
        if let Some(label) = sample.label {
            if label >= store.n() {
                return Err(MemoryError::ShapeMismatch(format!(
                    "sample {i} label {label} out of range"
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut adam_w = Adam::new(store.dim());
    let mut adam_f = Adam::new(store.dim());
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut epoch_losses = Vec::with_capacity(hyper.epochs);

    for _ in 0..hyper.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(hyper.batch_size.max(1)) {
            let mut g_w = Array2::<f64>::zeros((store.dim(), store.dim()));
            let mut g_f = Array2::<f64>::zeros((store.dim(), store.dim()));
            let mut batch_loss = 0.0;
            for &idx in batch {
                let sample = &dataset[idx];
                let (loss, sw, sf) = loss_and_grads(store, &sample.view.view(), sample.label)?;
                batch_loss += loss;
                g_w += &sw;
                g_f += &sf;
            }
            let scale = 1.0 / batch.len() as f64;
            g_w *= scale;
            g_f *= scale;
            epoch_loss += batch_loss;

            if hyper.learning_rate != 0.0 {
                let mut w = store.w().clone();
                let mut f = store.f().clone();
                adam_w.step(&mut w, &g_w, hyper.learning_rate);
                adam_f.step(&mut f, &g_f, hyper.learning_rate);
                store.set_maps(f, w)?;
            }
        }
        epoch_losses.push(epoch_loss / dataset.len() as f64);
    }

    Ok(TrainReport { epoch_losses })
}
