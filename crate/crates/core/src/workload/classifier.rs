//! Multinomial logistic regression: the local model each device trains.
//!
//! Parameters are laid out as a `classes x dim` weight matrix (row-major)
//! followed by `classes` biases.

use rand::seq::SliceRandom;
use rand::Rng;

use super::dataset::SyntheticDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub parameters: Vec<f64>,
    pub dim: usize,
    pub classes: usize,
    pub step_size: f64,
}

impl ModelState {
    pub fn zeros(dim: usize, classes: usize, step_size: f64) -> Self {
        Self {
            parameters: vec![0.0; param_count(dim, classes)],
            dim,
            classes,
            step_size,
        }
    }
}

pub fn param_count(dim: usize, classes: usize) -> usize {
    dim * classes + classes
}

fn logits(params: &[f64], dim: usize, classes: usize, x: &[f64], out: &mut [f64]) {
    let bias = &params[dim * classes..];
    for c in 0..classes {
        let w = &params[c * dim..(c + 1) * dim];
        out[c] = bias[c] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Turns logits into probabilities in place and returns log-sum-exp.
fn softmax_in_place(z: &mut [f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
    max + sum.ln()
}

/// Mean cross-entropy over `rows` of `data` and its gradient.
pub fn loss_and_gradient(
    params: &[f64],
    data: &SyntheticDataset,
    rows: &[usize],
) -> (f64, Vec<f64>) {
    let (dim, classes) = (data.dim, data.classes);
    let mut grad = vec![0.0; params.len()];
    let mut z = vec![0.0; classes];
    let mut loss = 0.0;
    for &i in rows {
        let x = data.row(i);
        let y = data.labels[i];
        logits(params, dim, classes, x, &mut z);
        let logit_y = z[y];
        let lse = softmax_in_place(&mut z);
        loss += lse - logit_y;
        z[y] -= 1.0;
        for c in 0..classes {
            let g = z[c];
            for (gw, xv) in grad[c * dim..(c + 1) * dim].iter_mut().zip(x) {
                *gw += g * xv;
            }
            grad[dim * classes + c] += g;
        }
    }
    let n = rows.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

/// Runs `epochs` passes of mini-batch gradient descent over `shard`,
/// reshuffling the batches every epoch.
pub fn client_update<R: Rng + ?Sized>(
    model: &ModelState,
    data: &SyntheticDataset,
    shard: &[usize],
    epochs: u32,
    batch_size: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if shard.is_empty() {
        return Err(Error::Empty("client shard"));
    }
    if model.parameters.len() != param_count(data.dim, data.classes) {
        return Err(Error::LengthMismatch {
            expected: param_count(data.dim, data.classes),
            got: model.parameters.len(),
        });
    }
    let mut params = model.parameters.clone();
    let mut order = shard.to_vec();
    for _ in 0..epochs {
        order.shuffle(rng);
        for batch in order.chunks(batch_size.max(1)) {
            let (_, grad) = loss_and_gradient(&params, data, batch);
            if grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Divergence("non-finite gradient in local update".into()));
            }
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= model.step_size * g;
            }
        }
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::Divergence("non-finite parameters after local update".into()));
    }
    Ok(params)
}

/// Sample-size weighted mean of the participants' parameters.
pub fn aggregate(updates: &[(Vec<f64>, usize)]) -> Result<Vec<f64>> {
    let first = updates.first().ok_or(Error::Empty("aggregation input"))?;
    let len = first.0.len();
    let total: usize = updates.iter().map(|(_, n)| n).sum();
    if total == 0 {
        return Err(Error::Empty("aggregation weights"));
    }
    let mut out = vec![0.0; len];
    for (params, n) in updates {
        if params.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: params.len(),
            });
        }
        let p = *n as f64 / total as f64;
        for (o, v) in out.iter_mut().zip(params) {
            *o += p * v;
        }
    }
    // The weighted sum of identical vectors can drift by an ulp; keep them exact.
    if updates.iter().all(|(p, _)| p == &first.0) {
        out.copy_from_slice(&first.0);
    }
    Ok(out)
}

/// Mean cross-entropy and top-1 accuracy over a held-out set.
pub fn evaluate(params: &[f64], data: &SyntheticDataset) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation split"));
    }
    let (dim, classes) = (data.dim, data.classes);
    let mut z = vec![0.0; classes];
    let mut loss = 0.0;
    let mut correct = 0usize;
    for i in 0..data.len() {
        logits(params, dim, classes, data.row(i), &mut z);
        let y = data.labels[i];
        let pred = z
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c)
            .unwrap_or(0);
        if pred == y {
            correct += 1;
        }
        let logit_y = z[y];
        loss += softmax_in_place(&mut z) - logit_y;
    }
    Ok((loss / data.len() as f64, correct as f64 / data.len() as f64))
}
