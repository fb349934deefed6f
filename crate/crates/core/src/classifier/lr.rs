//! Multinomial logistic regression. Parameters are laid out as the
//! `classes × features` weight matrix (row-major) followed by the class biases.

use super::{softmax_in_place, Dataset};

pub(crate) fn n_params(features: usize, classes: usize) -> usize {
    classes * features + classes
}

pub(crate) fn logits(params: &[f64], features: usize, classes: usize, x: &[f64], out: &mut [f64]) {
    let (w, b) = params.split_at(classes * features);
    for c in 0..classes {
        let row = &w[c * features..(c + 1) * features];
        out[c] = b[c] + row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>();
    }
}

/// Mean softmax cross-entropy and its gradient.
pub(crate) fn loss_and_gradient(
    params: &[f64],
    features: usize,
    classes: usize,
    data: &Dataset,
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; params.len()];
    let mut probs = vec![0.0; classes];
    let n = data.len() as f64;
    let mut loss = 0.0;
    for (x, &y) in data.rows().zip(data.labels()) {
        logits(params, features, classes, x, &mut probs);
        softmax_in_place(&mut probs);
        loss -= probs[y].max(f64::MIN_POSITIVE).ln();
        let (gw, gb) = grad.split_at_mut(classes * features);
        for c in 0..classes {
            let delta = (probs[c] - if c == y { 1.0 } else { 0.0 }) / n;
            gb[c] += delta;
            let row = &mut gw[c * features..(c + 1) * features];
            for (g, &xi) in row.iter_mut().zip(x) {
                *g += delta * xi;
            }
        }
    }
    (loss / n, grad)
}
