//! One-hidden-layer perceptron with a softmax output.
//!
//! Parameter layout: `w1` (features × hidden, row-major), `b1` (hidden),
//! `w2` (hidden × classes, row-major), `b2` (classes).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{softmax_in_place, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Shape {
    pub features: usize,
    pub hidden: usize,
    pub classes: usize,
}

impl Shape {
    pub fn n_params(&self) -> usize {
        self.features * self.hidden + self.hidden + self.hidden * self.classes + self.classes
    }

    /// Offsets of (w1, b1, w2, b2).
    fn offsets(&self) -> (usize, usize, usize, usize) {
        let b1 = self.features * self.hidden;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.hidden * self.classes;
        (0, b1, w2, b2)
    }

    pub fn split<'a>(&self, params: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64], &'a [f64]) {
        let (_, b1, w2, b2) = self.offsets();
        (
            &params[..b1],
            &params[b1..w2],
            &params[w2..b2],
            &params[b2..],
        )
    }
}

/// Weights uniform in ±sqrt(6 / (fan_in + fan_out)), biases zero.
pub(crate) fn init_params(shape: Shape, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut params = vec![0.0; shape.n_params()];
    let (_, b1, w2, b2) = shape.offsets();
    let limit1 = (6.0 / (shape.features + shape.hidden) as f64).sqrt();
    for p in &mut params[..b1] {
        *p = rng.gen_range(-limit1..limit1);
    }
    let limit2 = (6.0 / (shape.hidden + shape.classes) as f64).sqrt();
    for p in &mut params[w2..b2] {
        *p = rng.gen_range(-limit2..limit2);
    }
    params
}

struct Forward {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    probs: Vec<f64>,
}

fn forward(params: &[f64], shape: Shape, act: Activation, x: &[f64], f: &mut Forward) {
    let (w1, b1, w2, b2) = shape.split(params);
    f.pre.copy_from_slice(b1);
    for (i, &xi) in x.iter().enumerate() {
        if xi != 0.0 {
            let row = &w1[i * shape.hidden..(i + 1) * shape.hidden];
            for (p, w) in f.pre.iter_mut().zip(row) {
                *p += xi * w;
            }
        }
    }
    for (h, &z) in f.hidden.iter_mut().zip(&f.pre) {
        *h = act.apply(z);
    }
    f.probs.copy_from_slice(b2);
    for (j, &hj) in f.hidden.iter().enumerate() {
        let row = &w2[j * shape.classes..(j + 1) * shape.classes];
        for (p, w) in f.probs.iter_mut().zip(row) {
            *p += hj * w;
        }
    }
}

pub(crate) fn logits(params: &[f64], shape: Shape, act: Activation, x: &[f64], out: &mut [f64]) {
    let mut f = Forward {
        pre: vec![0.0; shape.hidden],
        hidden: vec![0.0; shape.hidden],
        probs: vec![0.0; shape.classes],
    };
    forward(params, shape, act, x, &mut f);
    out.copy_from_slice(&f.probs);
}

/// Mean softmax cross-entropy and its gradient via backpropagation.
pub(crate) fn loss_and_gradient(
    params: &[f64],
    shape: Shape,
    act: Activation,
    data: &Dataset,
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; params.len()];
    let (_, _, w2, _) = shape.split(params);
    let (o_w1, o_b1, o_w2, o_b2) = shape.offsets();
    let mut f = Forward {
        pre: vec![0.0; shape.hidden],
        hidden: vec![0.0; shape.hidden],
        probs: vec![0.0; shape.classes],
    };
    let mut delta_out = vec![0.0; shape.classes];
    let mut delta_hidden = vec![0.0; shape.hidden];
    let n = data.len() as f64;
    let mut loss = 0.0;

    for (x, &y) in data.rows().zip(data.labels()) {
        forward(params, shape, act, x, &mut f);
        softmax_in_place(&mut f.probs);
        loss -= f.probs[y].max(f64::MIN_POSITIVE).ln();

        for (c, d) in delta_out.iter_mut().enumerate() {
            *d = (f.probs[c] - if c == y { 1.0 } else { 0.0 }) / n;
        }
        for (c, d) in delta_out.iter().enumerate() {
            grad[o_b2 + c] += d;
        }
        for j in 0..shape.hidden {
            let hj = f.hidden[j];
            let row_w = &w2[j * shape.classes..(j + 1) * shape.classes];
            let row_g = &mut grad[o_w2 + j * shape.classes..o_w2 + (j + 1) * shape.classes];
            let mut back = 0.0;
            for c in 0..shape.classes {
                row_g[c] += hj * delta_out[c];
                back += row_w[c] * delta_out[c];
            }
            delta_hidden[j] = back * act.derivative(f.pre[j], hj);
        }
        for (j, d) in delta_hidden.iter().enumerate() {
            grad[o_b1 + j] += d;
        }
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                let row_g = &mut grad[o_w1 + i * shape.hidden..o_w1 + (i + 1) * shape.hidden];
                for (g, d) in row_g.iter_mut().zip(&delta_hidden) {
                    *g += xi * d;
                }
            }
        }
    }
    (loss / n, grad)
}
