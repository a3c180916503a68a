//! One negative-sampling example: loss, gradient and the in-place update
//! used by the trainer.
//!
//! An example has input rows `x_1..x_m` (one row for skip-gram, the window
//! for CBOW), their mean `h`, and output rows `y_j` with labels `t_j`
//! (one positive, the rest sampled negatives). The loss is
//! `Σ_j softplus(-s_j · h·y_j)` with `s_j = +1` for the positive and `-1`
//! otherwise.

use crate::linalg::Matrix;
use crate::scalar::{axpy, dot, Scalar};

/// Row-addressable storage for the trainer.
pub trait Rows<F> {
    fn row(&self, i: usize) -> &[F];
    fn row_mut(&mut self, i: usize) -> &mut [F];
}

impl<F: Scalar> Rows<F> for Matrix<F> {
    fn row(&self, i: usize) -> &[F] {
        Matrix::row(self, i)
    }
    fn row_mut(&mut self, i: usize) -> &mut [F] {
        Matrix::row_mut(self, i)
    }
}

/// Which matrices an update may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Freeze {
    pub target: bool,
    pub context: bool,
}

/// Stable `ln(1 + e^x)`.
#[inline]
fn softplus<F: Scalar>(x: F) -> F {
    x.max(F::zero()) + (-x.abs()).exp().ln_1p()
}

#[inline]
fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// Loss of one output term and its derivative with respect to the score.
#[inline]
fn term<F: Scalar>(score: F, positive: bool) -> (F, F) {
    if positive {
        (softplus(-score), sigmoid(score) - F::one())
    } else {
        (softplus(score), sigmoid(score))
    }
}

fn mean_row<F: Scalar>(rows: &[&[F]]) -> Vec<F> {
    let mut h = vec![F::zero(); rows[0].len()];
    for r in rows {
        axpy(F::one(), r, &mut h);
    }
    let m = F::from_usize_lossy(rows.len());
    h.iter_mut().for_each(|x| *x /= m);
    h
}

/// Loss of one example. `labels[j]` marks `outputs[j]` as the positive.
pub fn example_loss<F: Scalar>(inputs: &[&[F]], outputs: &[&[F]], labels: &[bool]) -> F {
    let h = mean_row(inputs);
    outputs
        .iter()
        .zip(labels)
        .map(|(y, &t)| term(dot(&h, y), t).0)
        .fold(F::zero(), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleGradient<F> {
    pub loss: F,
    pub inputs: Vec<Vec<F>>,
    pub outputs: Vec<Vec<F>>,
}

/// Closed-form gradient of [`example_loss`] with respect to every row.
pub fn example_gradient<F: Scalar>(inputs: &[&[F]], outputs: &[&[F]], labels: &[bool]) -> ExampleGradient<F> {
    let h = mean_row(inputs);
    let mut grad_h = vec![F::zero(); h.len()];
    let mut loss = F::zero();
    let mut grad_out = Vec::with_capacity(outputs.len());
    for (y, &t) in outputs.iter().zip(labels) {
        let (l, g) = term(dot(&h, y), t);
        loss += l;
        axpy(g, y, &mut grad_h);
        grad_out.push(h.iter().map(|&x| g * x).collect());
    }
    let m = F::from_usize_lossy(inputs.len());
    let per_input: Vec<F> = grad_h.iter().map(|&x| x / m).collect();
    ExampleGradient {
        loss,
        inputs: vec![per_input; inputs.len()],
        outputs: grad_out,
    }
}

/// One stochastic gradient step on an example, in place. Input rows come
/// from `input` (the target matrix), outputs from `output` (the context
/// matrix). `positive` is scored with label 1, each of `negatives` with 0.
/// `scratch` must hold `2 * dim` values. Returns the example loss before
/// the update.
#[allow(clippy::too_many_arguments)]
pub fn sgd_step<F: Scalar, I: Rows<F> + ?Sized, O: Rows<F> + ?Sized>(
    input: &mut I,
    output: &mut O,
    inputs: &[u32],
    positive: u32,
    negatives: &[u32],
    lr: F,
    freeze: Freeze,
    scratch: &mut [F],
) -> F {
    let dim = scratch.len() / 2;
    let (h, grad_h) = scratch.split_at_mut(dim);
    h.iter_mut().for_each(|x| *x = F::zero());
    grad_h.iter_mut().for_each(|x| *x = F::zero());
    for &i in inputs {
        axpy(F::one(), input.row(i as usize), h);
    }
    let m = F::from_usize_lossy(inputs.len());
    if inputs.len() > 1 {
        h.iter_mut().for_each(|x| *x /= m);
    }
    let mut loss = F::zero();
    let labelled = std::iter::once((positive, true)).chain(negatives.iter().map(|&n| (n, false)));
    for (j, t) in labelled {
        let y = output.row_mut(j as usize);
        let (l, g) = term(dot(h, y), t);
        loss += l;
        let step = -lr * g;
        axpy(step, y, grad_h);
        if !freeze.context {
            axpy(step, h, y);
        }
    }
    if !freeze.target {
        let scale = F::one() / m;
        for &i in inputs {
            axpy(scale, grad_h, input.row_mut(i as usize));
        }
    }
    loss
}
