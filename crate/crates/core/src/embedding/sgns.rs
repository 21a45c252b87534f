//! Negative-sampling loss for one (center, context) pair.
//!
//! With hidden vector `h` (mean of the center unit's input rows), positive
//! output row `o⁺` and negative rows `o⁻ᵢ`:
//!
//! ```text
//! L = -log σ(o⁺·h) - Σᵢ log σ(-o⁻ᵢ·h)
//! ```
//!
//! Generic over the float type so the trainer can run in `f32` while the
//! gradient check runs in `f64`.

use num_traits::Float;

/// `log σ(x)` without overflow for large `|x|`.
pub fn log_sigmoid<T: Float>(x: T) -> T {
    let zero = T::zero();
    let softplus_neg = (-x).max(zero) + (-(x.abs())).exp().ln_1p();
    -softplus_neg
}

pub fn sigmoid<T: Float>(x: T) -> T {
    let one = T::one();
    if x >= T::zero() {
        one / (one + (-x).exp())
    } else {
        let e = x.exp();
        e / (one + e)
    }
}

fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Loss of one pair. `outputs` is row-major, one row per entry of `labels`.
pub fn pair_loss<T: Float>(hidden: &[T], outputs: &[T], labels: &[bool]) -> T {
    let dim = hidden.len();
    labels
        .iter()
        .zip(outputs.chunks_exact(dim))
        .fold(T::zero(), |acc, (&label, row)| {
            let s = dot(row, hidden);
            acc - if label { log_sigmoid(s) } else { log_sigmoid(-s) }
        })
}

/// Loss and its gradient with respect to `hidden` and every output row.
///
/// `grad_hidden` and `grad_outputs` are overwritten.
pub fn pair_gradient<T: Float>(
    hidden: &[T],
    outputs: &[T],
    labels: &[bool],
    grad_hidden: &mut [T],
    grad_outputs: &mut [T],
) -> T {
    let dim = hidden.len();
    grad_hidden.iter_mut().for_each(|g| *g = T::zero());
    let mut loss = T::zero();
    for ((&label, row), grow) in labels
        .iter()
        .zip(outputs.chunks_exact(dim))
        .zip(grad_outputs.chunks_exact_mut(dim))
    {
        let s = dot(row, hidden);
        let y = if label { T::one() } else { T::zero() };
        loss = loss - if label { log_sigmoid(s) } else { log_sigmoid(-s) };
        // dL/ds = σ(s) - y
        let coef = sigmoid(s) - y;
        for ((gh, &o), (go, &h)) in grad_hidden
            .iter_mut()
            .zip(row)
            .zip(grow.iter_mut().zip(hidden))
        {
            *gh = *gh + coef * o;
            *go = coef * h;
        }
    }
    loss
}
