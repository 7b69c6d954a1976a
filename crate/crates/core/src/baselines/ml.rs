use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::stbc::BitLinearModel;
use crate::Bit;

/// Largest bit vector searched exhaustively.
pub const ML_MAX_BITS: usize = 24;

/// Exhaustive maximum-likelihood detection over all `2^(2qk)` bit vectors.
///
/// Minimizes `b^T G b - 2 z^T b` with `G = H^T H`, `z = H^T y`, which
/// differs from `||y - H b||^2` by the constant `||y||^2`. Candidates are
/// walked in Gray-code order so each step flips one bit and updates the
/// metric in `O(bits)`. Ties go to the lexicographically smallest vector,
/// ordering `-1` before `+1` and bit 0 first.
pub fn ml_decode(model: &BitLinearModel) -> Result<Vec<Bit>> {
    let n = model.h.ncols();
    if n > ML_MAX_BITS {
        return Err(Error::InstanceTooLarge {
            bits: n,
            limit: ML_MAX_BITS,
        });
    }
    let gram = model.h.transpose() * &model.h;
    let z = model.h.transpose() * &model.y;

    let mut b = DVector::from_element(n, -1.0);
    // g = G b
    let mut gb = &gram * &b;
    let mut metric = b.dot(&gb) - 2.0 * z.dot(&b);
    let tol = 1e-9 * (1.0 + metric.abs());

    let mut best = b.clone();
    let mut best_metric = metric;
    for step in 1u64..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        let old = b[flip];
        let delta = -2.0 * old;
        // (b + delta e)^T G (b + delta e) - b^T G b = 2 delta (G b)_f + delta^2 G_ff
        metric += 2.0 * delta * gb[flip] + delta * delta * gram[(flip, flip)] - 2.0 * z[flip] * delta;
        b[flip] = -old;
        gb.axpy(delta, &gram.column(flip), 1.0);

        if metric < best_metric - tol
            || (metric <= best_metric + tol && lexicographically_less(&b, &best))
        {
            best_metric = metric.min(best_metric);
            best.copy_from(&b);
        }
    }
    Ok(best.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).collect())
}

fn lexicographically_less(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    false
}
