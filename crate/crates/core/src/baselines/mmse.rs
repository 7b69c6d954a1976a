use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stbc::BitLinearModel;
use crate::Bit;

/// Linear MMSE estimate of the real symbol vector,
/// `(H'^T H' + (sigma2 / Es) I)^-1 H'^T y`.
///
/// Noise and symbol energy are both taken per real dimension
/// (`sigma2 / 2` and `Es / 2`), so the ratio equals the complex-model
/// `sigma2 / Es`.
pub fn mmse_estimate(model: &BitLinearModel) -> Result<DVector<f64>> {
    let hp = &model.h_prime;
    let n = hp.ncols();
    let reg = model.sigma2 / model.dims.es();
    let a = hp.transpose() * hp + DMatrix::identity(n, n) * reg;
    let rhs = hp.transpose() * &model.y;
    a.clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| a.lu().solve(&rhs))
        .ok_or(Error::IllConditioned("MMSE normal equations are singular"))
}

/// MMSE estimate sliced to the nearest PAM point and demapped to bits.
pub fn mmse_detect(model: &BitLinearModel) -> Result<Vec<Bit>> {
    let x = mmse_estimate(model)?;
    let q = model.dims.q;
    let top = ((1u64 << q) - 1) as f64;
    let mut bits = vec![0; x.len() * q];
    for (xi, chunk) in x.iter().zip(bits.chunks_mut(q)) {
        let level = ((xi + top) / 2.0).round().clamp(0.0, top) as u64;
        for (j, b) in chunk.iter_mut().enumerate() {
            *b = if (level >> j) & 1 == 1 { 1 } else { -1 };
        }
    }
    Ok(bits)
}
