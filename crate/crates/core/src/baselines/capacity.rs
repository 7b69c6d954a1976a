use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{db_to_linear, sample_iid_channel};
use crate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityQuery {
    pub nt: usize,
    pub nr: usize,
    pub gamma_db: f64,
    pub trials: usize,
    /// Rate for [`min_snr_for_rate`], bps/Hz.
    pub target_rate: f64,
}

/// `log2 det(I + (gamma / Nt) H H^H)` for one channel.
pub fn log_det_capacity(hc: &CMatrix, gamma: f64) -> f64 {
    let nr = hc.nrows();
    let nt = hc.ncols();
    let scale = Complex64::new(gamma / nt as f64, 0.0);
    let m = DMatrix::<Complex64>::identity(nr, nr) + hc * hc.adjoint() * scale;
    let chol = m.cholesky().expect("I + a H H^H is Hermitian positive definite");
    let l = chol.l_dirty();
    2.0 * (0..nr).map(|i| l[(i, i)].re.log2()).sum::<f64>()
}

/// Monte Carlo ergodic capacity of the i.i.d. Rayleigh channel, bps/Hz.
pub fn ergodic_capacity(query: &CapacityQuery, rng: &mut impl Rng) -> f64 {
    let trials = query.trials.max(1);
    let gamma = db_to_linear(query.gamma_db);
    (0..trials)
        .map(|_| log_det_capacity(&sample_iid_channel(query.nr, query.nt, rng).hc, gamma))
        .sum::<f64>()
        / trials as f64
}

/// Smallest SNR (dB) whose ergodic capacity reaches `query.target_rate`.
///
/// The same `query.trials` channel draws are reused at every bisection
/// step so the estimated capacity curve is monotone in SNR.
pub fn min_snr_for_rate(query: &CapacityQuery, rng: &mut impl Rng) -> f64 {
    let draws: Vec<CMatrix> = (0..query.trials.max(1))
        .map(|_| sample_iid_channel(query.nr, query.nt, rng).hc)
        .collect();
    let mean_cap = |db: f64| {
        let g = db_to_linear(db);
        draws.iter().map(|h| log_det_capacity(h, g)).sum::<f64>() / draws.len() as f64
    };
    let (mut lo, mut hi) = (-30.0f64, 80.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mean_cap(mid) < query.target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
