use statrs::function::erf::erfc;

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Exact bit error rate of Gray-mapped square `M`-QAM on an AWGN channel at
/// symbol SNR `gamma = Es / N0` (linear).
///
/// Sums the per-bit-position error probabilities of each `sqrt(M)`-PAM
/// rail (Cho and Yoon, 2002).
pub fn siso_awgn_ber(order: usize, gamma: f64) -> f64 {
    let side = (order as f64).sqrt().round() as usize;
    assert!(side * side == order && side.is_power_of_two() && side >= 2, "square QAM required");
    let bits_per_rail = side.trailing_zeros() as usize;
    // distance scale: sqrt(3 gamma / (2 (M - 1)))
    let arg = (3.0 * gamma / (2.0 * (order as f64 - 1.0))).sqrt();
    let mut total = 0.0;
    for k in 1..=bits_per_rail {
        let pow = 1usize << (k - 1);
        let terms = ((1.0 - 1.0 / (1u64 << k) as f64) * side as f64) as usize;
        let mut pk = 0.0;
        for i in 0..terms {
            let sign = if (i * pow / side).is_multiple_of(2) { 1.0 } else { -1.0 };
            let weight = pow as f64 - ((i * pow) as f64 / side as f64 + 0.5).floor();
            pk += sign * weight * erfc((2 * i + 1) as f64 * arg);
        }
        total += pk / side as f64;
    }
    total / bits_per_rail as f64
}

/// SNR in dB at which [`siso_awgn_ber`] equals `target`, by bisection.
pub fn snr_db_for_ber(order: usize, target: f64) -> f64 {
    let (mut lo, mut hi) = (-20.0f64, 60.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if siso_awgn_ber(order, 10f64.powf(mid / 10.0)) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
