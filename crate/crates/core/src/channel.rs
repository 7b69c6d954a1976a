//! Flat block-fading MIMO channels and calibrated additive noise.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dims_mismatch, Error, Result};
use crate::CMatrix;

/// Fading law used to draw a channel matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    Iid,
    /// Exponentially correlated Kronecker model.
    Kronecker { rho_t: f64, rho_r: f64 },
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub hc: CMatrix,
    pub model: ChannelModel,
    /// Stream index of the generator that produced it, when known.
    pub stream: Option<u64>,
}

/// Average received SNR per receive antenna and the matching noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    pub gamma: f64,
    pub es: f64,
    pub nt: usize,
}

impl SnrSpec {
    pub fn new(gamma: f64, es: f64, nt: usize) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("SNR must be positive, got {gamma}"),
            });
        }
        Ok(Self { gamma, es, nt })
    }

    pub fn from_db(gamma_db: f64, es: f64, nt: usize) -> Result<Self> {
        Self::new(db_to_linear(gamma_db), es, nt)
    }

    /// `Nt Es / gamma`; zero in the noiseless limit.
    pub fn sigma2(&self) -> f64 {
        if self.gamma.is_infinite() {
            0.0
        } else {
            self.nt as f64 * self.es / self.gamma
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One `CN(0, variance)` draw.
pub fn complex_normal(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn iid_matrix(nr: usize, nt: usize, rng: &mut impl Rng) -> CMatrix {
    // column-major fill order is part of the reproducibility contract
    let mut m = CMatrix::zeros(nr, nt);
    for z in m.iter_mut() {
        *z = complex_normal(rng, 1.0);
    }
    m
}

pub fn sample_iid_channel(nr: usize, nt: usize, rng: &mut impl Rng) -> ChannelRealization {
    ChannelRealization {
        hc: iid_matrix(nr, nt, rng),
        model: ChannelModel::Iid,
        stream: None,
    }
}

/// `R[i][j] = rho^|i-j|`.
pub fn exponential_correlation(size: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

fn sqrt_psd(r: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(r);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::IllConditioned("correlation matrix is not positive definite"));
    }
    let sqrt_l = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(&eig.eigenvectors * sqrt_l * eig.eigenvectors.transpose())
}

/// Precomputed square roots of the transmit and receive correlation
/// matrices, `Hc = Rr^(1/2) W Rt^(1/2)`.
#[derive(Debug, Clone)]
pub struct KroneckerChannel {
    rho_t: f64,
    rho_r: f64,
    rx_sqrt: CMatrix,
    tx_sqrt: CMatrix,
}

impl KroneckerChannel {
    pub fn new(nr: usize, nt: usize, rho_t: f64, rho_r: f64) -> Result<Self> {
        for (name, rho) in [("rho_t", rho_t), ("rho_r", rho_r)] {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("correlation must lie in [0, 1), got {rho}"),
                });
            }
        }
        let to_c = |m: DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
        Ok(Self {
            rho_t,
            rho_r,
            rx_sqrt: to_c(sqrt_psd(exponential_correlation(nr, rho_r))?),
            tx_sqrt: to_c(sqrt_psd(exponential_correlation(nt, rho_t))?),
        })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> ChannelRealization {
        let w = iid_matrix(self.rx_sqrt.nrows(), self.tx_sqrt.nrows(), rng);
        ChannelRealization {
            hc: &self.rx_sqrt * w * &self.tx_sqrt,
            model: ChannelModel::Kronecker {
                rho_t: self.rho_t,
                rho_r: self.rho_r,
            },
            stream: None,
        }
    }
}

pub fn sample_correlated_channel(
    nr: usize,
    nt: usize,
    rho_t: f64,
    rho_r: f64,
    rng: &mut impl Rng,
) -> Result<ChannelRealization> {
    Ok(KroneckerChannel::new(nr, nt, rho_t, rho_r)?.sample(rng))
}

/// `Yc = Hc Xc + Nc` with `Nc` i.i.d. `CN(0, Nt Es / gamma)`.
pub fn apply_channel(
    xc: &CMatrix,
    hc: &CMatrix,
    snr: &SnrSpec,
    rng: &mut impl Rng,
) -> Result<CMatrix> {
    if hc.ncols() != xc.nrows() {
        return Err(dims_mismatch(
            "apply_channel",
            format!("{} rows in X", hc.ncols()),
            xc.nrows(),
        ));
    }
    let mut y = hc * xc;
    let sigma2 = snr.sigma2();
    if sigma2 > 0.0 {
        for z in y.iter_mut() {
            *z += complex_normal(rng, sigma2);
        }
    }
    Ok(y)
}
