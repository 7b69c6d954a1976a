//! Training-based channel estimation and the iterative decode/re-estimate
//! loop.
//!
//! A frame is one `Nt x Nt` pilot followed by `Nd` data code matrices, all
//! seen through the same channel. The pilot alone gives a first MMSE
//! estimate; later rounds re-encode the hard data decisions and use them as
//! extra pilot columns.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dims_mismatch, Error, Result};
use crate::pda::{decode, PdaConfig};
use crate::stbc::{
    bits_to_symbol_vector, linearize, realify_received, QamSpec, StbcCode,
};
use crate::{Bit, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    /// Data code matrices per frame.
    pub nd: usize,
    pub nt: usize,
    /// Decode/estimate rounds; 1 means pilot-only estimation.
    pub est_iters: usize,
}

impl FrameConfig {
    pub fn new(nd: usize, nt: usize, est_iters: usize) -> Result<Self> {
        if nd == 0 {
            return Err(Error::InvalidParameter {
                name: "nd",
                reason: "a frame needs at least one data matrix".into(),
            });
        }
        if est_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "est_iters",
                reason: "at least one estimation round is required".into(),
            });
        }
        Ok(Self { nd, nt, est_iters })
    }

    /// Channel uses per frame, `(Nd + 1) Nt`.
    pub fn frame_length(&self) -> usize {
        (self.nd + 1) * self.nt
    }

    /// Fraction of channel uses carrying data.
    pub fn training_efficiency(&self) -> f64 {
        self.nd as f64 / (self.nd + 1) as f64
    }
}

/// `sqrt(Es) * exp(-j 2 pi a b / Nt)`: a scaled unitary DFT pilot with
/// `P P^H = Nt Es I`.
pub fn make_pilot(nt: usize, es: f64) -> CMatrix {
    let amp = es.sqrt();
    CMatrix::from_fn(nt, nt, |a, b| {
        Complex64::from_polar(amp, -2.0 * PI * ((a * b) % nt) as f64 / nt as f64)
    })
}

/// `Yp P^H (P P^H + sigma2 I)^-1` under a unit-variance i.i.d. prior.
pub fn mmse_channel_estimate(yp: &CMatrix, p: &CMatrix, sigma2: f64) -> Result<CMatrix> {
    if yp.ncols() != p.ncols() {
        return Err(dims_mismatch("mmse_channel_estimate", p.ncols(), yp.ncols()));
    }
    let nt = p.nrows();
    let gram = p * p.adjoint() + CMatrix::identity(nt, nt) * Complex64::new(sigma2, 0.0);
    let lu = gram.lu();
    // H^ = Yp P^H G^-1  <=>  G^H H^^H = P Yp^H, G Hermitian
    let rhs = p * yp.adjoint();
    let sol = lu
        .solve(&rhs)
        .ok_or(Error::IllConditioned("pilot Gram matrix is singular"))?;
    Ok(sol.adjoint())
}

/// Received signals of one frame.
#[derive(Debug, Clone)]
pub struct FrameSignals {
    pub pilot: CMatrix,
    pub y_pilot: CMatrix,
    pub y_data: Vec<CMatrix>,
    /// Complex noise variance.
    pub sigma2: f64,
}

#[derive(Debug, Clone)]
pub struct FrameDecision {
    /// Hard bits per data matrix.
    pub bits: Vec<Vec<Bit>>,
    /// Channel estimate used for the final decode.
    pub channel_estimate: CMatrix,
}

/// Pilot-only estimate, PDA decode, then `est_iters - 1` rounds of
/// re-estimation from pilot plus re-encoded decisions.
pub fn iterative_decode_estimate(
    frame: &FrameSignals,
    code: &StbcCode,
    qam: &QamSpec,
    config: &FrameConfig,
    pda: &PdaConfig,
) -> Result<FrameDecision> {
    if config.est_iters == 0 {
        return Err(Error::InvalidParameter {
            name: "est_iters",
            reason: "at least one estimation round is required".into(),
        });
    }
    if frame.y_data.len() != config.nd {
        return Err(dims_mismatch("frame data matrices", config.nd, frame.y_data.len()));
    }
    let mut h_est = mmse_channel_estimate(&frame.y_pilot, &frame.pilot, frame.sigma2)?;
    let mut bits = decode_all(frame, &h_est, code, qam, pda)?;

    for _ in 1..config.est_iters {
        let nt = frame.pilot.nrows();
        let cols = frame.pilot.ncols() + frame.y_data.iter().map(|y| y.ncols()).sum::<usize>();
        let mut p_ext = CMatrix::zeros(nt, cols);
        let mut y_ext = CMatrix::zeros(frame.y_pilot.nrows(), cols);
        p_ext.columns_mut(0, frame.pilot.ncols()).copy_from(&frame.pilot);
        y_ext.columns_mut(0, frame.y_pilot.ncols()).copy_from(&frame.y_pilot);
        let mut at = frame.pilot.ncols();
        for (b, y) in bits.iter().zip(&frame.y_data) {
            let x = code.encode(&bits_to_symbol_vector(b, qam)?)?;
            p_ext.columns_mut(at, x.ncols()).copy_from(&x);
            y_ext.columns_mut(at, y.ncols()).copy_from(y);
            at += x.ncols();
        }
        h_est = mmse_channel_estimate(&y_ext, &p_ext, frame.sigma2)?;
        bits = decode_all(frame, &h_est, code, qam, pda)?;
    }
    Ok(FrameDecision {
        bits,
        channel_estimate: h_est,
    })
}

fn decode_all(
    frame: &FrameSignals,
    h_est: &CMatrix,
    code: &StbcCode,
    qam: &QamSpec,
    pda: &PdaConfig,
) -> Result<Vec<Vec<Bit>>> {
    let eff = linearize(h_est, code, qam)?;
    frame
        .y_data
        .iter()
        .map(|y| {
            let model = eff.model(realify_received(y), frame.sigma2)?;
            Ok(decode(&model, pda)?.hard_bits)
        })
        .collect()
}

/// Real-valued helper used by tests and reports: per-entry squared error.
pub fn estimation_mse(h_est: &CMatrix, h: &CMatrix) -> f64 {
    let diff: DMatrix<f64> = (h_est - h).map(|z| z.norm_sqr());
    diff.sum() / diff.len() as f64
}
