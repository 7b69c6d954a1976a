//! Iterative probabilistic data association over `y = H b + n`.
//!
//! Each bit `b_t` (column `h_t` of `H`) carries a probability `p_t = P(b_t = +1)`.
//! Conditioned on `b_t`, the received vector is treated as Gaussian with
//! means `mu+ = u + 2(1 - p_t) h_t`, `mu- = mu+ - 2 h_t` and covariance
//! `C_t = D - v_t h_t h_t^T`, where
//!
//! ```text
//! u = sum_s (2 p_s - 1) h_s
//! D = sigma2 I + sum_s v_s h_s h_s^T,     v_s = 4 p_s (1 - p_s)
//! ```
//!
//! Both `u` and `D^-1` are carried across bit updates, so refreshing a bit
//! costs a single matrix-vector product and a rank-one correction, i.e.
//! `O(rows^2)` instead of the `O(rows^3)` of a fresh inverse.
//!
//! The log likelihood ratio of a bit is its previous ratio plus
//! `log beta = -(r+^T C^-1 r+ - r-^T C^-1 r-)` with `r± = y - mu±`. Through
//! the matrix inversion lemma this collapses to
//!
//! ```text
//! log beta = 4 w^T (y - u + (2 p_t - 1) h_t) / (1 - v_t h_t^T w),   w = D^-1 h_t
//! ```
//!
//! Everything stays in the log domain; probabilities are recovered with a
//! logistic map after clamping.

use nalgebra::{DMatrix, DVector};

use crate::error::{dims_mismatch, Error, Result};
use crate::stbc::BitLinearModel;
use crate::Bit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdaConfig {
    /// Full sweeps over all bits.
    pub num_iter: usize,
    /// Bound on `|log Lambda|`.
    pub llr_clamp: f64,
    /// `D^-1` corrections with `|eta|` below this are skipped.
    pub eta_eps: f64,
    /// Refactor `D^-1` from scratch after every `refresh_every` sweeps (0 = never).
    pub refresh_every: usize,
    /// Stop early once no probability moved by more than this in a sweep.
    pub early_stop: Option<f64>,
}

impl Default for PdaConfig {
    fn default() -> Self {
        Self {
            num_iter: 10,
            llr_clamp: 60.0,
            eta_eps: 1e-12,
            refresh_every: 0,
            early_stop: None,
        }
    }
}

impl PdaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "num_iter",
                reason: "at least one sweep is required".into(),
            });
        }
        if !(self.llr_clamp > 0.0) {
            return Err(Error::InvalidParameter {
                name: "llr_clamp",
                reason: format!("must be positive, got {}", self.llr_clamp),
            });
        }
        if !(self.eta_eps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "eta_eps",
                reason: format!("must be non-negative, got {}", self.eta_eps),
            });
        }
        Ok(())
    }
}

/// Variance of an antipodal bit with `P(+1) = p`.
#[inline]
pub fn bit_variance(p: f64) -> f64 {
    4.0 * p * (1.0 - p)
}

#[inline]
fn logistic(llr: f64) -> f64 {
    if llr >= 0.0 {
        1.0 / (1.0 + (-llr).exp())
    } else {
        let e = llr.exp();
        e / (1.0 + e)
    }
}

/// Outcome of one bit refresh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitUpdate {
    pub log_beta: f64,
    pub llr: f64,
    pub pplus_old: f64,
    pub pplus_new: f64,
    /// Whether the `D^-1` correction was applied.
    pub rank_one_applied: bool,
}

/// Running statistics of one decode.
#[derive(Debug, Clone)]
pub struct PdaState {
    pplus: Vec<f64>,
    llr: Vec<f64>,
    u: DVector<f64>,
    dinv: DMatrix<f64>,
    w: Vec<f64>,
}

impl PdaState {
    /// Uniform priors: `p = 1/2`, `u = 0`, `D^-1 = (H H^T + sigma2 I)^-1`.
    pub fn initialize(model: &BitLinearModel) -> Result<Self> {
        let bits = model.h.ncols();
        Self::with_probabilities(model, vec![0.5; bits])
    }

    /// State with arbitrary bit probabilities; `u` and `D^-1` are built
    /// from scratch to match.
    pub fn with_probabilities(model: &BitLinearModel, pplus: Vec<f64>) -> Result<Self> {
        let (rows, bits) = model.h.shape();
        if pplus.len() != bits {
            return Err(dims_mismatch("PdaState probabilities", bits, pplus.len()));
        }
        if let Some(p) = pplus.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter {
                name: "pplus",
                reason: format!("{p} is not a probability"),
            });
        }
        let llr = pplus.iter().map(|&p| (p / (1.0 - p)).ln()).collect();
        let mut state = Self {
            u: interference_mean(&model.h, &pplus),
            dinv: DMatrix::zeros(rows, rows),
            w: vec![0.0; rows],
            pplus,
            llr,
        };
        state.refresh_inverse(model)?;
        Ok(state)
    }

    pub fn pplus(&self) -> &[f64] {
        &self.pplus
    }

    pub fn pminus(&self, col: usize) -> f64 {
        1.0 - self.pplus[col]
    }

    pub fn llr(&self) -> &[f64] {
        &self.llr
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn dinv(&self) -> &DMatrix<f64> {
        &self.dinv
    }

    /// `D` assembled directly from the current probabilities.
    pub fn covariance(&self, model: &BitLinearModel) -> DMatrix<f64> {
        let variances: Vec<f64> = self.pplus.iter().map(|&p| bit_variance(p)).collect();
        assemble_covariance(model, &variances)
    }

    /// Recomputes `D^-1` by Cholesky factorization of `D`.
    pub fn refresh_inverse(&mut self, model: &BitLinearModel) -> Result<()> {
        let d = self.covariance(model);
        let inv = d
            .cholesky()
            .ok_or(Error::IllConditioned("H H^T + sigma2 I is not positive definite"))?
            .inverse();
        self.dinv = (&inv + inv.transpose()) * 0.5;
        Ok(())
    }

    /// Conditional means `(mu+, mu-)` of `y` given bit `col`.
    pub fn bit_means(&self, model: &BitLinearModel, col: usize) -> (DVector<f64>, DVector<f64>) {
        let h = model.h.column(col);
        let mu_plus = &self.u + h * (2.0 * (1.0 - self.pplus[col]));
        let mu_minus = &mu_plus - h * 2.0;
        (mu_plus, mu_minus)
    }

    /// `C^-1` for bit `col` from the maintained `D^-1`; falls back to a
    /// direct inverse when the correction denominator is within `eta_eps`
    /// of zero.
    pub fn conditional_cov_inverse(
        &self,
        model: &BitLinearModel,
        col: usize,
        config: &PdaConfig,
    ) -> Result<DMatrix<f64>> {
        let v = bit_variance(self.pplus[col]);
        if v == 0.0 {
            return Ok(self.dinv.clone());
        }
        let h = model.h.column(col);
        let w = &self.dinv * h;
        let denom = h.dot(&w) - 1.0 / v;
        if denom.abs() <= config.eta_eps {
            let mut c = self.covariance(model);
            c.ger(-v, &h, &h, 1.0);
            return c
                .cholesky()
                .map(|ch| ch.inverse())
                .ok_or(Error::IllConditioned("conditional covariance is singular"));
        }
        let mut cinv = self.dinv.clone();
        cinv.ger(-1.0 / denom, &w, &w, 1.0);
        Ok(cinv)
    }

    /// `log beta` for bit `col` under the current state.
    pub fn bit_log_likelihood_ratio(&self, model: &BitLinearModel, col: usize) -> f64 {
        let h = model.h.column(col);
        let w = &self.dinv * h;
        let g = h.dot(&w);
        let p = self.pplus[col];
        let num = w.dot(&model.y) - w.dot(&self.u) + (2.0 * p - 1.0) * g;
        4.0 * num / (1.0 - bit_variance(p) * g)
    }

    /// Refreshes bit `col`: likelihood ratio, posterior, `u` and `D^-1`.
    pub fn update_bit(
        &mut self,
        model: &BitLinearModel,
        col: usize,
        config: &PdaConfig,
    ) -> Result<BitUpdate> {
        let rows = model.h.nrows();
        let h = &model.h.as_slice()[col * rows..(col + 1) * rows];
        let p_old = self.pplus[col];
        let v_old = bit_variance(p_old);

        self.compute_w(h);
        let mut g = dot(h, &self.w);
        let mut lemma = 1.0 - v_old * g;
        if !(lemma > config.eta_eps) {
            // accumulated round-off pushed C^-1 off positive definiteness
            self.refresh_inverse(model)?;
            self.compute_w(h);
            g = dot(h, &self.w);
            lemma = 1.0 - v_old * g;
            if !(lemma > 0.0) {
                return Err(Error::IllConditioned("conditional covariance is singular"));
            }
        }
        let num = dot(&self.w, model.y.as_slice()) - dot(&self.w, self.u.as_slice())
            + (2.0 * p_old - 1.0) * g;
        let log_beta = 4.0 * num / lemma;

        // alpha is the previous posterior ratio
        let llr = (self.llr[col] + log_beta).clamp(-config.llr_clamp, config.llr_clamp);
        let p_new = logistic(llr);
        self.llr[col] = llr;
        self.pplus[col] = p_new;

        let dp = 2.0 * (p_new - p_old);
        if dp != 0.0 {
            for (ui, hi) in self.u.as_mut_slice().iter_mut().zip(h) {
                *ui += dp * hi;
            }
        }

        let eta = bit_variance(p_new) - v_old;
        let mut rank_one_applied = false;
        if eta.abs() >= config.eta_eps && eta != 0.0 {
            let denom = 1.0 + eta * g;
            if denom > config.eta_eps {
                let scale = eta / denom;
                for (col_j, &wj) in self.dinv.as_mut_slice().chunks_exact_mut(rows).zip(&self.w) {
                    let s = scale * wj;
                    for (d, &wi) in col_j.iter_mut().zip(&self.w) {
                        *d -= s * wi;
                    }
                }
            } else {
                self.refresh_inverse(model)?;
            }
            rank_one_applied = true;
        }

        Ok(BitUpdate {
            log_beta,
            llr,
            pplus_old: p_old,
            pplus_new: p_new,
            rank_one_applied,
        })
    }

    /// One pass over every bit in index order. Returns the largest
    /// probability change.
    pub fn sweep(&mut self, model: &BitLinearModel, config: &PdaConfig) -> Result<f64> {
        let mut max_change: f64 = 0.0;
        for col in 0..model.h.ncols() {
            let upd = self.update_bit(model, col, config)?;
            max_change = max_change.max((upd.pplus_new - upd.pplus_old).abs());
        }
        Ok(max_change)
    }

    /// `w = D^-1 h`, column by column over the symmetric inverse.
    fn compute_w(&mut self, h: &[f64]) {
        let rows = h.len();
        self.w.iter_mut().for_each(|x| *x = 0.0);
        for (col_j, &hj) in self.dinv.as_slice().chunks_exact(rows).zip(h) {
            if hj != 0.0 {
                for (wi, &d) in self.w.iter_mut().zip(col_j) {
                    *wi += hj * d;
                }
            }
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sum_s (2 p_s - 1) h_s`.
pub fn interference_mean(h: &DMatrix<f64>, pplus: &[f64]) -> DVector<f64> {
    let weights = DVector::from_iterator(pplus.len(), pplus.iter().map(|&p| 2.0 * p - 1.0));
    h * weights
}

/// `sigma2 I + sum_s variance_s h_s h_s^T`.
pub fn assemble_covariance(model: &BitLinearModel, variances: &[f64]) -> DMatrix<f64> {
    let rows = model.h.nrows();
    let scaled = DMatrix::from_fn(rows, variances.len(), |r, c| model.h[(r, c)] * variances[c]);
    let mut d = &scaled * model.h.transpose();
    for i in 0..rows {
        d[(i, i)] += model.sigma2;
    }
    d
}

/// Decoder output: soft values, hard decisions and PAM estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct PdaOutput {
    /// Final `log Lambda` per bit, usable as soft input to a channel decoder.
    pub llr: Vec<f64>,
    pub hard_bits: Vec<Bit>,
    /// `x_i = sum_j 2^j b_ij` from the hard bits.
    pub symbols: Vec<f64>,
    pub sweeps: usize,
}

/// Runs `config.num_iter` sweeps and slices the final ratios
/// (`Lambda >= 1` decides `+1`).
pub fn decode(model: &BitLinearModel, config: &PdaConfig) -> Result<PdaOutput> {
    config.validate()?;
    let mut state = PdaState::initialize(model)?;
    let mut sweeps = 0;
    for iter in 1..=config.num_iter {
        let change = state.sweep(model, config)?;
        sweeps = iter;
        if config.early_stop.is_some_and(|eps| change < eps) {
            break;
        }
        if config.refresh_every > 0 && iter % config.refresh_every == 0 && iter < config.num_iter {
            state.refresh_inverse(model)?;
        }
    }
    let hard_bits: Vec<Bit> = state
        .llr
        .iter()
        .map(|&l| if l >= 0.0 { 1 } else { -1 })
        .collect();
    let q = model.dims.q;
    let symbols = hard_bits
        .chunks(q)
        .map(|g| {
            g.iter()
                .enumerate()
                .map(|(j, &b)| f64::from(b) * (1u64 << j) as f64)
                .sum()
        })
        .collect();
    Ok(PdaOutput {
        llr: state.llr,
        hard_bits,
        symbols,
        sweeps,
    })
}
