//! Square full-rate circulant codes over a cyclic division algebra.
//!
//! For `n` transmit antennas the code carries `n^2` symbols `d[u][i]` in an
//! `n x n` matrix whose entry `(u, v)` is
//!
//! ```text
//! s(u, v) * sum_i d[(u - v) mod n][i] * w^(v i) * t^i,   w = exp(j 2 pi / n)
//! ```
//!
//! with `s(u, v) = delta` above the diagonal and `1` elsewhere.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{dims_mismatch, Error, Result};
use crate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StbcParams {
    pub n: usize,
    pub delta: Complex64,
    pub t: Complex64,
    /// Scale the code matrix by `1/sqrt(n)` so every antenna radiates `Es`
    /// per channel use.
    pub normalize: bool,
}

impl StbcParams {
    /// Checked constructor; `delta` and `t` must be unit modulus.
    pub fn new(n: usize, delta: Complex64, t: Complex64, normalize: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "code dimension must be at least 1".into(),
            });
        }
        for (name, value) in [("delta", delta), ("t", t)] {
            if (value.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("|{name}| = {} is not 1", value.norm()),
                });
            }
        }
        Ok(Self {
            n,
            delta,
            t,
            normalize,
        })
    }

    /// Information-lossless code, `delta = t = 1`, normalized.
    pub fn ill(n: usize) -> Self {
        Self {
            n,
            delta: Complex64::new(1.0, 0.0),
            t: Complex64::new(1.0, 0.0),
            normalize: true,
        }
    }

    /// Full-diversity information-lossless code, `delta = exp(j sqrt 5)`,
    /// `t = exp(j)`, normalized.
    pub fn fd_ill(n: usize) -> Self {
        Self {
            n,
            delta: Complex64::from_polar(1.0, 5f64.sqrt()),
            t: Complex64::from_polar(1.0, 1.0),
            normalize: true,
        }
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn with_t(mut self, t: Complex64) -> Self {
        self.t = t;
        self
    }

    /// Symbols per code matrix, `k = n^2`.
    pub fn symbols(&self) -> usize {
        self.n * self.n
    }

    pub fn scale(&self) -> f64 {
        if self.normalize {
            1.0 / (self.n as f64).sqrt()
        } else {
            1.0
        }
    }

    /// `w^e` computed from the exponent modulo `n` to keep it exact on the
    /// unit circle.
    fn omega_pow(&self, e: usize) -> Complex64 {
        let e = e % self.n;
        Complex64::from_polar(1.0, 2.0 * PI * e as f64 / self.n as f64)
    }
}

/// The `n x n` complex data symbols of one code matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSymbols(pub CMatrix);

impl DataSymbols {
    /// Lays out `k = n^2` complex symbols with symbol `i` at `(i / n, i % n)`.
    pub fn from_symbol_vector(symbols: &[Complex64], n: usize) -> Result<Self> {
        if symbols.len() != n * n {
            return Err(dims_mismatch("DataSymbols", n * n, symbols.len()));
        }
        Ok(Self(CMatrix::from_row_slice(n, n, symbols)))
    }

    /// Inverse of [`DataSymbols::from_symbol_vector`].
    pub fn to_symbol_vector(&self) -> Vec<Complex64> {
        let n = self.0.nrows();
        (0..n * n).map(|i| self.0[(i / n, i % n)]).collect()
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// Evaluates the code matrix for the given data symbols.
pub fn build_stbc_matrix(d: &DataSymbols, params: &StbcParams) -> Result<CMatrix> {
    let n = params.n;
    if d.0.nrows() != n || d.0.ncols() != n {
        return Err(dims_mismatch(
            "build_stbc_matrix",
            format!("{n}x{n}"),
            format!("{}x{}", d.0.nrows(), d.0.ncols()),
        ));
    }
    let t_pow: Vec<Complex64> = (0..n).map(|i| params.t.powu(i as u32)).collect();
    let scale = params.scale();
    Ok(CMatrix::from_fn(n, n, |u, v| {
        let row = (u + n - v) % n;
        let sum: Complex64 = (0..n)
            .map(|i| d.0[(row, i)] * params.omega_pow(v * i) * t_pow[i])
            .sum();
        let s = if u < v { params.delta } else { Complex64::new(1.0, 0.0) };
        s * sum * scale
    }))
}

/// Dispersion matrices `A_i`, `i = u n + w`, such that
/// `X = sum_i d[u][w] A_i`.
pub fn weight_matrices(params: &StbcParams) -> Vec<CMatrix> {
    let n = params.n;
    (0..n * n)
        .map(|i| {
            let mut unit = CMatrix::zeros(n, n);
            unit[(i / n, i % n)] = Complex64::new(1.0, 0.0);
            build_stbc_matrix(&DataSymbols(unit), params).expect("square unit input")
        })
        .collect()
}

/// A code together with its precomputed dispersion matrices.
#[derive(Debug, Clone)]
pub struct StbcCode {
    params: StbcParams,
    weights: Vec<CMatrix>,
}

impl StbcCode {
    pub fn new(params: StbcParams) -> Self {
        let weights = weight_matrices(&params);
        Self { params, weights }
    }

    pub fn params(&self) -> &StbcParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn weights(&self) -> &[CMatrix] {
        &self.weights
    }

    /// `X = sum_i x_i A_i` for a flat symbol vector of length `n^2`.
    pub fn encode(&self, symbols: &[Complex64]) -> Result<CMatrix> {
        if symbols.len() != self.weights.len() {
            return Err(dims_mismatch("encode", self.weights.len(), symbols.len()));
        }
        let n = self.params.n;
        let mut x = CMatrix::zeros(n, n);
        for (s, a) in symbols.iter().zip(&self.weights) {
            x.zip_apply(a, |acc, w| *acc += s * w);
        }
        Ok(x)
    }
}
