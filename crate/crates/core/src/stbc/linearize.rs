//! From the space-time model `Y = Hc X + N` to the real bit-level model
//! `y = H b + n`.
//!
//! Column `i` of the complex effective channel is `vec(Hc A_i)`. Its real
//! form stacks real parts over imaginary parts,
//!
//! ```text
//! H' = [ Re  -Im ]      y = [ Re vec(Y) ]      x = [ Re x_c ]
//!      [ Im   Re ]          [ Im vec(Y) ]          [ Im x_c ]
//! ```
//!
//! and the bit expansion `H = H' (I kron [1 2 ... 2^(q-1)])` gives every
//! PAM dimension `q` columns.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::code::{DataSymbols, StbcCode};
use super::qam::{demap_symbols, map_bits_to_symbols, QamSpec};
use crate::error::{dims_mismatch, Result};
use crate::{Bit, CMatrix};

/// Sizes of one linearized code matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub nr: usize,
    /// Time slots per code matrix (equals the transmit antenna count).
    pub p: usize,
    /// Complex symbols per code matrix.
    pub k: usize,
    /// Bits per real dimension.
    pub q: usize,
}

impl Dims {
    /// Rows of the real model, `2 Nr p`.
    pub fn rows(&self) -> usize {
        2 * self.nr * self.p
    }

    /// Real symbol count, `2k`.
    pub fn real_symbols(&self) -> usize {
        2 * self.k
    }

    /// Bit count, `2qk`.
    pub fn bits(&self) -> usize {
        2 * self.q * self.k
    }

    /// Average complex symbol energy of the square QAM with `q` bits per
    /// dimension.
    pub fn es(&self) -> f64 {
        let side = (1u64 << self.q) as f64;
        2.0 * (side * side - 1.0) / 3.0
    }
}

/// Channel part of the real model for one code matrix; pair it with a
/// received vector through [`EffectiveChannel::model`].
#[derive(Debug, Clone)]
pub struct EffectiveChannel {
    /// Complex V-BLAST form, `Nr p x k`.
    pub h_tilde: CMatrix,
    /// Real symbol-level matrix `H'`, `2 Nr p x 2k`.
    pub h_prime: DMatrix<f64>,
    /// Real bit-level matrix `H`, `2 Nr p x 2qk`.
    pub h: DMatrix<f64>,
    pub dims: Dims,
}

impl EffectiveChannel {
    pub fn model(&self, y: DVector<f64>, sigma2: f64) -> Result<BitLinearModel> {
        BitLinearModel::new(self.h_prime.clone(), self.h.clone(), y, sigma2, self.dims)
    }
}

/// `y = H b + n` with `H` real, what the detectors consume.
#[derive(Debug, Clone)]
pub struct BitLinearModel {
    pub h_prime: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Noise variance of the complex model; each real dimension carries
    /// `sigma2 / 2`.
    pub sigma2: f64,
    pub dims: Dims,
}

impl BitLinearModel {
    pub fn new(
        h_prime: DMatrix<f64>,
        h: DMatrix<f64>,
        y: DVector<f64>,
        sigma2: f64,
        dims: Dims,
    ) -> Result<Self> {
        let rows = dims.rows();
        if h.shape() != (rows, dims.bits()) {
            return Err(dims_mismatch(
                "BitLinearModel.h",
                format!("{rows}x{}", dims.bits()),
                format!("{}x{}", h.nrows(), h.ncols()),
            ));
        }
        if h_prime.shape() != (rows, dims.real_symbols()) {
            return Err(dims_mismatch(
                "BitLinearModel.h_prime",
                format!("{rows}x{}", dims.real_symbols()),
                format!("{}x{}", h_prime.nrows(), h_prime.ncols()),
            ));
        }
        if y.len() != rows {
            return Err(dims_mismatch("BitLinearModel.y", rows, y.len()));
        }
        if !(sigma2 >= 0.0) {
            return Err(crate::Error::InvalidParameter {
                name: "sigma2",
                reason: format!("{sigma2} is not a non-negative variance"),
            });
        }
        Ok(Self {
            h_prime,
            h,
            y,
            sigma2,
            dims,
        })
    }

    /// Builds a model straight from a real bit-level matrix; `H'` is read
    /// off the unit-weight columns.
    pub fn from_bit_matrix(h: DMatrix<f64>, y: DVector<f64>, sigma2: f64, dims: Dims) -> Result<Self> {
        let cols: Vec<usize> = (0..dims.real_symbols()).map(|i| i * dims.q).collect();
        if h.ncols() != dims.bits() {
            return Err(dims_mismatch("from_bit_matrix", dims.bits(), h.ncols()));
        }
        let h_prime = h.select_columns(&cols);
        Self::new(h_prime, h, y, sigma2, dims)
    }

    pub fn with_y(&self, y: DVector<f64>) -> Result<Self> {
        Self::new(self.h_prime.clone(), self.h.clone(), y, self.sigma2, self.dims)
    }
}

/// Linearizes the channel `hc` (`Nr x n`) for `code`.
pub fn linearize(hc: &CMatrix, code: &StbcCode, qam: &QamSpec) -> Result<EffectiveChannel> {
    let n = code.n();
    if hc.ncols() != n {
        return Err(dims_mismatch("linearize: channel columns", n, hc.ncols()));
    }
    let nr = hc.nrows();
    let k = n * n;
    let q = qam.bits_per_dim();
    let dims = Dims { nr, p: n, k, q };

    let mut h_tilde = CMatrix::zeros(nr * n, k);
    for (i, a) in code.weights().iter().enumerate() {
        let ha = hc * a;
        // vec() is column-major, matching nalgebra storage
        h_tilde.column_mut(i).copy_from_slice(ha.as_slice());
    }

    let h_prime = realify_matrix(&h_tilde);
    let h = expand_bits(&h_prime, q);
    Ok(EffectiveChannel {
        h_tilde,
        h_prime,
        h,
        dims,
    })
}

/// `[[Re, -Im], [Im, Re]]`.
pub fn realify_matrix(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// `[Re; Im]` of a complex vector.
pub fn realify_vector(v: &[Complex64]) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// `vec(Y)` stacked as `[Re; Im]`.
pub fn realify_received(y: &CMatrix) -> DVector<f64> {
    realify_vector(y.as_slice())
}

/// `H' (I kron c)` with `c = [1, 2, ..., 2^(q-1)]`.
pub fn expand_bits(h_prime: &DMatrix<f64>, q: usize) -> DMatrix<f64> {
    DMatrix::from_fn(h_prime.nrows(), h_prime.ncols() * q, |r, col| {
        h_prime[(r, col / q)] * (1u64 << (col % q)) as f64
    })
}

/// Real symbol vector `x = [x_I; x_Q]` to the complex symbol vector.
pub fn complex_symbols(x: &[f64]) -> Vec<Complex64> {
    let k = x.len() / 2;
    (0..k).map(|i| Complex64::new(x[i], x[k + i])).collect()
}

/// Bits to complex data symbols ready for [`StbcCode::encode`].
pub fn bits_to_symbol_vector(bits: &[Bit], qam: &QamSpec) -> Result<Vec<Complex64>> {
    let x = map_bits_to_symbols(bits, qam)?;
    if x.len() % 2 != 0 {
        return Err(dims_mismatch("bits_to_symbol_vector", "even real length", x.len()));
    }
    Ok(complex_symbols(&x))
}

/// Hard bit decisions back to PAM values and the `n x n` data symbols.
pub fn symbols_from_bit_estimates(
    bits: &[Bit],
    qam: &QamSpec,
    n: usize,
) -> Result<(Vec<f64>, DataSymbols)> {
    let x = map_bits_to_symbols(bits, qam)?;
    let d = DataSymbols::from_symbol_vector(&complex_symbols(&x), n)?;
    Ok((x, d))
}

/// Data symbols back to bits (slicing off-alphabet values).
pub fn bits_from_symbols(d: &DataSymbols, qam: &QamSpec) -> Vec<Bit> {
    let s = d.to_symbol_vector();
    let x: Vec<f64> = s.iter().map(|z| z.re).chain(s.iter().map(|z| z.im)).collect();
    demap_symbols(&x, qam)
}
