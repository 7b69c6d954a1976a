//! Square QAM viewed as two independent PAM dimensions, with the natural
//! binary bit expansion `x = sum_j 2^j b_j`, `b_j in {+1, -1}`.

use crate::error::{Error, Result};
use crate::Bit;

#[derive(Debug, Clone, PartialEq)]
pub struct QamSpec {
    order: usize,
    bits_per_dim: usize,
    alphabet: Vec<f64>,
}

impl QamSpec {
    /// Square `M`-QAM; `M` must be an even power of two (4, 16, 64, ...).
    pub fn new(order: usize) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() || !order.trailing_zeros().is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "qam",
                reason: format!("{order} is not a square QAM order (4, 16, 64, ...)"),
            });
        }
        let bits_per_dim = (order.trailing_zeros() / 2) as usize;
        let side = 1usize << bits_per_dim;
        let alphabet = (0..side)
            .map(|v| 2.0 * v as f64 - (side as f64 - 1.0))
            .collect();
        Ok(Self {
            order,
            bits_per_dim,
            alphabet,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `q = log2(sqrt(M))`.
    pub fn bits_per_dim(&self) -> usize {
        self.bits_per_dim
    }

    /// PAM points per real dimension, ascending, spacing 2.
    pub fn pam_alphabet(&self) -> &[f64] {
        &self.alphabet
    }

    /// Average energy of one complex symbol, `2 (M - 1) / 3`.
    pub fn es(&self) -> f64 {
        2.0 * (self.order as f64 - 1.0) / 3.0
    }

    pub fn max_amplitude(&self) -> f64 {
        ((1usize << self.bits_per_dim) - 1) as f64
    }

    /// Nearest PAM point to `x`.
    pub fn slice(&self, x: f64) -> f64 {
        let top = self.max_amplitude();
        // odd integers in [-top, top]
        let level = ((x + top) / 2.0).round().clamp(0.0, top);
        2.0 * level - top
    }

    /// Writes the `q` bits of PAM point `x` into `out` (least significant first).
    pub fn demap_into(&self, x: f64, out: &mut [Bit]) {
        let top = self.max_amplitude();
        let level = ((x + top) / 2.0).round().clamp(0.0, top) as usize;
        for (j, bit) in out.iter_mut().enumerate().take(self.bits_per_dim) {
            *bit = if (level >> j) & 1 == 1 { 1 } else { -1 };
        }
    }
}

/// Packs `q` antipodal bits per real dimension into PAM values.
pub fn map_bits_to_symbols(bits: &[Bit], qam: &QamSpec) -> Result<Vec<f64>> {
    let q = qam.bits_per_dim();
    if !bits.len().is_multiple_of(q) {
        return Err(crate::error::dims_mismatch(
            "map_bits_to_symbols",
            format!("a multiple of {q} bits"),
            bits.len(),
        ));
    }
    if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b != 1 && b != -1) {
        return Err(Error::InvalidBit {
            index,
            value: value as i64,
        });
    }
    Ok(bits
        .chunks(q)
        .map(|group| {
            group
                .iter()
                .enumerate()
                .map(|(j, &b)| f64::from(b) * (1u64 << j) as f64)
                .sum()
        })
        .collect())
}

/// Inverse of [`map_bits_to_symbols`] for points of the alphabet; other
/// values are sliced first.
pub fn demap_symbols(x: &[f64], qam: &QamSpec) -> Vec<Bit> {
    let q = qam.bits_per_dim();
    let mut bits = vec![0; x.len() * q];
    for (xi, chunk) in x.iter().zip(bits.chunks_mut(q)) {
        qam.demap_into(*xi, chunk);
    }
    bits
}
