//! Code construction and linearization.

mod code;
mod linearize;
mod qam;

pub use code::{build_stbc_matrix, weight_matrices, DataSymbols, StbcCode, StbcParams};
pub use linearize::{
    bits_from_symbols, bits_to_symbol_vector, complex_symbols, expand_bits, linearize,
    realify_matrix, realify_received, realify_vector, symbols_from_bit_estimates,
    BitLinearModel, Dims, EffectiveChannel,
};
pub use qam::{demap_symbols, map_bits_to_symbols, QamSpec};
