//! Reference detectors and analytic curves the PDA detector is measured
//! against.

mod awgn;
mod capacity;
mod ml;
mod mmse;

pub use awgn::{q_function, siso_awgn_ber, snr_db_for_ber};
pub use capacity::{ergodic_capacity, min_snr_for_rate, CapacityQuery};
pub use ml::{ml_decode, ML_MAX_BITS};
pub use mmse::{mmse_detect, mmse_estimate};
