//! Full-rate non-orthogonal space-time block codes built from cyclic division
//! algebras, decoded with an iterative probabilistic data association (PDA)
//! detector that keeps the interference covariance inverse current through
//! rank-one updates.
//!
//! The crate is organised along the signal chain:
//!
//! * [`stbc`] builds code matrices and linearizes `Y = H X + N` into the
//!   real bit-level model `y = H b + n`.
//! * [`channel`] draws i.i.d. or Kronecker-correlated Rayleigh channels and
//!   adds calibrated noise.
//! * [`pda`] is the detector.
//! * [`baselines`] holds exhaustive ML, linear MMSE, the SISO AWGN curve and
//!   the ergodic capacity reference.
//! * [`estimation`] implements pilot-aided channel estimation and the
//!   iterative decode/re-estimate loop.
//! * [`sim`] drives Monte Carlo BER sweeps and writes CSV.

pub mod baselines;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod pda;
pub mod sim;
pub mod stbc;

pub use error::{Error, Result};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex matrix used for channel, code and received-signal matrices.
pub type CMatrix = DMatrix<Complex64>;

/// A hard bit in antipodal form: `+1` or `-1`.
pub type Bit = i8;
