//! Forward models and inverse retrieval for quasi-phase-matched
//! sum-frequency (quantum pulse gate) devices.
//!
//! * [`dispersion`]: refractive-index backends and the phase mismatch Δβ.
//! * [`phasematch`]: phase-matching amplitudes, spectra, resolution and widths.
//! * [`modes`]: joint spectral amplitudes, Schmidt decomposition, selectivity.
//! * [`efficiency`]: conversion-efficiency model and fits.
//! * [`inverse`]: genetic-algorithm retrieval of Δβ(z) profiles.
//! * [`bench`]: length sweeps, efficiency curves and the literature table.

// Validation uses `!(x > 0.0)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config;
pub mod dispersion;
pub mod efficiency;
pub mod error;
pub mod inverse;
pub mod modes;
pub mod numeric;
pub mod phasematch;
pub mod units;

pub use error::{Error, Result};
