//! Joint spectral amplitudes, Schmidt decomposition and mode selectivity.
//!
//! The JSA is `φ(ω_s, ω_o)·α(ω_o − ω_s)` on a (signal × output) grid. Mode
//! selectivity is reported two ways: the Schmidt weight of the target mode,
//! and the extinction `−10·log₁₀(P₁/P₀)` from projecting order-1 and order-0
//! pump JSAs onto a fixed Gaussian signal mode. The projection form is the
//! one an experiment measures and is the primary metric.

mod jsa;
mod metrics;
mod projection;
mod pump;
mod schmidt;

pub use jsa::{build_jsa, jsa_axes, pm_width_omega, sinc2_crossing, GridOptions, JsaGrid, JsaSidecar};
pub use metrics::{
    bandwidth_compression, extinction_from_selectivity, extinction_ratio, selectivity,
    selectivity_from_coefficients, Selectivity,
};
pub use projection::{mode_projection_power, project_with_kernel, ProjectionOptions, ProjectionPowers};
pub use pump::{hermite_function, pump_envelope, PumpEnvelope, SpectralWidth};
pub use schmidt::{cell_widths, schmidt_decompose, SchmidtDecomposition, SchmidtSummary};
