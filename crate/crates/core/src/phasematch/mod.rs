//! Phase-matching amplitude for uniform and piecewise-inhomogeneous
//! waveguides, instrument-resolution convolution and bandwidth metrics.
//!
//! Inhomogeneity enters through the accumulated phase `∫₀^z Δβ(z')dz'`:
//!
//! ```text
//! φ(Δβ) = (1/L) ∫₀^L exp(i ∫₀^z [Δβ + f(z')] dz') dz
//! ```
//!
//! which for a single section reduces to `e^{iΔβL/2}·sinc(ΔβL/2)`.

mod bandwidth;
pub(crate) mod resolution;
mod spectrum;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bandwidth::{bandwidth, BandwidthMetric};
pub use resolution::{convolve_resolution, ResolutionKernel};
pub use spectrum::{AxisKind, Spectrum, SpectrumMeta};

use crate::dispersion::{delta_beta, DeltaBetaProfile, DispersionModel, ProcessConfig};
use crate::error::{Error, Result};
use crate::numeric::{linspace, sinc};
use crate::units::nm_to_omega;

/// Normalised phase-matching amplitude of a uniform waveguide of length `length_m`.
pub fn pm_uniform(delta_beta: f64, length_m: f64) -> Complex64 {
    let half = 0.5 * delta_beta * length_m;
    Complex64::from_polar(sinc(half), half)
}

/// Phase-matching amplitude of a piecewise-constant profile at global mismatch
/// `delta_beta_global` (1/m).
pub fn pm_profile(profile: &DeltaBetaProfile, delta_beta_global: f64) -> Complex64 {
    let lengths = profile.section_lengths_m();
    pm_sections(&lengths, profile.offsets_per_m(), delta_beta_global)
}

/// Closed-form section sum behind [`pm_profile`]. Section `j` contributes
/// `e^{iΦ_j}·ℓ_j·e^{i b_j ℓ_j/2}·sinc(b_j ℓ_j/2)` with `b_j = Δβ + f_j` and
/// `Φ_{j+1} = Φ_j + b_j ℓ_j`.
pub fn pm_sections(lengths_m: &[f64], offsets_per_m: &[f64], delta_beta_global: f64) -> Complex64 {
    debug_assert_eq!(lengths_m.len(), offsets_per_m.len());
    let mut phase = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut total = 0.0;
    for (&len, &f) in lengths_m.iter().zip(offsets_per_m) {
        let b = delta_beta_global + f;
        let half = 0.5 * b * len;
        acc += Complex64::from_polar(len * sinc(half), phase + half);
        phase += b * len;
        total += len;
    }
    acc / total
}

/// How a 1-D phase-matching scan is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scan {
    /// Signal wavelength tuned along `axis_nm` with the pump held at `pump_nm`
    /// (the CW room-temperature measurement).
    Signal { axis_nm: Vec<f64>, pump_nm: f64 },
    /// Output wavelength observed along `axis_nm` at a fixed signal wavelength;
    /// the pump supplies `ω_o − ω_s`.
    Output { axis_nm: Vec<f64>, signal_nm: f64 },
}

impl Scan {
    pub fn signal_linspace(start_nm: f64, stop_nm: f64, points: usize, pump_nm: f64) -> Self {
        Scan::Signal { axis_nm: linspace(start_nm, stop_nm, points), pump_nm }
    }

    pub fn output_linspace(start_nm: f64, stop_nm: f64, points: usize, signal_nm: f64) -> Self {
        Scan::Output { axis_nm: linspace(start_nm, stop_nm, points), signal_nm }
    }

    pub fn axis_nm(&self) -> &[f64] {
        match self {
            Scan::Signal { axis_nm, .. } | Scan::Output { axis_nm, .. } => axis_nm,
        }
    }

    /// `(ω_s, ω_p)` for every sample.
    pub fn frequencies(&self) -> Vec<(f64, f64)> {
        match self {
            Scan::Signal { axis_nm, pump_nm } => {
                let wp = nm_to_omega(*pump_nm);
                axis_nm.iter().map(|&s| (nm_to_omega(s), wp)).collect()
            }
            Scan::Output { axis_nm, signal_nm } => {
                let ws = nm_to_omega(*signal_nm);
                axis_nm.iter().map(|&o| (ws, nm_to_omega(o) - ws)).collect()
            }
        }
    }

    /// Same scan geometry on another axis.
    pub fn with_axis(&self, axis_nm: Vec<f64>) -> Self {
        match self {
            Scan::Signal { pump_nm, .. } => Scan::Signal { axis_nm, pump_nm: *pump_nm },
            Scan::Output { signal_nm, .. } => Scan::Output { axis_nm, signal_nm: *signal_nm },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Peak,
    Absolute,
}

/// Global Δβ (1/m) at every sample of a scan.
pub fn scan_delta_beta(config: &ProcessConfig, model: &DispersionModel, scan: &Scan) -> Result<Vec<f64>> {
    scan.frequencies()
        .par_iter()
        .map(|&(ws, wp)| delta_beta(config, model, ws, wp))
        .collect()
}

fn check_profile_length(config: &ProcessConfig, profile: &DeltaBetaProfile) -> Result<()> {
    let (a, b) = (config.length_mm(), profile.length_mm());
    if (a - b).abs() > 1e-9 * a {
        return Err(Error::Profile(format!("profile spans {b} mm but the device is {a} mm long")));
    }
    Ok(())
}

/// Simulated phase-matching spectrum along `scan` (wavelength axis, nm).
///
/// Without a profile the device is the ideal uniform waveguide of the
/// config's length.
pub fn pm_spectrum(
    config: &ProcessConfig,
    model: &DispersionModel,
    profile: Option<&DeltaBetaProfile>,
    scan: &Scan,
    normalization: Normalization,
) -> Result<Spectrum> {
    let uniform;
    let profile = match profile {
        Some(p) => {
            check_profile_length(config, p)?;
            p
        }
        None => {
            uniform = DeltaBetaProfile::uniform(config.length_mm())?;
            &uniform
        }
    };
    let dbeta = scan_delta_beta(config, model, scan)?;
    let lengths = profile.section_lengths_m();
    let amps: Vec<Complex64> = dbeta
        .par_iter()
        .map(|&db| pm_sections(&lengths, profile.offsets_per_m(), db))
        .collect();
    let spectrum = Spectrum::from_amplitudes(AxisKind::Wavelength, scan.axis_nm().to_vec(), amps)?
        .with_meta(SpectrumMeta {
            temperature_c: Some(config.temperature_c),
            device_id: None,
            resolution_sigma: 0.0,
        });
    match normalization {
        Normalization::Peak => spectrum.peak_normalized(),
        Normalization::Absolute => Ok(spectrum),
    }
}
