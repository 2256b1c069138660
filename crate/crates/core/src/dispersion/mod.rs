//! Wavenumbers and the quasi-phase-matched mismatch Δβ.
//!
//! Two backends are available: a temperature-dependent Sellmeier model and a
//! second-order Taylor expansion. For the Sellmeier backend
//!
//! ```text
//! Δβ = k_s + k_p − k_o + 2π·order/Λ + offset
//! ```
//!
//! The grating vector enters with a positive sign because sum-frequency
//! generation in normal-dispersion media has `k_o > k_s + k_p`.

mod process;
mod profile;
mod sellmeier;
mod taylor;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use process::{ProcessConfig, ENERGY_CONSERVATION_RTOL};
pub use profile::DeltaBetaProfile;
pub use sellmeier::{Polarization, SellmeierAxis, SellmeierModel};
pub use taylor::TaylorDispersionModel;

use crate::error::{Error, Result};
use crate::numeric::brent_root;
use crate::units::{nm_to_omega, omega_to_nm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DispersionModel {
    Sellmeier(SellmeierModel),
    Taylor(TaylorDispersionModel),
}

impl Default for DispersionModel {
    fn default() -> Self {
        DispersionModel::Sellmeier(SellmeierModel::default())
    }
}

impl From<SellmeierModel> for DispersionModel {
    fn from(m: SellmeierModel) -> Self {
        DispersionModel::Sellmeier(m)
    }
}

impl From<TaylorDispersionModel> for DispersionModel {
    fn from(m: TaylorDispersionModel) -> Self {
        DispersionModel::Taylor(m)
    }
}

pub(crate) fn sellmeier_delta_beta(
    config: &ProcessConfig,
    model: &SellmeierModel,
    omega_s: f64,
    omega_p: f64,
) -> Result<f64> {
    let t = config.temperature_c;
    let [ps, pp, po] = config.polarization;
    let omega_o = omega_s + omega_p;
    let ks = model.wavenumber(omega_s, t, ps)?;
    let kp = model.wavenumber(omega_p, t, pp)?;
    let ko = model.wavenumber(omega_o, t, po)?;
    Ok(ks + kp - ko + config.grating_wavevector() + config.delta_beta_offset_per_m)
}

/// Phase mismatch in 1/m at signal/pump angular frequencies (rad/s); the
/// output frequency is `ω_s + ω_p`.
pub fn delta_beta(config: &ProcessConfig, model: &DispersionModel, omega_s: f64, omega_p: f64) -> Result<f64> {
    match model {
        DispersionModel::Sellmeier(m) => sellmeier_delta_beta(config, m, omega_s, omega_p),
        DispersionModel::Taylor(t) => Ok(t.delta_beta(omega_s, omega_p)),
    }
}

/// Δβ on a (signal × pump) grid; entry `(i, j)` is `delta_beta(signal[i], pump[j])`.
pub fn delta_beta_map(
    config: &ProcessConfig,
    model: &DispersionModel,
    signal_omega: &[f64],
    pump_omega: &[f64],
) -> Result<DMatrix<f64>> {
    for (name, axis) in [("signal", signal_omega), ("pump", pump_omega)] {
        if !crate::numeric::is_strictly_monotone(axis) {
            return Err(Error::Config(format!("{name} grid must be strictly monotone")));
        }
    }
    let rows: Vec<Vec<f64>> = signal_omega
        .par_iter()
        .map(|&ws| pump_omega.iter().map(|&wp| delta_beta(config, model, ws, wp)).collect())
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(signal_omega.len(), pump_omega.len(), |i, j| rows[i][j]))
}

/// Returns a copy of `config` whose constant offset cancels the mismatch at
/// the centre wavelengths, so the design point is exactly phase matched.
pub fn phase_matched_at_center(config: &ProcessConfig, model: &DispersionModel) -> Result<ProcessConfig> {
    let db = delta_beta(config, model, config.signal_omega(), config.pump_omega())?;
    Ok(config.clone().with_offset(config.delta_beta_offset_per_m - db))
}

/// Signal wavelength (nm) in `[lo_nm, hi_nm]` at which Δβ vanishes for a
/// fixed pump wavelength.
pub fn phase_matched_signal_nm(
    config: &ProcessConfig,
    model: &DispersionModel,
    pump_nm: f64,
    lo_nm: f64,
    hi_nm: f64,
) -> Result<f64> {
    let wp = nm_to_omega(pump_nm);
    let omega = brent_root(
        |ws| delta_beta(config, model, ws, wp),
        nm_to_omega(hi_nm),
        nm_to_omega(lo_nm),
        1.0,
        200,
    )?;
    Ok(omega_to_nm(omega))
}

/// `∂Δβ/∂ω` (s/m) along the output axis at fixed signal, by central
/// differences at the config's centre.
pub fn output_slope(config: &ProcessConfig, model: &DispersionModel) -> Result<f64> {
    let ws = config.signal_omega();
    let wp = config.pump_omega();
    let h = wp * 1e-5;
    let plus = delta_beta(config, model, ws, wp + h)?;
    let minus = delta_beta(config, model, ws, wp - h)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Linear map from a waveguide width deviation (µm) to a Δβ offset (1/m).
pub fn width_to_delta_beta(width_deviation_um: f64, sensitivity: Option<f64>) -> Result<f64> {
    Ok(checked_sensitivity(sensitivity)? * width_deviation_um)
}

/// Inverse of [`width_to_delta_beta`].
pub fn delta_beta_to_width(delta_beta: f64, sensitivity: Option<f64>) -> Result<f64> {
    Ok(delta_beta / checked_sensitivity(sensitivity)?)
}

fn checked_sensitivity(sensitivity: Option<f64>) -> Result<f64> {
    match sensitivity {
        Some(s) if s > 0.0 && s.is_finite() => Ok(s),
        Some(s) => Err(Error::Config(format!("width sensitivity must be > 0, got {s}"))),
        None => Err(Error::Config(
            "width_sensitivity_per_m_per_um is required to convert Δβ to width deviations".into(),
        )),
    }
}
