use serde::{Deserialize, Serialize};

use super::sellmeier::SellmeierModel;
use super::ProcessConfig;
use crate::error::Result;

/// Second-order expansion of the full mismatch around reference frequencies.
///
/// ```text
/// Δβ = Δβ_ref + β1s·δs + β1p·δp − β1o·δo + ½(β2s·δs² + β2p·δp² − β2o·δo²),  δo = δs + δp
/// ```
///
/// `delta_beta_ref` is the complete mismatch at the reference point, grating
/// term included, so the process config's grating and offset are not applied
/// on top of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorDispersionModel {
    pub signal_ref_omega: f64,
    pub pump_ref_omega: f64,
    pub delta_beta_ref: f64,
    /// Inverse group velocities (s/m) for signal, pump, output.
    pub inverse_group_velocity: [f64; 3],
    /// Group-velocity dispersion (s²/m) for signal, pump, output.
    pub group_velocity_dispersion: [f64; 3],
}

impl TaylorDispersionModel {
    /// Constant mismatch; every derivative term zero.
    pub fn constant(signal_ref_omega: f64, pump_ref_omega: f64, delta_beta_ref: f64) -> Self {
        Self {
            signal_ref_omega,
            pump_ref_omega,
            delta_beta_ref,
            inverse_group_velocity: [0.0; 3],
            group_velocity_dispersion: [0.0; 3],
        }
    }

    pub fn output_ref_omega(&self) -> f64 {
        self.signal_ref_omega + self.pump_ref_omega
    }

    pub fn delta_beta(&self, omega_s: f64, omega_p: f64) -> f64 {
        let ds = omega_s - self.signal_ref_omega;
        let dp = omega_p - self.pump_ref_omega;
        let d_o = ds + dp;
        let [b1s, b1p, b1o] = self.inverse_group_velocity;
        let [b2s, b2p, b2o] = self.group_velocity_dispersion;
        self.delta_beta_ref + b1s * ds + b1p * dp - b1o * d_o
            + 0.5 * (b2s * ds * ds + b2p * dp * dp - b2o * d_o * d_o)
    }

    /// Expands a Sellmeier model around the config's centre frequencies using
    /// central differences of k(ω).
    pub fn from_sellmeier(config: &ProcessConfig, model: &SellmeierModel) -> Result<Self> {
        let t = config.temperature_c;
        let [ps, pp, po] = config.polarization;
        let ws = config.signal_omega();
        let wp = config.pump_omega();
        let wo = ws + wp;
        let derivs = |w: f64, pol| -> Result<(f64, f64)> {
            let h = w * 2e-4;
            let km = model.wavenumber(w - h, t, pol)?;
            let k0 = model.wavenumber(w, t, pol)?;
            let kp = model.wavenumber(w + h, t, pol)?;
            Ok(((kp - km) / (2.0 * h), (kp - 2.0 * k0 + km) / (h * h)))
        };
        let (b1s, b2s) = derivs(ws, ps)?;
        let (b1p, b2p) = derivs(wp, pp)?;
        let (b1o, b2o) = derivs(wo, po)?;
        let delta_beta_ref = super::sellmeier_delta_beta(config, model, ws, wp)?;
        Ok(Self {
            signal_ref_omega: ws,
            pump_ref_omega: wp,
            delta_beta_ref,
            inverse_group_velocity: [b1s, b1p, b1o],
            group_velocity_dispersion: [b2s, b2p, b2o],
        })
    }

    /// The ideal quantum-pulse-gate limit of a Sellmeier expansion: phase
    /// matched at the centre, pump group velocity equal to the signal's, no
    /// group-velocity dispersion.
    pub fn ideal_qpg(config: &ProcessConfig, model: &SellmeierModel) -> Result<Self> {
        let mut t = Self::from_sellmeier(config, model)?;
        t.delta_beta_ref = 0.0;
        t.inverse_group_velocity[1] = t.inverse_group_velocity[0];
        t.group_velocity_dispersion = [0.0; 3];
        Ok(t)
    }
}
