use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::trapezoid_weights;
use crate::units::{nm_to_omega, width_nm_to_omega};

/// Spectral width given either in wavelength or in angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralWidth {
    Nm(f64),
    RadPerS(f64),
}

/// Hermite-Gaussian pump envelope `ψ_n(x)·e^{iφ2·δ²/2}` with `x = δ/σ`,
/// `δ = ω − ω_c`. The intensity of the order-0 envelope falls to 1/e at
/// `|δ| = σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpEnvelope {
    pub order: usize,
    pub center_nm: f64,
    pub sigma: SpectralWidth,
    /// Quadratic spectral phase φ2 (s²).
    #[serde(default)]
    pub chirp_s2: f64,
}

impl PumpEnvelope {
    pub fn gaussian(center_nm: f64, sigma: SpectralWidth) -> Self {
        Self { order: 0, center_nm, sigma, chirp_s2: 0.0 }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn center_omega(&self) -> f64 {
        nm_to_omega(self.center_nm)
    }

    pub fn sigma_omega(&self) -> f64 {
        match self.sigma {
            SpectralWidth::Nm(nm) => width_nm_to_omega(nm, self.center_nm),
            SpectralWidth::RadPerS(w) => w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.sigma_omega();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Config(format!("pump σ must be > 0, got {s} rad/s")));
        }
        if !(self.center_nm > 0.0) {
            return Err(Error::Config(format!("pump centre must be > 0, got {} nm", self.center_nm)));
        }
        Ok(())
    }

    /// Envelope at angular frequency `omega`, normalised so that
    /// `∫|α|² dω = 1` over the real line.
    pub fn amplitude(&self, omega: f64) -> Complex64 {
        let sigma = self.sigma_omega();
        let delta = omega - self.center_omega();
        let h = hermite_function(self.order, delta / sigma) / sigma.sqrt();
        if self.chirp_s2 == 0.0 {
            Complex64::new(h, 0.0)
        } else {
            Complex64::from_polar(h, 0.5 * self.chirp_s2 * delta * delta)
        }
    }
}

/// Samples of the envelope on `axis_omega`, rescaled so that the trapezoid
/// rule gives `Σ|α|²·w = 1` on that axis.
pub fn pump_envelope(pump: &PumpEnvelope, axis_omega: &[f64]) -> Result<Vec<Complex64>> {
    pump.validate()?;
    let c = pump.center_omega();
    let s = pump.sigma_omega();
    let (lo, hi) = axis_omega
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if lo > c - 5.0 * s || hi < c + 5.0 * s {
        return Err(Error::Normalization(format!(
            "axis [{lo:.6e}, {hi:.6e}] rad/s does not span ±5σ around {c:.6e} (σ = {s:.3e})"
        )));
    }
    let mut samples: Vec<Complex64> = axis_omega.iter().map(|&w| pump.amplitude(w)).collect();
    let weights = trapezoid_weights(axis_omega);
    let norm: f64 = samples.iter().zip(&weights).map(|(a, w)| a.norm_sqr() * w).sum();
    if !(norm > 0.0) {
        return Err(Error::Normalization("envelope vanishes on the axis".into()));
    }
    let scale = norm.sqrt();
    samples.iter_mut().for_each(|a| *a /= scale);
    Ok(samples)
}

/// Orthonormal Hermite function `ψ_n(x) = (2ⁿ n! √π)^{-1/2} H_n(x) e^{-x²/2}`
/// by the stable three-term recurrence.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
