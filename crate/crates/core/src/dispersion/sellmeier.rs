//! Temperature-dependent Sellmeier index model.
//!
//! The functional form is the one used for congruent lithium niobate by
//! Edwards & Lawrence (Opt. Quantum Electron. 16, 373, 1984):
//!
//! ```text
//! n² = a1 + (a2 + b1·F) / (λ² − (a3 + b2·F)²) + b3·F − a4·λ²
//! F  = (T − t_ref)(T + t_sum)
//! ```
//!
//! with λ in µm and T in °C. The shipped defaults are the published
//! congruent-LiNbO3 coefficients for both crystal axes.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Crystal axis seen by a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "o", alias = "ordinary")]
    Ordinary,
    #[serde(rename = "e", alias = "extraordinary")]
    Extraordinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierAxis {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    pub ordinary: SellmeierAxis,
    pub extraordinary: SellmeierAxis,
    /// Reference temperature of the thermal factor (°C).
    pub t_ref_c: f64,
    /// Additive constant in the second factor of F (°C).
    pub t_sum_c: f64,
    /// Validity range in µm.
    pub wavelength_range_um: (f64, f64),
    /// Validity range in °C.
    pub temperature_range_c: (f64, f64),
}

impl Default for SellmeierModel {
    fn default() -> Self {
        Self::congruent_lithium_niobate()
    }
}

impl SellmeierModel {
    /// Congruent LiNbO3, Edwards & Lawrence (1984).
    pub fn congruent_lithium_niobate() -> Self {
        Self {
            ordinary: SellmeierAxis {
                a1: 4.9048,
                a2: 0.11775,
                a3: 0.21802,
                a4: 0.027153,
                b1: 2.2314e-8,
                b2: -2.9671e-8,
                b3: 2.1429e-8,
            },
            extraordinary: SellmeierAxis {
                a1: 4.5820,
                a2: 0.099169,
                a3: 0.21090,
                a4: 0.021940,
                b1: 5.2716e-8,
                b2: -4.9143e-8,
                b3: 2.2971e-7,
            },
            t_ref_c: 24.5,
            t_sum_c: 570.5,
            wavelength_range_um: (0.4, 3.0),
            temperature_range_c: (-20.0, 250.0),
        }
    }

    pub fn axis(&self, polarization: Polarization) -> &SellmeierAxis {
        match polarization {
            Polarization::Ordinary => &self.ordinary,
            Polarization::Extraordinary => &self.extraordinary,
        }
    }

    /// Refractive index at a vacuum wavelength (nm) and temperature (°C).
    pub fn refractive_index(
        &self,
        wavelength_nm: f64,
        temperature_c: f64,
        polarization: Polarization,
    ) -> Result<f64> {
        let lambda_um = wavelength_nm * 1e-3;
        let (lo, hi) = self.wavelength_range_um;
        check_range("wavelength_um", lambda_um, lo, hi)?;
        let (tlo, thi) = self.temperature_range_c;
        check_range("temperature_c", temperature_c, tlo, thi)?;
        let n2 = self.index_squared(lambda_um, temperature_c, polarization);
        if !(n2 > 1.0) || !n2.is_finite() {
            return Err(Error::Degenerate(format!(
                "Sellmeier evaluation gave n² = {n2} at {wavelength_nm} nm, {temperature_c} °C"
            )));
        }
        Ok(n2.sqrt())
    }

    fn index_squared(&self, lambda_um: f64, temperature_c: f64, polarization: Polarization) -> f64 {
        let c = self.axis(polarization);
        let f = (temperature_c - self.t_ref_c) * (temperature_c + self.t_sum_c);
        let l2 = lambda_um * lambda_um;
        let pole = c.a3 + c.b2 * f;
        c.a1 + (c.a2 + c.b1 * f) / (l2 - pole * pole) + c.b3 * f - c.a4 * l2
    }

    /// Wavenumber `n·ω/c` in 1/m at angular frequency `omega` (rad/s).
    pub fn wavenumber(&self, omega: f64, temperature_c: f64, polarization: Polarization) -> Result<f64> {
        let wavelength_nm = crate::units::omega_to_nm(omega);
        let n = self.refractive_index(wavelength_nm, temperature_c, polarization)?;
        Ok(n * omega / crate::units::SPEED_OF_LIGHT)
    }
}
