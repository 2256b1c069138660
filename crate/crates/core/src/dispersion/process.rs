use serde::{Deserialize, Serialize};

use super::sellmeier::Polarization;
use crate::error::{Error, Result};
use crate::units::nm_to_omega;

/// Relative tolerance on `1/λo = 1/λs + 1/λp`.
pub const ENERGY_CONSERVATION_RTOL: f64 = 1e-9;

/// Operating point of the three-wave process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProcessConfig", into = "RawProcessConfig")]
pub struct ProcessConfig {
    signal_nm: f64,
    pump_nm: f64,
    output_nm: f64,
    pub poling_period_um: f64,
    pub temperature_c: f64,
    length_mm: f64,
    qpm_order: u32,
    /// Crystal axes of (signal, pump, output).
    pub polarization: [Polarization; 3],
    /// Constant mismatch added to the material Δβ (1/m); absorbs the
    /// waveguide contribution to the effective index.
    pub delta_beta_offset_per_m: f64,
    /// Δβ change per µm of waveguide width deviation, (1/m)/µm.
    pub width_sensitivity_per_m_per_um: Option<f64>,
}

impl ProcessConfig {
    /// Builds a config whose output wavelength follows from energy conservation.
    pub fn new(
        signal_nm: f64,
        pump_nm: f64,
        poling_period_um: f64,
        temperature_c: f64,
        length_mm: f64,
    ) -> Result<Self> {
        let output_nm = 1.0 / (1.0 / signal_nm + 1.0 / pump_nm);
        let cfg = Self {
            signal_nm,
            pump_nm,
            output_nm,
            poling_period_um,
            temperature_c,
            length_mm,
            qpm_order: 1,
            polarization: [Polarization::Ordinary, Polarization::Extraordinary, Polarization::Ordinary],
            delta_beta_offset_per_m: 0.0,
            width_sensitivity_per_m_per_um: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("signal_nm", self.signal_nm), ("pump_nm", self.pump_nm), ("output_nm", self.output_nm)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let lhs = 1.0 / self.output_nm;
        let rhs = 1.0 / self.signal_nm + 1.0 / self.pump_nm;
        if ((lhs - rhs) / rhs).abs() > ENERGY_CONSERVATION_RTOL {
            return Err(Error::Config(format!(
                "energy conservation violated: 1/{} != 1/{} + 1/{}",
                self.output_nm, self.signal_nm, self.pump_nm
            )));
        }
        if !(self.length_mm > 0.0) {
            return Err(Error::Config(format!("length_mm must be > 0, got {}", self.length_mm)));
        }
        if !(self.poling_period_um > 0.0) {
            return Err(Error::Config(format!(
                "poling_period_um must be > 0, got {}",
                self.poling_period_um
            )));
        }
        if self.qpm_order.is_multiple_of(2) {
            return Err(Error::Config(format!("qpm_order must be odd, got {}", self.qpm_order)));
        }
        if !self.delta_beta_offset_per_m.is_finite() {
            return Err(Error::Config("delta_beta_offset_per_m must be finite".into()));
        }
        if let Some(s) = self.width_sensitivity_per_m_per_um {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Config(format!("width sensitivity must be > 0, got {s}")));
            }
        }
        Ok(())
    }

    pub fn signal_nm(&self) -> f64 {
        self.signal_nm
    }

    pub fn pump_nm(&self) -> f64 {
        self.pump_nm
    }

    pub fn output_nm(&self) -> f64 {
        self.output_nm
    }

    pub fn length_mm(&self) -> f64 {
        self.length_mm
    }

    pub fn length_m(&self) -> f64 {
        self.length_mm * 1e-3
    }

    pub fn qpm_order(&self) -> u32 {
        self.qpm_order
    }

    pub fn signal_omega(&self) -> f64 {
        nm_to_omega(self.signal_nm)
    }

    pub fn pump_omega(&self) -> f64 {
        nm_to_omega(self.pump_nm)
    }

    /// Output centre frequency, `ω_s + ω_p` by construction.
    pub fn output_omega(&self) -> f64 {
        self.signal_omega() + self.pump_omega()
    }

    /// Grating wavevector `2π·order/Λ` in 1/m.
    pub fn grating_wavevector(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.qpm_order as f64 / (self.poling_period_um * 1e-6)
    }

    /// Moves the centre wavelengths; the output follows from energy conservation.
    pub fn with_wavelengths(mut self, signal_nm: f64, pump_nm: f64) -> Result<Self> {
        self.signal_nm = signal_nm;
        self.pump_nm = pump_nm;
        self.output_nm = 1.0 / (1.0 / signal_nm + 1.0 / pump_nm);
        self.validate()?;
        Ok(self)
    }

    pub fn with_length_mm(mut self, length_mm: f64) -> Result<Self> {
        self.length_mm = length_mm;
        self.validate()?;
        Ok(self)
    }

    pub fn with_temperature_c(mut self, temperature_c: f64) -> Self {
        self.temperature_c = temperature_c;
        self
    }

    pub fn with_qpm_order(mut self, order: u32) -> Result<Self> {
        self.qpm_order = order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_offset(mut self, delta_beta_offset_per_m: f64) -> Self {
        self.delta_beta_offset_per_m = delta_beta_offset_per_m;
        self
    }

    pub fn with_width_sensitivity(mut self, sensitivity: f64) -> Result<Self> {
        self.width_sensitivity_per_m_per_um = Some(sensitivity);
        self.validate()?;
        Ok(self)
    }
}

/// File representation: the output wavelength may be omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcessConfig {
    signal_nm: f64,
    pump_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output_nm: Option<f64>,
    poling_period_um: f64,
    temperature_c: f64,
    length_mm: f64,
    #[serde(default = "default_order")]
    qpm_order: u32,
    #[serde(default = "default_polarization")]
    polarization: [Polarization; 3],
    #[serde(default)]
    delta_beta_offset_per_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width_sensitivity_per_m_per_um: Option<f64>,
}

fn default_order() -> u32 {
    1
}

fn default_polarization() -> [Polarization; 3] {
    [Polarization::Ordinary, Polarization::Extraordinary, Polarization::Ordinary]
}

impl TryFrom<RawProcessConfig> for ProcessConfig {
    type Error = Error;

    fn try_from(raw: RawProcessConfig) -> Result<Self> {
        let output_nm = raw
            .output_nm
            .unwrap_or_else(|| 1.0 / (1.0 / raw.signal_nm + 1.0 / raw.pump_nm));
        let cfg = ProcessConfig {
            signal_nm: raw.signal_nm,
            pump_nm: raw.pump_nm,
            output_nm,
            poling_period_um: raw.poling_period_um,
            temperature_c: raw.temperature_c,
            length_mm: raw.length_mm,
            qpm_order: raw.qpm_order,
            polarization: raw.polarization,
            delta_beta_offset_per_m: raw.delta_beta_offset_per_m,
            width_sensitivity_per_m_per_um: raw.width_sensitivity_per_m_per_um,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<ProcessConfig> for RawProcessConfig {
    fn from(c: ProcessConfig) -> Self {
        RawProcessConfig {
            signal_nm: c.signal_nm,
            pump_nm: c.pump_nm,
            output_nm: Some(c.output_nm),
            poling_period_um: c.poling_period_um,
            temperature_c: c.temperature_c,
            length_mm: c.length_mm,
            qpm_order: c.qpm_order,
            polarization: c.polarization,
            delta_beta_offset_per_m: c.delta_beta_offset_per_m,
            width_sensitivity_per_m_per_um: c.width_sensitivity_per_m_per_um,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_from_energy_conservation() {
        let c = ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 71.0).unwrap();
        let lhs = 1.0 / c.output_nm();
        let rhs = 1.0 / 1550.0 + 1.0 / 850.0;
        assert!(((lhs - rhs) / rhs).abs() < 1e-15);
        assert!((c.output_omega() - c.signal_omega() - c.pump_omega()).abs() <= 1e-15 * c.output_omega());
    }

    #[test]
    fn rejects_inconsistent_output() {
        let toml_src = r#"
            signal_nm = 1550.0
            pump_nm = 850.0
            output_nm = 550.0
            poling_period_um = 4.4
            temperature_c = 200.0
            length_mm = 71.0
        "#;
        let err = toml::from_str::<ProcessConfig>(toml_src).unwrap_err();
        assert!(err.to_string().contains("energy conservation"), "{err}");
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 0.0).is_err());
        assert!(ProcessConfig::new(1550.0, 850.0, -1.0, 200.0, 71.0).is_err());
        let c = ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 71.0).unwrap();
        assert!(c.with_qpm_order(2).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = ProcessConfig::new(1550.0, 841.0, 4.4, 200.0, 71.0)
            .unwrap()
            .with_offset(12.5);
        let s = toml::to_string(&c).unwrap();
        let back: ProcessConfig = toml::from_str(&s).unwrap();
        assert_eq!(c, back);
    }
}
