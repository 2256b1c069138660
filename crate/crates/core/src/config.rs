//! TOML experiment files.
//!
//! ```toml
//! [process]
//! signal_nm = 1550.0
//! pump_nm = 850.0
//! poling_period_um = 4.4
//! temperature_c = 200.0
//! length_mm = 71.0
//!
//! [dispersion]
//! kind = "sellmeier"          # or "ideal_gvm", "taylor"
//! match_at_center = true
//!
//! [scan]
//! kind = "output"             # or "signal"
//! start_nm = 549.0
//! stop_nm = 550.0
//! points = 2001
//!
//! [resolution]
//! fwhm_nm = 0.03
//! ```
//!
//! Every section except `[process]` is optional.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::{PumpPolicy, SweepOptions};
use crate::dispersion::{phase_matched_at_center, DispersionModel, ProcessConfig, SellmeierModel, TaylorDispersionModel};
use crate::error::{Error, Result};
use crate::inverse::GaConfig;
use crate::modes::{GridOptions, ProjectionOptions, PumpEnvelope};
use crate::phasematch::{ResolutionKernel, Scan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Sellmeier,
    /// Sellmeier expansion made group-velocity matched and dispersion free.
    IdealGvm,
    /// Explicit Taylor coefficients from `[dispersion.taylor]`.
    Taylor,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionSection {
    pub kind: ModelKind,
    /// Coefficient override for the Sellmeier backend.
    pub sellmeier: Option<SellmeierModel>,
    pub taylor: Option<TaylorDispersionModel>,
    /// Shift the constant offset so the centre wavelengths are phase matched.
    pub match_at_center: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Signal,
    Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub kind: ScanKind,
    pub start_nm: f64,
    pub stop_nm: f64,
    pub points: usize,
    /// Held wavelength: the pump for signal scans, the signal for output
    /// scans. Defaults to the process value.
    pub fixed_nm: Option<f64>,
}

impl ScanSection {
    pub fn to_scan(&self, process: &ProcessConfig) -> Result<Scan> {
        if self.points < 2 {
            return Err(Error::Config(format!("scan needs at least 2 points, got {}", self.points)));
        }
        if !(self.start_nm > 0.0 && self.stop_nm > 0.0) || self.start_nm == self.stop_nm {
            return Err(Error::Config(format!("invalid scan range [{}, {}] nm", self.start_nm, self.stop_nm)));
        }
        Ok(match self.kind {
            ScanKind::Signal => Scan::signal_linspace(
                self.start_nm,
                self.stop_nm,
                self.points,
                self.fixed_nm.unwrap_or(process.pump_nm()),
            ),
            ScanKind::Output => Scan::output_linspace(
                self.start_nm,
                self.stop_nm,
                self.points,
                self.fixed_nm.unwrap_or(process.signal_nm()),
            ),
        })
    }
}

/// Instrument resolution, σ or FWHM in nm; at most one may be given.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolutionSection {
    pub sigma_nm: Option<f64>,
    pub fwhm_nm: Option<f64>,
}

impl ResolutionSection {
    pub fn kernel(&self) -> Result<ResolutionKernel> {
        match (self.sigma_nm, self.fwhm_nm) {
            (Some(_), Some(_)) => Err(Error::Config("give either sigma_nm or fwhm_nm, not both".into())),
            (Some(s), None) => ResolutionKernel::new(s),
            (None, Some(f)) => ResolutionKernel::from_fwhm(f),
            (None, None) => Ok(ResolutionKernel::identity()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// Measured spectrum CSV, relative to the config file.
    pub measurement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub lengths_mm: Vec<f64>,
    pub pump: PumpPolicy,
    pub ideal_gvm: bool,
    pub max_power_w: f64,
    pub power_points: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            lengths_mm: (1..=8).map(|k| 10.0 * k as f64).collect(),
            pump: PumpPolicy::default(),
            ideal_gvm: true,
            max_power_w: 0.2,
            power_points: 201,
        }
    }
}

impl BenchSection {
    pub fn sweep_options(&self, projection: ProjectionOptions) -> SweepOptions {
        SweepOptions { pump: self.pump, ideal_gvm: self.ideal_gvm, projection }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub process: ProcessConfig,
    #[serde(default)]
    pub dispersion: DispersionSection,
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub resolution: ResolutionSection,
    pub pump: Option<PumpEnvelope>,
    #[serde(default)]
    pub grid: GridOptions,
    #[serde(default)]
    pub projection: ProjectionOptions,
    #[serde(default)]
    pub ga: GaConfig,
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub bench: BenchSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1)).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }
        })?;
        cfg.ga.validate()?;
        if let Some(p) = &cfg.pump {
            p.validate()?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Process and dispersion model, with the centre phase matched when
    /// requested.
    pub fn resolve(&self) -> Result<(ProcessConfig, DispersionModel)> {
        resolve_model(&self.process, &self.dispersion)
    }
}

pub fn resolve_model(process: &ProcessConfig, section: &DispersionSection) -> Result<(ProcessConfig, DispersionModel)> {
    let sellmeier = section.sellmeier.clone().unwrap_or_default();
    let model = match section.kind {
        ModelKind::Sellmeier => DispersionModel::Sellmeier(sellmeier),
        ModelKind::IdealGvm => DispersionModel::Taylor(TaylorDispersionModel::ideal_qpg(process, &sellmeier)?),
        ModelKind::Taylor => DispersionModel::Taylor(
            section
                .taylor
                .clone()
                .ok_or_else(|| Error::Config("kind = \"taylor\" needs a [dispersion.taylor] table".into()))?,
        ),
    };
    let process = if section.match_at_center { phase_matched_at_center(process, &model)? } else { process.clone() };
    Ok((process, model))
}
