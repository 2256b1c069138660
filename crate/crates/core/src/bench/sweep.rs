use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::ideal_fwhm_nm;
use crate::dispersion::{DispersionModel, ProcessConfig, TaylorDispersionModel};
use crate::error::Result;
use crate::modes::{
    extinction_ratio, mode_projection_power, pm_width_omega, ProjectionOptions, PumpEnvelope, SpectralWidth,
};
use crate::numeric::golden_section_min;

/// Pump σ used at each length of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PumpPolicy {
    /// The same pump at every length.
    Fixed { sigma: SpectralWidth },
    /// Golden-section search for the σ that maximises extinction, over
    /// `[lo, hi]` × the phase-matching 1/e half-width.
    Optimized { lo: f64, hi: f64 },
}

impl Default for PumpPolicy {
    fn default() -> Self {
        PumpPolicy::Fixed { sigma: SpectralWidth::RadPerS(2.0 * std::f64::consts::PI * 963e9) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    pub pump: PumpPolicy,
    /// Evaluate extinction on the group-velocity-matched, dispersion-free
    /// expansion of a Sellmeier model instead of the full model.
    pub ideal_gvm: bool,
    pub projection: ProjectionOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { pump: PumpPolicy::default(), ideal_gvm: true, projection: ProjectionOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length_mm: f64,
    pub fwhm_nm: f64,
    pub pm_width_ghz: f64,
    pub pump_sigma_ghz: f64,
    /// Order-1 versus order-0 projection extinction, dB.
    pub extinction_db: f64,
}

/// Ideal-device FWHM and extinction across lengths. Rows follow `lengths_mm`.
pub fn sweep_length(
    template: &ProcessConfig,
    model: &DispersionModel,
    lengths_mm: &[f64],
    options: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    lengths_mm.par_iter().map(|&l| sweep_point(template, model, l, options)).collect()
}

fn sweep_point(template: &ProcessConfig, model: &DispersionModel, length_mm: f64, options: &SweepOptions) -> Result<SweepRow> {
    let cfg = crate::dispersion::phase_matched_at_center(&template.clone().with_length_mm(length_mm)?, model)?;
    let fwhm_nm = ideal_fwhm_nm(&cfg, model, length_mm)?;
    let ext_model = match (model, options.ideal_gvm) {
        (DispersionModel::Sellmeier(s), true) => DispersionModel::Taylor(TaylorDispersionModel::ideal_qpg(&cfg, s)?),
        _ => model.clone(),
    };
    let width = pm_width_omega(&cfg, &ext_model)?;
    let extinction = |sigma: f64| -> Result<f64> {
        let pump = PumpEnvelope::gaussian(cfg.pump_nm(), SpectralWidth::RadPerS(sigma)).with_order(1);
        let p = mode_projection_power(&cfg, &ext_model, None, &pump, &options.projection)?;
        extinction_ratio(p.p_n, p.p_0)
    };
    let (sigma, extinction_db) = match options.pump {
        PumpPolicy::Fixed { sigma } => {
            let s = PumpEnvelope::gaussian(cfg.pump_nm(), sigma).sigma_omega();
            (s, extinction(s)?)
        }
        PumpPolicy::Optimized { lo, hi } => {
            let (log_s, neg) = golden_section_min(
                |log_s| extinction(log_s.exp()).map(|e| -e),
                (lo * width).ln(),
                (hi * width).ln(),
                1e-4,
                200,
            )?;
            (log_s.exp(), -neg)
        }
    };
    Ok(SweepRow {
        length_mm,
        fwhm_nm,
        pm_width_ghz: width / (2.0 * std::f64::consts::PI * 1e9),
        pump_sigma_ghz: sigma / (2.0 * std::f64::consts::PI * 1e9),
        extinction_db,
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("length_mm,fwhm_nm,pm_width_ghz,pump_sigma_ghz,extinction_db\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.6e},{:.6e},{:.6e},{:.6}\n",
            r.length_mm, r.fwhm_nm, r.pm_width_ghz, r.pump_sigma_ghz, r.extinction_db
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fwhm_halves_per_doubling() {
        let cfg = ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 10.0).unwrap();
        let model = DispersionModel::default();
        let rows = sweep_length(&cfg, &model, &[10.0, 20.0], &SweepOptions::default()).unwrap();
        assert!((rows[0].fwhm_nm / rows[1].fwhm_nm - 2.0).abs() < 0.02);
        assert!(rows[1].extinction_db > rows[0].extinction_db);
    }
}
