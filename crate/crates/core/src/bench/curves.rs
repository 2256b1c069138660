use serde::{Deserialize, Serialize};

use super::table::LiteratureEntry;
use crate::efficiency::{efficiency_curve, unit_efficiency_power};
use crate::error::Result;

/// Figures of the characterised device that the literature table does not
/// carry: the η_norm fitted from depletion data and the measured operating
/// point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceFigures {
    pub eta_norm: f64,
    pub measured_power_w: f64,
    pub measured_efficiency: f64,
}

impl Default for DeviceFigures {
    fn default() -> Self {
        Self { eta_norm: 1.15, measured_power_w: 0.004, measured_efficiency: 0.18 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCurve {
    pub citation: String,
    pub length_mm: f64,
    pub eta_norm: f64,
    pub unit_efficiency_power_w: f64,
    pub powers_w: Vec<f64>,
    pub efficiency: Vec<f64>,
    /// `(power_W, efficiency)` measured on this device, if any.
    pub measured: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub curves: Vec<EfficiencyCurve>,
    pub warnings: Vec<String>,
}

/// `η(P)` for every entry with an η_norm; the flagged device entry takes
/// its η_norm and measured point from `device` when given.
pub fn efficiency_curves(
    entries: &[LiteratureEntry],
    powers_w: &[f64],
    device: Option<&DeviceFigures>,
) -> Result<CurveSet> {
    let mut set = CurveSet { curves: Vec::new(), warnings: Vec::new() };
    for e in entries {
        let device = device.filter(|_| e.this_device);
        let Some(eta_norm) = device.map(|d| d.eta_norm).or(e.eta_norm) else {
            set.warnings.push(format!("{} ({} mm): no η_norm, skipped", e.citation, e.length_mm));
            continue;
        };
        let length_cm = e.length_mm / 10.0;
        set.curves.push(EfficiencyCurve {
            citation: e.citation.clone(),
            length_mm: e.length_mm,
            eta_norm,
            unit_efficiency_power_w: unit_efficiency_power(eta_norm, length_cm)?,
            powers_w: powers_w.to_vec(),
            efficiency: efficiency_curve(eta_norm, length_cm, powers_w)?,
            measured: device.map(|d| (d.measured_power_w, d.measured_efficiency)),
        });
    }
    Ok(set)
}

impl CurveSet {
    /// Long-format plot data: one `(curve, power_W, efficiency)` row per sample.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("curve,power_W,efficiency\n");
        for c in &self.curves {
            for (p, e) in c.powers_w.iter().zip(&c.efficiency) {
                s.push_str(&format!("{},{p:.6e},{e:.10e}\n", c.citation));
            }
        }
        s
    }
}
