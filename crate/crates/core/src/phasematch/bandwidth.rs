use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthMetric {
    /// Full width between the half-maximum crossings of the main lobe.
    Fwhm,
    /// Half width at 1/e of the peak intensity (the σ convention).
    OneOverE,
}

/// Width of the main lobe in axis units, crossings found by linear
/// interpolation walking outward from the global maximum.
pub fn bandwidth(spectrum: &Spectrum, metric: BandwidthMetric) -> Result<f64> {
    let (ip, peak) = spectrum.peak();
    if !(peak > 0.0) {
        return Err(Error::Degenerate("spectrum has no positive peak".into()));
    }
    let level_frac = match metric {
        BandwidthMetric::Fwhm => 0.5,
        BandwidthMetric::OneOverE => (-1.0f64).exp(),
    };
    let label = match metric {
        BandwidthMetric::Fwhm => "half-maximum",
        BandwidthMetric::OneOverE => "1/e",
    };
    let level = peak * level_frac;
    let x = spectrum.axis();
    let y = spectrum.intensity();

    let crossing = |range: &mut dyn Iterator<Item = (usize, usize)>, side: &'static str| -> Result<f64> {
        for (inner, outer) in range {
            if y[outer] < level {
                let t = (y[inner] - level) / (y[inner] - y[outer]);
                return Ok(x[inner] + t * (x[outer] - x[inner]));
            }
        }
        Err(Error::NoCrossing { level: label, side })
    };
    let left = crossing(&mut (1..=ip).rev().map(|o| (o, o - 1)), "left")?;
    let right = crossing(&mut (ip..y.len() - 1).map(|i| (i, i + 1)), "right")?;
    let full = (right - left).abs();
    Ok(match metric {
        BandwidthMetric::Fwhm => full,
        BandwidthMetric::OneOverE => full / 2.0,
    })
}
