use std::io::Read;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pump::PumpEnvelope;
use crate::dispersion::{delta_beta, output_slope, DeltaBetaProfile, DispersionModel, ProcessConfig};
use crate::error::{Error, Result};
use crate::numeric::{brent_root, is_strictly_monotone, linspace, sinc};
use crate::phasematch::pm_sections;

/// Joint spectral amplitude sampled on a (signal × output) grid. Entry
/// `(i, j)` belongs to `signal_omega[i]` and `output_omega[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    signal_omega: Vec<f64>,
    output_omega: Vec<f64>,
    amplitude: DMatrix<Complex64>,
}

impl JsaGrid {
    pub fn new(signal_omega: Vec<f64>, output_omega: Vec<f64>, amplitude: DMatrix<Complex64>) -> Result<Self> {
        for (name, axis) in [("signal", &signal_omega), ("output", &output_omega)] {
            if axis.len() < 2 || !is_strictly_monotone(axis) {
                return Err(Error::Config(format!("{name} axis must be strictly monotone with ≥ 2 points")));
            }
        }
        if amplitude.shape() != (signal_omega.len(), output_omega.len()) {
            return Err(Error::Config(format!(
                "amplitude is {:?} but the axes are {} × {}",
                amplitude.shape(),
                signal_omega.len(),
                output_omega.len()
            )));
        }
        Ok(Self { signal_omega, output_omega, amplitude })
    }

    /// Grid filled from an arbitrary amplitude function `f(ω_s, ω_o)`.
    pub fn from_fn<F>(signal_omega: Vec<f64>, output_omega: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let amplitude = DMatrix::from_fn(signal_omega.len(), output_omega.len(), |i, j| {
            f(signal_omega[i], output_omega[j])
        });
        Self::new(signal_omega, output_omega, amplitude)
    }

    pub fn signal_omega(&self) -> &[f64] {
        &self.signal_omega
    }

    pub fn output_omega(&self) -> &[f64] {
        &self.output_omega
    }

    pub fn amplitude(&self) -> &DMatrix<Complex64> {
        &self.amplitude
    }

    pub fn intensity(&self) -> DMatrix<f64> {
        self.amplitude.map(|a| a.norm_sqr())
    }

    /// Intensity grid as CSV: one row per signal sample, one column per
    /// output sample, no header.
    pub fn intensity_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.amplitude.nrows() {
            let row: Vec<String> =
                (0..self.amplitude.ncols()).map(|j| format!("{:.10e}", self.amplitude[(i, j)].norm_sqr())).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Complex amplitude as `signal_omega,output_omega,re,im` rows, signal
    /// major.
    pub fn amplitude_csv(&self) -> String {
        let mut out = String::from("signal_omega,output_omega,re,im\n");
        for (i, ws) in self.signal_omega.iter().enumerate() {
            for (j, wo) in self.output_omega.iter().enumerate() {
                let a = self.amplitude[(i, j)];
                out.push_str(&format!("{ws:.17e},{wo:.17e},{:.17e},{:.17e}\n", a.re, a.im));
            }
        }
        out
    }

    /// Parses [`JsaGrid::amplitude_csv`] output. Rows must be signal major
    /// with the same output axis for every signal sample.
    pub fn read_amplitude_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::from_csv(e, 1))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["signal_omega", "output_omega", "re", "im"] {
            return Err(Error::Parse { line: 1, message: "expected header 'signal_omega,output_omega,re,im'".into() });
        }
        let mut signal: Vec<f64> = Vec::new();
        let mut output: Vec<f64> = Vec::new();
        let mut values = Vec::new();
        for record in rdr.deserialize::<(f64, f64, f64, f64)>() {
            let (ws, wo, re, im) = record.map_err(|e| Error::from_csv(e, 0))?;
            let line = values.len() + 2;
            if signal.last() != Some(&ws) {
                signal.push(ws);
            }
            let j = values.len() % output.len().max(1);
            if signal.len() == 1 {
                output.push(wo);
            } else if output.get(j) != Some(&wo) {
                return Err(Error::Parse { line, message: format!("output axis value {wo} does not repeat the first block") });
            }
            values.push(Complex64::new(re, im));
        }
        if values.len() != signal.len() * output.len() {
            return Err(Error::Parse { line: values.len() + 1, message: "incomplete grid".into() });
        }
        let amplitude = DMatrix::from_row_slice(signal.len(), output.len(), &values);
        Self::new(signal, output, amplitude)
    }

    pub fn sidecar(&self) -> JsaSidecar {
        JsaSidecar {
            rows: "signal_omega_rad_per_s".into(),
            columns: "output_omega_rad_per_s".into(),
            signal_omega: self.signal_omega.clone(),
            output_omega: self.output_omega.clone(),
        }
    }
}

/// Axis description written next to an exported intensity grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsaSidecar {
    pub rows: String,
    pub columns: String,
    pub signal_omega: Vec<f64>,
    pub output_omega: Vec<f64>,
}

/// Sampling of the JSA grid around the design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridOptions {
    pub signal_points: usize,
    pub output_points: usize,
    /// Signal half-span in pump σ.
    pub signal_span_sigma: f64,
    /// Output half-span in phase-matching 1/e half-widths, capped at 10 pump σ.
    pub output_span_widths: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { signal_points: 512, output_points: 512, signal_span_sigma: 5.0, output_span_widths: 8.0 }
    }
}

/// Root of `sinc²(x) = level` on the main lobe.
pub fn sinc2_crossing(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("sinc² level must be in (0, 1), got {level}")));
    }
    brent_root(|x| Ok(sinc(x).powi(2) - level), 1e-9, std::f64::consts::PI, 1e-14, 200)
}

/// 1/e half-width (rad/s) of the ideal phase-matching intensity along the
/// output axis at fixed signal. Infinite when Δβ does not depend on the
/// output frequency.
pub fn pm_width_omega(config: &ProcessConfig, model: &DispersionModel) -> Result<f64> {
    let slope = output_slope(config, model)?.abs();
    let x = sinc2_crossing((-1.0f64).exp())?;
    Ok(if slope > 0.0 { 2.0 * x / (config.length_m() * slope) } else { f64::INFINITY })
}

/// Signal and output axes centred on the config's signal and on
/// `ω_s + ω_pump-centre`.
pub fn jsa_axes(
    config: &ProcessConfig,
    model: &DispersionModel,
    pump: &PumpEnvelope,
    options: &GridOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    pump.validate()?;
    if options.signal_points < 2 || options.output_points < 2 {
        return Err(Error::Config("grid needs at least 2 points per axis".into()));
    }
    let sigma = pump.sigma_omega();
    let ws = config.signal_omega();
    let wo = ws + pump.center_omega();
    let half_s = options.signal_span_sigma * sigma;
    let half_o = (options.output_span_widths * pm_width_omega(config, model)?).min(10.0 * sigma);
    Ok((
        linspace(ws - half_s, ws + half_s, options.signal_points),
        linspace(wo - half_o, wo + half_o, options.output_points),
    ))
}

/// `JSA(i, j) = φ(ω_s_i, ω_o_j)·α(ω_o_j − ω_s_i)`.
///
/// The pump frequencies `ω_o − ω_s` spanned by the grid must cover the pump
/// centre ± 5σ.
pub fn build_jsa(
    config: &ProcessConfig,
    model: &DispersionModel,
    profile: Option<&DeltaBetaProfile>,
    pump: &PumpEnvelope,
    signal_omega: Vec<f64>,
    output_omega: Vec<f64>,
) -> Result<JsaGrid> {
    pump.validate()?;
    let (s_lo, s_hi) = bounds(&signal_omega);
    let (o_lo, o_hi) = bounds(&output_omega);
    let c = pump.center_omega();
    let sigma = pump.sigma_omega();
    if o_lo - s_hi > c - 5.0 * sigma || o_hi - s_lo < c + 5.0 * sigma {
        return Err(Error::Support(format!(
            "pump frequencies [{:.6e}, {:.6e}] rad/s miss the pump centre ± 5σ ({c:.6e} ± {:.3e})",
            o_lo - s_hi,
            o_hi - s_lo,
            5.0 * sigma
        )));
    }
    let (lengths, offsets) = match profile {
        Some(p) => {
            if (p.length_mm() - config.length_mm()).abs() > 1e-9 * config.length_mm() {
                return Err(Error::Profile(format!(
                    "profile spans {} mm but the device is {} mm long",
                    p.length_mm(),
                    config.length_mm()
                )));
            }
            (p.section_lengths_m(), p.offsets_per_m().to_vec())
        }
        None => (vec![config.length_m()], vec![0.0]),
    };
    let rows: Vec<Vec<Complex64>> = signal_omega
        .par_iter()
        .map(|&ws| {
            output_omega
                .iter()
                .map(|&wo| {
                    let wp = wo - ws;
                    let a = pump.amplitude(wp);
                    if a.norm_sqr() == 0.0 {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    let db = delta_beta(config, model, ws, wp)?;
                    Ok(pm_sections(&lengths, &offsets, db) * a)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let amplitude = DMatrix::from_fn(signal_omega.len(), output_omega.len(), |i, j| rows[i][j]);
    JsaGrid::new(signal_omega, output_omega, amplitude)
}

fn bounds(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{SellmeierModel, TaylorDispersionModel};
    use crate::modes::pump::SpectralWidth;

    #[test]
    fn amplitude_csv_round_trip() {
        let g = JsaGrid::from_fn(vec![1.0, 2.0, 3.5], vec![-1.0, 0.25], |a, b| Complex64::new(a * b, a - b)).unwrap();
        let back = JsaGrid::read_amplitude_csv(g.amplitude_csv().as_bytes()).unwrap();
        assert_eq!(g, back);
        let broken = "signal_omega,output_omega,re,im\n1,0,1,0\n1,1,1,0\n2,0,1,0\n2,5,1,0\n";
        assert!(matches!(JsaGrid::read_amplitude_csv(broken.as_bytes()), Err(Error::Parse { line: 5, .. })));
        let bad = "signal_omega,output_omega,re,im\n1,0,x,0\n";
        assert!(matches!(JsaGrid::read_amplitude_csv(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    fn device() -> (ProcessConfig, SellmeierModel) {
        let cfg = ProcessConfig::new(1550.0, 852.0, 4.4, 200.0, 71.0).unwrap();
        (cfg, SellmeierModel::default())
    }

    #[test]
    fn sinc2_levels() {
        assert!((sinc2_crossing(0.5).unwrap() - 1.391_557_4).abs() < 1e-6);
        assert!((sinc2_crossing((-1.0f64).exp()).unwrap() - 1.644_3).abs() < 1e-4);
    }

    #[test]
    fn flat_phase_matching_gives_antidiagonal_ridge() {
        let (cfg, _) = device();
        let model = DispersionModel::Taylor(TaylorDispersionModel::constant(cfg.signal_omega(), cfg.pump_omega(), 0.0));
        let pump = PumpEnvelope::gaussian(cfg.pump_nm(), SpectralWidth::Nm(1.0));
        let s = pump.sigma_omega();
        let ws = cfg.signal_omega();
        let wo = ws + pump.center_omega();
        let sig = linspace(ws - 6.0 * s, ws + 6.0 * s, 61);
        let out = linspace(wo - 6.0 * s, wo + 6.0 * s, 61);
        let j = build_jsa(&cfg, &model, None, &pump, sig, out).unwrap();
        let i = j.intensity();
        // Equal ω_o − ω_s ⇒ equal intensity.
        for k in 0..50 {
            assert!((i[(k, k)] - i[(k + 10, k + 10)]).abs() <= 1e-12 * i[(k, k)].max(1e-300));
        }
    }

    #[test]
    fn support_mismatch_is_an_error() {
        let (cfg, m) = device();
        let model = DispersionModel::Sellmeier(m);
        let pump = PumpEnvelope::gaussian(cfg.pump_nm(), SpectralWidth::Nm(2.0));
        let s = pump.sigma_omega();
        let ws = cfg.signal_omega();
        let wo = ws + pump.center_omega();
        let sig = linspace(ws - s, ws + s, 8);
        let out = linspace(wo - s, wo + s, 8);
        assert!(matches!(build_jsa(&cfg, &model, None, &pump, sig, out), Err(Error::Support(_))));
    }

    #[test]
    fn default_axes_cover_pump() {
        let (cfg, m) = device();
        let model = DispersionModel::Sellmeier(m);
        let pump = PumpEnvelope::gaussian(841.0, SpectralWidth::Nm(2.12));
        let opts = GridOptions { signal_points: 32, output_points: 32, ..Default::default() };
        let (sig, out) = jsa_axes(&cfg, &model, &pump, &opts).unwrap();
        assert_eq!(sig.len(), 32);
        build_jsa(&cfg, &model, None, &pump, sig, out).unwrap();
    }
}
