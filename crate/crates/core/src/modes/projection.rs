use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jsa::pm_width_omega;
use super::pump::{hermite_function, PumpEnvelope};
use crate::dispersion::{delta_beta, DeltaBetaProfile, DispersionModel, ProcessConfig};
use crate::error::{Error, Result};
use crate::phasematch::pm_sections;

/// Sampling of the projection integral
/// `P_n = ∫ du |∫ dx φ(x, u)·α_n(u − x)·ψ₀(x)|²`,
/// with `x` the signal and `u` the output detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProjectionOptions {
    /// Signal points across ±`signal_span_sigma`·σ.
    pub signal_points: usize,
    pub signal_span_sigma: f64,
    /// Output half-span in pump σ; the integrand decays on this scale
    /// whatever the phase-matching width.
    pub output_span_sigma: f64,
    /// Output samples per phase-matching 1/e half-width.
    pub samples_per_width: f64,
    /// Refuse grids with more output samples than this.
    pub max_output_points: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self {
            signal_points: 256,
            signal_span_sigma: 5.0,
            output_span_sigma: 7.5,
            samples_per_width: 8.0,
            max_output_points: 1 << 18,
        }
    }
}

/// Up-converted powers for a pump of order `n` and for order 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPowers {
    pub order: usize,
    pub p_n: f64,
    pub p_0: f64,
}

impl ProjectionPowers {
    pub fn ratio(&self) -> f64 {
        self.p_n / self.p_0
    }

    pub fn extinction_db(&self) -> Result<f64> {
        super::extinction_ratio(self.p_n, self.p_0)
    }
}

/// Projection of the order-`pump.order` JSA onto a Gaussian signal mode of
/// the pump's σ, centred on the config's signal, relative to the order-0
/// pump.
pub fn mode_projection_power(
    config: &ProcessConfig,
    model: &DispersionModel,
    profile: Option<&DeltaBetaProfile>,
    pump: &PumpEnvelope,
    options: &ProjectionOptions,
) -> Result<ProjectionPowers> {
    pump.validate()?;
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
    let ws0 = config.signal_omega();
    let wp0 = pump.center_omega();
    let width = pm_width_omega(config, model)?;
    let kernel = |x: f64, u: f64| -> Result<Complex64> {
        let db = delta_beta(config, model, ws0 + x, wp0 + u - x)?;
        Ok(pm_sections(&lengths, &offsets, db))
    };
    project_with_kernel(pump, width, options, kernel)
}

/// [`mode_projection_power`] for an arbitrary kernel `φ(x, u)` whose output
/// width is `width` (rad/s, infinite when flat along the output).
pub fn project_with_kernel<F>(
    pump: &PumpEnvelope,
    width: f64,
    options: &ProjectionOptions,
    kernel: F,
) -> Result<ProjectionPowers>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    pump.validate()?;
    let sigma = pump.sigma_omega();
    if options.signal_points < 8 {
        return Err(Error::Config("projection needs at least 8 signal points".into()));
    }
    let x_half = options.signal_span_sigma * sigma;
    let dx = 2.0 * x_half / (options.signal_points - 1) as f64;
    let xs: Vec<f64> = (0..options.signal_points).map(|i| -x_half + i as f64 * dx).collect();
    let psi: Vec<f64> = xs.iter().map(|&x| hermite_function(0, x / sigma) / sigma.sqrt()).collect();

    let u_half = options.output_span_sigma * sigma;
    let du = (width / options.samples_per_width).min(sigma / 16.0);
    let n_u = (2.0 * u_half / du).ceil() as usize + 1;
    if n_u > options.max_output_points {
        return Err(Error::Config(format!(
            "projection would need {n_u} output samples (limit {}); the phase-matching width is too narrow for the pump",
            options.max_output_points
        )));
    }
    let du = 2.0 * u_half / (n_u - 1) as f64;

    let order = pump.order;
    let rows: Vec<(f64, f64)> = (0..n_u)
        .into_par_iter()
        .map(|k| {
            let u = -u_half + k as f64 * du;
            let mut g0 = Complex64::new(0.0, 0.0);
            let mut gn = Complex64::new(0.0, 0.0);
            for (&x, &p) in xs.iter().zip(&psi) {
                let phi = kernel(x, u)? * p;
                let t = (u - x) / sigma;
                g0 += phi * hermite_function(0, t);
                if order > 0 {
                    gn += phi * hermite_function(order, t);
                }
            }
            if order == 0 {
                gn = g0;
            }
            Ok((g0.norm_sqr(), gn.norm_sqr()))
        })
        .collect::<Result<_>>()?;
    // Index-ordered sums keep the result independent of the thread count.
    let scale = dx * dx / sigma * du;
    let p_0: f64 = rows.iter().map(|r| r.0).sum::<f64>() * scale;
    let p_n: f64 = rows.iter().map(|r| r.1).sum::<f64>() * scale;
    if !(p_0 > 0.0) {
        return Err(Error::Degenerate("order-0 projection vanishes".into()));
    }
    Ok(ProjectionPowers { order, p_n, p_0 })
}
