use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};
use crate::numeric::is_uniform;

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3; // 2·sqrt(2 ln 2)

/// Gaussian instrument response, σ in axis units. σ = 0 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionKernel {
    sigma: f64,
}

impl ResolutionKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!("resolution σ must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    /// Kernel from an instrument resolution quoted as a full width at half maximum.
    pub fn from_fwhm(fwhm: f64) -> Result<Self> {
        Self::new(fwhm / FWHM_PER_SIGMA)
    }

    pub fn identity() -> Self {
        Self { sigma: 0.0 }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn fwhm(&self) -> f64 {
        self.sigma * FWHM_PER_SIGMA
    }
}

/// Convolves the intensity with a sampled Gaussian (truncated at ±8σ and
/// normalised to unit sum).
///
/// Each input bin spreads its energy over neighbouring bins; weight that would
/// leave the axis is mirrored back about the outer half-sample edge, so the
/// total intensity is conserved exactly.
pub fn convolve_resolution(spectrum: &Spectrum, kernel: &ResolutionKernel) -> Result<Spectrum> {
    if kernel.sigma == 0.0 {
        return Ok(spectrum.clone());
    }
    let axis = spectrum.axis();
    let n = axis.len();
    if n < 2 {
        return Ok(spectrum.clone());
    }
    if !is_uniform(axis, 1e-6) {
        return Err(Error::NonUniformAxis);
    }
    let step = ((axis[n - 1] - axis[0]) / (n - 1) as f64).abs();
    let out = SampledKernel::new(kernel.sigma / step).apply(spectrum.intensity());
    let mut result = spectrum.with_intensity(out);
    let prior = result.meta.resolution_sigma;
    result.meta.resolution_sigma = (prior * prior + kernel.sigma * kernel.sigma).sqrt();
    Ok(result)
}

/// Gaussian weights on an integer lattice, σ in samples.
#[derive(Debug, Clone)]
pub(crate) struct SampledKernel {
    weights: Vec<f64>,
    half: i64,
}

impl SampledKernel {
    pub(crate) fn new(sigma_bins: f64) -> Self {
        if sigma_bins == 0.0 {
            return Self { weights: vec![1.0], half: 0 };
        }
        let half = (8.0 * sigma_bins).ceil() as i64;
        let mut weights: Vec<f64> = (-half..=half)
            .map(|k| {
                let x = k as f64 / sigma_bins;
                (-0.5 * x * x).exp()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self { weights, half }
    }

    pub(crate) fn apply(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        if self.half == 0 {
            return values.to_vec();
        }
        let period = 2 * n as i64;
        let mirror = |i: i64| -> usize {
            let r = i.rem_euclid(period);
            (if r < n as i64 { r } else { period - 1 - r }) as usize
        };
        let mut out = vec![0.0; n];
        for (i, &v) in values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let first = i as i64 - self.half;
            if first >= 0 && first + 2 * self.half < n as i64 {
                let base = first as usize;
                for (o, &w) in out[base..].iter_mut().zip(&self.weights) {
                    *o += w * v;
                }
            } else {
                for (k, &w) in self.weights.iter().enumerate() {
                    out[mirror(first + k as i64)] += w * v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasematch::AxisKind;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let s = Spectrum::new(AxisKind::Detuning, grid(5), vec![0.0, 1.0, 3.0, 1.0, 0.0]).unwrap();
        assert_eq!(convolve_resolution(&s, &ResolutionKernel::identity()).unwrap(), s);
    }

    #[test]
    fn impulse_response_width() {
        let n = 101;
        let mut v = vec![0.0; n];
        v[50] = 1.0;
        let s = Spectrum::new(AxisKind::Detuning, grid(n), v).unwrap();
        let out = convolve_resolution(&s, &ResolutionKernel::new(3.0).unwrap()).unwrap();
        let total: f64 = out.intensity().iter().sum();
        let mean: f64 = out.intensity().iter().enumerate().map(|(i, v)| i as f64 * v).sum::<f64>() / total;
        let var: f64 = out
            .intensity()
            .iter()
            .enumerate()
            .map(|(i, v)| (i as f64 - mean).powi(2) * v)
            .sum::<f64>()
            / total;
        assert!((var.sqrt() - 3.0).abs() / 3.0 < 0.02, "σ = {}", var.sqrt());
    }

    #[test]
    fn energy_conserved_at_edges() {
        let v: Vec<f64> = (0..40).map(|i| if !(3..=36).contains(&i) { 5.0 } else { 0.1 * i as f64 }).collect();
        let s = Spectrum::new(AxisKind::Detuning, grid(40), v).unwrap();
        for sigma in [0.7, 4.0, 60.0] {
            let out = convolve_resolution(&s, &ResolutionKernel::new(sigma).unwrap()).unwrap();
            let a: f64 = s.intensity().iter().sum();
            let b: f64 = out.intensity().iter().sum();
            assert!(((a - b) / a).abs() < 1e-9, "σ={sigma}: {a} vs {b}");
        }
    }

    #[test]
    fn non_uniform_axis_rejected() {
        let s = Spectrum::new(AxisKind::Detuning, vec![0.0, 1.0, 3.0], vec![1.0; 3]).unwrap();
        assert!(matches!(
            convolve_resolution(&s, &ResolutionKernel::new(1.0).unwrap()),
            Err(Error::NonUniformAxis)
        ));
    }

    #[test]
    fn fwhm_constructor() {
        let k = ResolutionKernel::from_fwhm(0.03).unwrap();
        assert!((k.sigma() - 0.012739827).abs() < 1e-8);
        assert!(ResolutionKernel::new(-1.0).is_err());
    }
}
