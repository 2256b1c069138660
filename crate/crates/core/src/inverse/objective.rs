use rayon::prelude::*;

use crate::dispersion::{DeltaBetaProfile, DispersionModel, ProcessConfig};
use crate::error::{Error, Result};
use crate::numeric::{interp_linear, is_uniform, linspace};
use crate::phasematch::{pm_sections, scan_delta_beta, AxisKind, ResolutionKernel, Scan, Spectrum};
use crate::phasematch::resolution::SampledKernel;

/// Everything the spectrum-matching objective needs that does not depend on
/// the candidate profile: global Δβ on a uniform simulation axis, the sampled
/// instrument kernel and the peak-normalised measurement.
#[derive(Debug, Clone)]
pub struct FitProblem {
    length_mm: f64,
    sim_axis: Vec<f64>,
    sim_delta_beta: Vec<f64>,
    kernel: SampledKernel,
    measured_axis: Vec<f64>,
    measured: Vec<f64>,
    /// False when the simulation axis is the measurement axis.
    resample: bool,
    scan: Scan,
}

impl FitProblem {
    /// `scan` supplies the geometry (which wavelength is held fixed); its axis
    /// is replaced by the measurement's.
    pub fn new(
        measured: &Spectrum,
        scan: &Scan,
        config: &ProcessConfig,
        model: &DispersionModel,
        kernel: &ResolutionKernel,
    ) -> Result<Self> {
        if measured.kind() != AxisKind::Wavelength {
            return Err(Error::Spectrum(format!(
                "measurement axis is {} but fits run on a wavelength axis",
                measured.kind().name()
            )));
        }
        if measured.len() < 3 {
            return Err(Error::Spectrum("measurement needs at least 3 samples".into()));
        }
        let normalized = measured.peak_normalized()?;
        let axis = normalized.axis().to_vec();
        let (lo, hi) = (axis[0].min(axis[axis.len() - 1]), axis[0].max(axis[axis.len() - 1]));
        let resample = !is_uniform(&axis, 1e-9);
        let sim_axis = if resample { linspace(lo, hi, 2 * axis.len()) } else { axis.clone() };
        let step = ((sim_axis[sim_axis.len() - 1] - sim_axis[0]) / (sim_axis.len() - 1) as f64).abs();
        let sim_delta_beta = scan_delta_beta(config, model, &scan.with_axis(sim_axis.clone()))?;
        Ok(Self {
            length_mm: config.length_mm(),
            sim_axis,
            sim_delta_beta,
            kernel: SampledKernel::new(kernel.sigma() / step),
            measured_axis: axis,
            measured: normalized.intensity().to_vec(),
            resample,
            scan: scan.with_axis(Vec::new()),
        })
    }

    pub fn length_mm(&self) -> f64 {
        self.length_mm
    }

    pub fn measured_axis(&self) -> &[f64] {
        &self.measured_axis
    }

    pub fn measured(&self) -> &[f64] {
        &self.measured
    }

    pub fn scan(&self) -> &Scan {
        &self.scan
    }

    /// Peak-normalised, resolution-convolved simulation on the measurement axis
    /// for equal-length sections with the given offsets.
    pub fn simulate(&self, lengths_m: &[f64], offsets_per_m: &[f64]) -> Vec<f64> {
        let raw: Vec<f64> =
            self.sim_delta_beta.iter().map(|&db| pm_sections(lengths_m, offsets_per_m, db).norm_sqr()).collect();
        let mut sim = self.kernel.apply(&raw);
        let peak = sim.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            sim.iter_mut().for_each(|v| *v /= peak);
        }
        if !self.resample {
            return sim;
        }
        self.measured_axis
            .iter()
            .map(|&x| interp_linear(&self.sim_axis, &sim, x).unwrap_or(0.0))
            .collect()
    }

    pub fn mse_sections(&self, lengths_m: &[f64], offsets_per_m: &[f64]) -> f64 {
        let sim = self.simulate(lengths_m, offsets_per_m);
        sim.iter().zip(&self.measured).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / self.measured.len() as f64
    }

    pub fn mse(&self, profile: &DeltaBetaProfile) -> Result<f64> {
        if (profile.length_mm() - self.length_mm).abs() > 1e-9 * self.length_mm {
            return Err(Error::Profile(format!(
                "profile spans {} mm but the device is {} mm long",
                profile.length_mm(),
                self.length_mm
            )));
        }
        Ok(self.mse_sections(&profile.section_lengths_m(), profile.offsets_per_m()))
    }

    /// MSE of many candidates; the output order follows the input order.
    pub fn mse_batch(&self, lengths_m: &[f64], candidates: &[Vec<f64>], parallel: bool) -> Vec<f64> {
        if parallel {
            candidates.par_iter().map(|c| self.mse_sections(lengths_m, c)).collect()
        } else {
            candidates.iter().map(|c| self.mse_sections(lengths_m, c)).collect()
        }
    }

    /// Best simulated spectrum as a [`Spectrum`] on the measurement axis.
    pub fn simulated_spectrum(&self, profile: &DeltaBetaProfile) -> Result<Spectrum> {
        self.mse(profile)?;
        let sim = self.simulate(&profile.section_lengths_m(), profile.offsets_per_m());
        Spectrum::new(AxisKind::Wavelength, self.measured_axis.clone(), sim)
    }
}

/// Mean squared difference between the peak-normalised measurement and the
/// simulated, resolution-convolved, peak-normalised spectrum of `profile`,
/// taken on a signal scan with the config's pump.
pub fn objective_mse(
    profile: &DeltaBetaProfile,
    measured: &Spectrum,
    config: &ProcessConfig,
    model: &DispersionModel,
    kernel: &ResolutionKernel,
) -> Result<f64> {
    let scan = Scan::Signal { axis_nm: Vec::new(), pump_nm: config.pump_nm() };
    FitProblem::new(measured, &scan, config, model, kernel)?.mse(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasematch::{convolve_resolution, pm_spectrum, Normalization};

    fn setup() -> (ProcessConfig, DispersionModel, Scan) {
        let cfg = ProcessConfig::new(1550.0, 850.0, 4.4, 25.0, 20.0).unwrap();
        let model = DispersionModel::default();
        let cfg = crate::dispersion::phase_matched_at_center(&cfg, &model).unwrap();
        let scan = Scan::signal_linspace(1548.0, 1552.0, 301, 850.0);
        (cfg, model, scan)
    }

    #[test]
    fn self_distance_is_zero() {
        let (cfg, model, scan) = setup();
        let profile = DeltaBetaProfile::equal_sections(20.0, vec![150.0, -80.0, 40.0]).unwrap();
        let kernel = ResolutionKernel::new(0.05).unwrap();
        let sim = pm_spectrum(&cfg, &model, Some(&profile), &scan, Normalization::Absolute).unwrap();
        let measured = convolve_resolution(&sim, &kernel).unwrap();
        let mse = FitProblem::new(&measured, &scan, &cfg, &model, &kernel).unwrap().mse(&profile).unwrap();
        assert!(mse < 1e-14, "{mse}");
        let mse = objective_mse(&profile, &measured, &cfg, &model, &kernel).unwrap();
        assert!(mse < 1e-14, "{mse}");
    }

    #[test]
    fn reversal_gives_same_mse() {
        let (cfg, model, scan) = setup();
        let truth = DeltaBetaProfile::equal_sections(20.0, vec![100.0, 0.0, -60.0, 20.0]).unwrap();
        let kernel = ResolutionKernel::identity();
        let measured = pm_spectrum(&cfg, &model, Some(&truth), &scan, Normalization::Peak).unwrap();
        let p = FitProblem::new(&measured, &scan, &cfg, &model, &kernel).unwrap();
        let cand = DeltaBetaProfile::equal_sections(20.0, vec![30.0, 10.0, -5.0, 70.0]).unwrap();
        let a = p.mse(&cand).unwrap();
        let b = p.mse(&cand.reversed()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn non_wavelength_axis_rejected() {
        let (cfg, model, scan) = setup();
        let s = Spectrum::new(AxisKind::Frequency, vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!(FitProblem::new(&s, &scan, &cfg, &model, &ResolutionKernel::identity()).is_err());
    }
}
