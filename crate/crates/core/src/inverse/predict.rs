use crate::dispersion::{DeltaBetaProfile, DispersionModel, ProcessConfig};
use crate::error::{Error, Result};
use crate::phasematch::{pm_spectrum, Normalization, Scan, Spectrum};

/// Spectrum of a retrieved profile at other operating conditions.
///
/// The section offsets are held fixed; only the global Δβ follows the
/// dispersion model at `to`. An optional `extra` profile (e.g. a thermal
/// gradient) is added section-wise.
pub fn predict_at_conditions(
    profile: &DeltaBetaProfile,
    from: &ProcessConfig,
    to: &ProcessConfig,
    model: &DispersionModel,
    extra: Option<&DeltaBetaProfile>,
    scan: &Scan,
) -> Result<Spectrum> {
    if (from.length_mm() - to.length_mm()).abs() > 1e-9 * from.length_mm() {
        return Err(Error::Config(format!(
            "device length changed from {} to {} mm",
            from.length_mm(),
            to.length_mm()
        )));
    }
    crate::dispersion::delta_beta(from, model, from.signal_omega(), from.pump_omega())?;
    let combined = match extra {
        Some(e) => profile.superpose(e)?,
        None => profile.clone(),
    };
    pm_spectrum(to, model, Some(&combined), scan, Normalization::Peak)
}
