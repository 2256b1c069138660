//! Physical constants and unit conversions shared across the crate.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum wavelength in nm to angular frequency in rad/s.
pub fn nm_to_omega(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Angular frequency in rad/s to vacuum wavelength in nm.
pub fn omega_to_nm(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Vacuum wavelength in nm to frequency in THz.
pub fn nm_to_thz(wavelength_nm: f64) -> f64 {
    SPEED_OF_LIGHT / (wavelength_nm * 1e-9) * 1e-12
}

/// Frequency in THz to vacuum wavelength in nm.
pub fn thz_to_nm(frequency_thz: f64) -> f64 {
    SPEED_OF_LIGHT / (frequency_thz * 1e12) * 1e9
}

/// Narrowband conversion of a wavelength width to a frequency width in GHz,
/// `c·Δλ/λ²` evaluated at `center_nm`.
pub fn width_nm_to_ghz(width_nm: f64, center_nm: f64) -> f64 {
    SPEED_OF_LIGHT * width_nm / (center_nm * center_nm)
}

/// Inverse of [`width_nm_to_ghz`].
pub fn width_ghz_to_nm(width_ghz: f64, center_nm: f64) -> f64 {
    width_ghz * center_nm * center_nm / SPEED_OF_LIGHT
}

/// Wavelength width (nm) at `center_nm` to an angular-frequency width (rad/s).
pub fn width_nm_to_omega(width_nm: f64, center_nm: f64) -> f64 {
    2.0 * PI * width_nm_to_ghz(width_nm, center_nm) * 1e9
}

/// Angular-frequency width (rad/s) at `center_nm` to a wavelength width (nm).
pub fn width_omega_to_nm(width_omega: f64, center_nm: f64) -> f64 {
    width_ghz_to_nm(width_omega / (2.0 * PI) * 1e-9, center_nm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_center_frequency() {
        assert!((nm_to_thz(550.0) - 545.077).abs() < 1e-3);
    }

    #[test]
    fn resolution_width_in_ghz() {
        let ghz = width_nm_to_ghz(0.03, 550.0);
        assert!((ghz - 29.75).abs() / 29.75 < 0.01, "{ghz}");
        assert!((width_ghz_to_nm(ghz, 550.0) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn omega_round_trip() {
        let w = nm_to_omega(1550.0);
        assert!((omega_to_nm(w) - 1550.0).abs() < 1e-9);
        let dw = width_nm_to_omega(2.12, 841.0);
        assert!((width_omega_to_nm(dw, 841.0) - 2.12).abs() < 1e-12);
    }
}
