use serde::{Deserialize, Serialize};

use super::schmidt::SchmidtDecomposition;
use crate::error::{Error, Result};

/// Selectivity of Schmidt mode `m`.
///
/// With `Σρ_n = 1` the definition `|ρ_m|²/Σ_n|ρ_n|` reduces to `ρ_m²`;
/// `literal` evaluates the unreduced expression on the stored coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selectivity {
    pub mode: usize,
    pub rho: f64,
    pub selectivity: f64,
    pub literal: f64,
    /// `−10·log₁₀(√S)`.
    pub extinction_db_sqrt: f64,
}

pub fn selectivity(decomposition: &SchmidtDecomposition, mode: usize) -> Result<Selectivity> {
    selectivity_from_coefficients(decomposition.coefficients(), mode)
}

pub fn selectivity_from_coefficients(coefficients: &[f64], mode: usize) -> Result<Selectivity> {
    let rho = *coefficients.get(mode).ok_or_else(|| {
        Error::Config(format!("mode {mode} requested but only {} coefficients exist", coefficients.len()))
    })?;
    let abs_sum: f64 = coefficients.iter().map(|r| r.abs()).sum();
    let selectivity = rho * rho;
    Ok(Selectivity {
        mode,
        rho,
        selectivity,
        literal: rho * rho / abs_sum,
        extinction_db_sqrt: extinction_from_selectivity(selectivity),
    })
}

/// `ε = −10·log₁₀(P₁/P₀)` in dB.
pub fn extinction_ratio(p1: f64, p0: f64) -> Result<f64> {
    if !(p0 > 0.0) {
        return Err(Error::Degenerate(format!("reference power P0 must be > 0, got {p0}")));
    }
    if p1 < 0.0 {
        return Err(Error::below("P1", p1, 0.0));
    }
    Ok(-10.0 * (p1 / p0).log10())
}

/// `ε = −10·log₁₀(√S)` in dB.
pub fn extinction_from_selectivity(selectivity: f64) -> f64 {
    -10.0 * selectivity.sqrt().log10()
}

/// Input-to-output bandwidth ratio; both widths in the same metric and unit.
pub fn bandwidth_compression(input: f64, output: f64) -> Result<f64> {
    if !(input > 0.0) {
        return Err(Error::below("input bandwidth", input, 0.0));
    }
    if !(output > 0.0) {
        return Err(Error::below("output bandwidth", output, 0.0));
    }
    Ok(input / output)
}
