use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jsa::JsaGrid;
use crate::error::{Error, Result};

/// Schmidt decomposition `JSA = norm·Σ √ρ_n u_n(ω_s) v_n(ω_o)`.
///
/// Mode functions are orthonormal under the grid measure: `Σ_i w_i ū_m u_n = δ_mn`
/// with `w_i` the cell width of sample `i`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    norm: f64,
    signal_weights: Vec<f64>,
    output_weights: Vec<f64>,
    /// Column `n` is `u_n` on the signal axis.
    signal_modes: DMatrix<Complex64>,
    /// Column `n` is `v_n` on the output axis.
    output_modes: DMatrix<Complex64>,
}

/// Cell widths: half the distance between neighbours, full spacing at the
/// ends, so a uniform axis gets the constant weight Δω.
pub fn cell_widths(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    (0..n)
        .map(|i| match i {
            0 => (axis[1] - axis[0]).abs(),
            _ if i == n - 1 => (axis[n - 1] - axis[n - 2]).abs(),
            _ => 0.5 * (axis[i + 1] - axis[i - 1]).abs(),
        })
        .collect()
}

pub fn schmidt_decompose(jsa: &JsaGrid) -> Result<SchmidtDecomposition> {
    let a = jsa.amplitude();
    if a.iter().all(|v| v.norm_sqr() == 0.0) {
        return Err(Error::Degenerate("joint spectral amplitude is identically zero".into()));
    }
    if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Degenerate("joint spectral amplitude has non-finite entries".into()));
    }
    let ws = cell_widths(jsa.signal_omega());
    let wo = cell_widths(jsa.output_omega());
    let sws: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    let swo: Vec<f64> = wo.iter().map(|w| w.sqrt()).collect();
    let weighted = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * (sws[i] * swo[j]));

    let svd = weighted.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Degenerate("SVD did not return U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Degenerate("SVD did not return Vᵀ".into()))?;
    let s = svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
    let total: f64 = s.iter().map(|v| v * v).sum();
    let coefficients: Vec<f64> = order.iter().map(|&k| s[k] * s[k] / total).collect();

    let signal_modes = DMatrix::from_fn(a.nrows(), order.len(), |i, n| u[(i, order[n])] / sws[i]);
    let output_modes = DMatrix::from_fn(a.ncols(), order.len(), |j, n| v_t[(order[n], j)] / swo[j]);
    Ok(SchmidtDecomposition {
        coefficients,
        norm: total.sqrt(),
        signal_weights: ws,
        output_weights: wo,
        signal_modes,
        output_modes,
    })
}

impl SchmidtDecomposition {
    /// ρ_n, descending, summing to 1.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `‖JSA‖` under the grid measure.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn signal_modes(&self) -> &DMatrix<Complex64> {
        &self.signal_modes
    }

    pub fn output_modes(&self) -> &DMatrix<Complex64> {
        &self.output_modes
    }

    pub fn signal_weights(&self) -> &[f64] {
        &self.signal_weights
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    /// `K = 1/Σρ_n²`.
    pub fn schmidt_number(&self) -> f64 {
        1.0 / self.coefficients.iter().map(|r| r * r).sum::<f64>()
    }

    /// JSA rebuilt from the first `modes` terms (all when `None`).
    pub fn reconstruct(&self, modes: Option<usize>) -> DMatrix<Complex64> {
        let k = modes.unwrap_or(self.coefficients.len()).min(self.coefficients.len());
        let (ns, no) = (self.signal_modes.nrows(), self.output_modes.nrows());
        let mut out = DMatrix::from_element(ns, no, Complex64::new(0.0, 0.0));
        for n in 0..k {
            let c = self.norm * self.coefficients[n].sqrt();
            if c == 0.0 {
                continue;
            }
            for j in 0..no {
                let v = self.output_modes[(j, n)] * c;
                for i in 0..ns {
                    out[(i, j)] += self.signal_modes[(i, n)] * v;
                }
            }
        }
        out
    }

    /// Weighted Gram matrices of the first `k` signal and output modes.
    pub fn gram(&self, k: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let k = k.min(self.coefficients.len());
        let g = |modes: &DMatrix<Complex64>, w: &[f64]| {
            DMatrix::from_fn(k, k, |m, n| {
                (0..modes.nrows()).map(|i| modes[(i, m)].conj() * modes[(i, n)] * w[i]).sum()
            })
        };
        (g(&self.signal_modes, &self.signal_weights), g(&self.output_modes, &self.output_weights))
    }

    pub fn summary(&self, keep: usize) -> SchmidtSummary {
        SchmidtSummary {
            coefficients: self.coefficients.iter().take(keep).copied().collect(),
            schmidt_number: self.schmidt_number(),
            modes_total: self.coefficients.len(),
        }
    }
}

/// JSON form of a decomposition without the mode functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSummary {
    pub coefficients: Vec<f64>,
    pub schmidt_number: f64,
    pub modes_total: usize,
}
