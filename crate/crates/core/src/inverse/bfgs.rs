use serde::{Deserialize, Serialize};

/// Why a local refinement stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineStatus {
    /// Gradient below tolerance.
    Converged,
    MaxIterations,
    /// No descent step found along the search direction.
    Stalled,
    /// The objective returned a non-finite value; the best iterate is kept.
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    pub max_iterations: usize,
    /// Central-difference step as a fraction of the box width.
    pub gradient_step_fraction: f64,
    /// Stop when `‖g‖_∞` falls below this.
    pub gradient_tolerance: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { max_iterations: 20, gradient_step_fraction: 1e-3, gradient_tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: u64,
    pub status: RefineStatus,
}

const ARMIJO_C1: f64 = 1e-4;

/// Box-constrained BFGS with central-difference gradients.
///
/// Trial points are clipped to `[lower, upper]`; an iterate is accepted only
/// if it satisfies the Armijo condition, so the objective never increases.
pub fn local_refine<F>(x0: &[f64], lower: &[f64], upper: &[f64], options: &RefineOptions, mut f: F) -> RefineOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    debug_assert!(lower.len() == n && upper.len() == n);
    let clip = |x: &mut [f64]| {
        for ((v, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
            *v = v.clamp(lo, hi);
        }
    };
    let steps: Vec<f64> =
        lower.iter().zip(upper).map(|(lo, hi)| options.gradient_step_fraction * (hi - lo)).collect();
    let mut evaluations = 0u64;
    let mut eval = |x: &[f64], evaluations: &mut u64| {
        *evaluations += 1;
        f(x)
    };
    let mut x = x0.to_vec();
    clip(&mut x);
    let mut fx = eval(&x, &mut evaluations);
    let outcome = |x: Vec<f64>, value, iterations, evaluations, status| RefineOutcome {
        x,
        value,
        iterations,
        evaluations,
        status,
    };
    if !fx.is_finite() {
        return outcome(x, fx, 0, evaluations, RefineStatus::NonFinite);
    }

    let gradient = |x: &[f64], eval: &mut dyn FnMut(&[f64]) -> f64| -> Option<Vec<f64>> {
        let mut g = vec![0.0; n];
        let mut probe = x.to_vec();
        for i in 0..n {
            let h = steps[i];
            probe[i] = x[i] + h;
            let fp = eval(&probe);
            probe[i] = x[i] - h;
            let fm = eval(&probe);
            probe[i] = x[i];
            if !fp.is_finite() || !fm.is_finite() {
                return None;
            }
            g[i] = (fp - fm) / (2.0 * h);
        }
        Some(g)
    };

    let mut h_inv = identity(n);
    let mut g = match gradient(&x, &mut |p| eval(p, &mut evaluations)) {
        Some(g) => g,
        None => return outcome(x, fx, 0, evaluations, RefineStatus::NonFinite),
    };
    for iteration in 0..options.max_iterations {
        if projected_gradient_norm(&x, &g, lower, upper) < options.gradient_tolerance {
            return outcome(x, fx, iteration, evaluations, RefineStatus::Converged);
        }
        let mut d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h_inv[i][j] * g[j]).sum::<f64>()).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            h_inv = identity(n);
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }

        let mut alpha = 1.0;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        let mut saw_non_finite = false;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            clip(&mut trial);
            let ft = eval(&trial, &mut evaluations);
            if !ft.is_finite() {
                saw_non_finite = true;
            } else if ft <= fx + ARMIJO_C1 * alpha * slope && ft <= fx {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            let status = if saw_non_finite { RefineStatus::NonFinite } else { RefineStatus::Stalled };
            return outcome(x, fx, iteration, evaluations, status);
        };
        let g_new = match gradient(&x_new, &mut |p| eval(p, &mut evaluations)) {
            Some(g) => g,
            None => return outcome(x_new, f_new, iteration + 1, evaluations, RefineStatus::NonFinite),
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        // Skipping the update when sᵀy ≤ 0 keeps H positive definite.
        if sy > 1e-12 * norm(&s) * norm(&y) {
            bfgs_update(&mut h_inv, &s, &y, sy);
        }
        let improved = f_new < fx;
        x = x_new;
        fx = f_new;
        g = g_new;
        if !improved && s.iter().all(|v| *v == 0.0) {
            return outcome(x, fx, iteration + 1, evaluations, RefineStatus::Stalled);
        }
    }
    let status = if projected_gradient_norm(&x, &g, lower, upper) < options.gradient_tolerance {
        RefineStatus::Converged
    } else {
        RefineStatus::MaxIterations
    };
    outcome(x, fx, options.max_iterations, evaluations, status)
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Gradient with components that push against an active bound zeroed.
fn projected_gradient_norm(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    x.iter()
        .zip(g)
        .zip(lower.iter().zip(upper))
        .map(|((&xi, &gi), (&lo, &hi))| {
            if (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0) {
                0.0
            } else {
                gi.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
