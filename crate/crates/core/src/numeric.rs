//! Small numerical helpers: sinc, root bracketing, golden-section search,
//! linear interpolation.

use crate::error::{Error, Result};

/// `sin(x)/x` with the removable singularity at zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent_root<F>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Degenerate(format!(
            "root is not bracketed by [{a}, {b}] (f = {fa}, {fb})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Ok(b)
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section_min<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..max_iter {
        if (b - a).abs() <= tol * (a.abs() + b.abs()).max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Piecewise-linear interpolation of `(xs, ys)` at `x`. `xs` must be strictly
/// monotone (either direction). Returns `None` outside the sampled range.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return (x == xs[0]).then_some(ys[0]);
    }
    let increasing = xs[n - 1] > xs[0];
    let (lo, hi) = if increasing { (xs[0], xs[n - 1]) } else { (xs[n - 1], xs[0]) };
    if x < lo || x > hi {
        return None;
    }
    // index of the first node beyond x in sweep direction
    let idx = if increasing {
        xs.partition_point(|&v| v < x)
    } else {
        xs.partition_point(|&v| v > x)
    };
    if idx == 0 {
        return Some(ys[0]);
    }
    let (x0, x1) = (xs[idx - 1], xs[idx.min(n - 1)]);
    let (y0, y1) = (ys[idx - 1], ys[idx.min(n - 1)]);
    if x1 == x0 {
        return Some(y0);
    }
    let t = (x - x0) / (x1 - x0);
    Some(y0 + t * (y1 - y0))
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Trapezoid quadrature weights for a monotone axis (absolute spacing).
pub fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = (xs[i + 1] - xs[i]).abs() / 2.0;
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// True when all consecutive spacings agree to `rel_tol` relative to the mean spacing.
pub fn is_uniform(xs: &[f64], rel_tol: f64) -> bool {
    if xs.len() < 3 {
        return true;
    }
    let mean = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    xs.windows(2)
        .all(|w| ((w[1] - w[0]) - mean).abs() <= rel_tol * mean.abs())
}

/// Strictly monotone in either direction.
pub fn is_strictly_monotone(xs: &[f64]) -> bool {
    if xs.len() < 2 {
        return true;
    }
    let up = xs[1] > xs[0];
    xs.windows(2).all(|w| if up { w[1] > w[0] } else { w[1] < w[0] })
}
