//! Conversion efficiency `η = sin²(√(η_norm·P)·L)` and η_norm extraction
//! from depletion data.
//!
//! Units: η_norm in 1/(W·cm²), pump power in W, length in cm.

use std::io::Read;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Argument `√(η_norm·P)·L` of the efficiency; `π/2` is unit efficiency.
fn rotation(eta_norm: f64, power_w: f64, length_cm: f64) -> f64 {
    (eta_norm * power_w).sqrt() * length_cm
}

pub fn conversion_efficiency(eta_norm: f64, power_w: f64, length_cm: f64) -> Result<f64> {
    for (name, v) in [("eta_norm", eta_norm), ("pump power", power_w), ("length", length_cm)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::below(name, v, 0.0));
        }
    }
    Ok(rotation(eta_norm, power_w, length_cm).sin().powi(2))
}

/// Smallest pump power (W) with unit efficiency, `(π/(2L))²/η_norm`.
pub fn unit_efficiency_power(eta_norm: f64, length_cm: f64) -> Result<f64> {
    if !(eta_norm > 0.0) {
        return Err(Error::below("eta_norm", eta_norm, 0.0));
    }
    if !(length_cm > 0.0) {
        return Err(Error::below("length", length_cm, 0.0));
    }
    Ok((std::f64::consts::FRAC_PI_2 / length_cm).powi(2) / eta_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyPoint {
    #[serde(rename = "power_W")]
    pub power_w: f64,
    pub efficiency: f64,
}

impl EfficiencyPoint {
    pub fn new(power_w: f64, efficiency: f64) -> Result<Self> {
        let p = Self { power_w, efficiency };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_w >= 0.0) || !self.power_w.is_finite() {
            return Err(Error::below("pump power", self.power_w, 0.0));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::OutOfRange {
                quantity: "efficiency",
                value: self.efficiency,
                bound: if self.efficiency < 0.0 { crate::error::Bound::Lower } else { crate::error::Bound::Upper },
                limit: if self.efficiency < 0.0 { 0.0 } else { 1.0 },
            });
        }
        Ok(())
    }
}

/// Closed-form η_norm from a single measurement on the first quarter-wave.
pub fn invert_single_point(point: EfficiencyPoint, length_cm: f64) -> Result<f64> {
    point.validate()?;
    if !(point.power_w > 0.0) {
        return Err(Error::Degenerate("single-point inversion needs a positive pump power".into()));
    }
    if !(length_cm > 0.0) {
        return Err(Error::below("length", length_cm, 0.0));
    }
    Ok((point.efficiency.sqrt().asin() / length_cm).powi(2) / point.power_w)
}

/// Least-squares η_norm with a 95% Student-t interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaNormFit {
    pub eta_norm: f64,
    pub std_error: f64,
    pub ci95: [f64; 2],
    pub residual_rms: f64,
    pub points: usize,
    pub length_cm: f64,
    pub iterations: usize,
    /// Set when a point lies past the first quarter-wave at the fitted value,
    /// where the branch of the sin² is ambiguous.
    pub beyond_quarter_wave: bool,
}

pub fn fit_eta_norm(points: &[EfficiencyPoint], length_cm: f64) -> Result<EtaNormFit> {
    if !(length_cm > 0.0) {
        return Err(Error::below("length", length_cm, 0.0));
    }
    for p in points {
        p.validate()?;
    }
    if points.len() < 2 {
        return Err(Error::Degenerate(format!("need at least 2 points, got {}", points.len())));
    }
    let mut powers: Vec<f64> = points.iter().map(|p| p.power_w).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    if powers.len() < 2 || powers.iter().all(|&p| p == 0.0) {
        return Err(Error::Degenerate("need at least 2 distinct pump powers".into()));
    }
    let mut guesses: Vec<f64> = points
        .iter()
        .filter(|p| p.power_w > 0.0 && p.efficiency > 0.0 && p.efficiency < 1.0)
        .filter_map(|p| invert_single_point(*p, length_cm).ok())
        .collect();
    if guesses.is_empty() {
        return Err(Error::Degenerate("no point with 0 < efficiency < 1 and positive power".into()));
    }
    guesses.sort_by(f64::total_cmp);
    let mut eta = guesses[guesses.len() / 2];

    let ssr = |e: f64| -> f64 {
        points
            .iter()
            .map(|p| (rotation(e, p.power_w, length_cm).sin().powi(2) - p.efficiency).powi(2))
            .sum()
    };
    let jacobian = |e: f64, p: &EfficiencyPoint| -> f64 {
        if p.power_w == 0.0 {
            return 0.0;
        }
        let th = rotation(e, p.power_w, length_cm);
        (2.0 * th).sin() * length_cm * p.power_w.sqrt() / (2.0 * e.sqrt())
    };

    let mut iterations = 0;
    let mut current = ssr(eta);
    for _ in 0..100 {
        iterations += 1;
        let (mut jtj, mut jtr) = (0.0, 0.0);
        for p in points {
            let j = jacobian(eta, p);
            let r = p.efficiency - rotation(eta, p.power_w, length_cm).sin().powi(2);
            jtj += j * j;
            jtr += j * r;
        }
        if jtj == 0.0 {
            break;
        }
        let mut step = jtr / jtj;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = eta + step;
            if trial > 0.0 {
                let t = ssr(trial);
                if t <= current {
                    eta = trial;
                    current = t;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || step.abs() <= 1e-15 * eta {
            break;
        }
    }

    let n = points.len();
    let dof = (n - 1) as f64;
    let jtj: f64 = points.iter().map(|p| jacobian(eta, p).powi(2)).sum();
    let s2 = current / dof;
    let std_error = if jtj > 0.0 { (s2 / jtj).sqrt() } else { f64::INFINITY };
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Degenerate(format!("Student-t: {e}")))?
        .inverse_cdf(0.975);
    let beyond_quarter_wave =
        points.iter().any(|p| rotation(eta, p.power_w, length_cm) > std::f64::consts::FRAC_PI_2 + 1e-12);
    Ok(EtaNormFit {
        eta_norm: eta,
        std_error,
        ci95: [eta - t * std_error, eta + t * std_error],
        residual_rms: (current / n as f64).sqrt(),
        points: n,
        length_cm,
        iterations,
        beyond_quarter_wave,
    })
}

/// Reads `power_W,efficiency` rows; the header line is required.
pub fn read_depletion_csv<R: Read>(reader: R) -> Result<Vec<EfficiencyPoint>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::from_csv(e, 1))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["power_W", "efficiency"] {
        return Err(Error::Parse { line: 1, message: format!("expected header 'power_W,efficiency', found '{}'", headers.iter().collect::<Vec<_>>().join(",")) });
    }
    let mut out = Vec::new();
    for record in rdr.deserialize::<EfficiencyPoint>() {
        let p = record.map_err(|e| Error::from_csv(e, 0))?;
        p.validate()?;
        out.push(p);
    }
    Ok(out)
}

pub fn write_depletion_csv(points: &[EfficiencyPoint]) -> String {
    let mut s = String::from("power_W,efficiency\n");
    for p in points {
        s.push_str(&format!("{:.16e},{:.16e}\n", p.power_w, p.efficiency));
    }
    s
}

/// `η(P)` sampled on `powers_w`.
pub fn efficiency_curve(eta_norm: f64, length_cm: f64, powers_w: &[f64]) -> Result<Vec<f64>> {
    powers_w.iter().map(|&p| conversion_efficiency(eta_norm, p, length_cm)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn device_values() {
        assert_eq!(conversion_efficiency(1.15, 0.0, 7.1).unwrap(), 0.0);
        let eta = conversion_efficiency(1.15, 0.004, 7.1).unwrap();
        assert!((eta - 0.2145).abs() < 1e-3, "{eta}");
        assert!((unit_efficiency_power(1.15, 7.1).unwrap() - 0.04256).abs() < 1e-4);
        assert!((unit_efficiency_power(2.32, 2.7).unwrap() - 0.1459).abs() < 1e-3);
        let p = unit_efficiency_power(1.15, 7.1).unwrap();
        assert!((conversion_efficiency(1.15, p, 7.1).unwrap() - 1.0).abs() < 1e-15);
        assert!(conversion_efficiency(-1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn length_scaling() {
        let p1 = unit_efficiency_power(1.0, 2.0).unwrap();
        let p2 = unit_efficiency_power(1.0, 4.0).unwrap();
        assert!((p1 / p2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_inversion() {
        let e = invert_single_point(EfficiencyPoint::new(0.004, 0.18).unwrap(), 7.1).unwrap();
        assert!((e - 0.9515).abs() < 1e-3, "{e}");
    }

    #[test]
    fn noiseless_fit_is_exact() {
        let pts: Vec<_> = [0.002, 0.005, 0.01, 0.02, 0.03]
            .iter()
            .map(|&p| EfficiencyPoint::new(p, conversion_efficiency(1.15, p, 7.1).unwrap()).unwrap())
            .collect();
        let fit = fit_eta_norm(&pts, 7.1).unwrap();
        assert!((fit.eta_norm - 1.15).abs() < 1e-10 * 1.15);
        assert!(fit.residual_rms < 1e-12);
        assert!(!fit.beyond_quarter_wave);
    }

    #[test]
    fn degenerate_inputs() {
        let p = EfficiencyPoint::new(0.01, 0.3).unwrap();
        assert!(fit_eta_norm(&[p], 7.1).is_err());
        assert!(fit_eta_norm(&[p, p], 7.1).is_err());
        assert!(EfficiencyPoint::new(0.01, 1.2).is_err());
    }

    #[test]
    fn flags_over_rotation() {
        let pts: Vec<_> = [0.01, 0.05, 0.06]
            .iter()
            .map(|&p| EfficiencyPoint::new(p, conversion_efficiency(1.15, p, 7.1).unwrap()).unwrap())
            .collect();
        assert!(fit_eta_norm(&pts, 7.1).unwrap().beyond_quarter_wave);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let pts = vec![EfficiencyPoint::new(0.001, 0.05).unwrap(), EfficiencyPoint::new(0.002, 0.1).unwrap()];
        let text = write_depletion_csv(&pts);
        assert_eq!(read_depletion_csv(text.as_bytes()).unwrap(), pts);
        let bad = "power_W,efficiency\n0.001,0.1\n0.002,abc\n";
        match read_depletion_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
