use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{interp_linear, is_strictly_monotone};
use crate::units::{nm_to_omega, nm_to_thz, omega_to_nm, thz_to_nm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Vacuum wavelength, nm.
    Wavelength,
    /// Frequency, THz.
    Frequency,
    /// Angular frequency, rad/s.
    AngularFrequency,
    /// Phase-mismatch detuning, 1/m.
    Detuning,
}

impl AxisKind {
    pub fn unit(self) -> &'static str {
        match self {
            AxisKind::Wavelength => "nm",
            AxisKind::Frequency => "THz",
            AxisKind::AngularFrequency => "rad/s",
            AxisKind::Detuning => "1/m",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Wavelength => "wavelength",
            AxisKind::Frequency => "frequency",
            AxisKind::AngularFrequency => "angular_frequency",
            AxisKind::Detuning => "detuning",
        }
    }
}

impl FromStr for AxisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wavelength" => Ok(AxisKind::Wavelength),
            "frequency" => Ok(AxisKind::Frequency),
            "angular_frequency" => Ok(AxisKind::AngularFrequency),
            "detuning" => Ok(AxisKind::Detuning),
            other => Err(Error::Spectrum(format!("unknown axis kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub temperature_c: Option<f64>,
    pub device_id: Option<String>,
    /// Gaussian σ of the instrument response already applied, in axis units.
    pub resolution_sigma: f64,
}

/// Sampled intensity (and optionally complex amplitude) on a strictly
/// monotone axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    kind: AxisKind,
    axis: Vec<f64>,
    intensity: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitude: Option<Vec<Complex64>>,
    pub meta: SpectrumMeta,
}

impl Spectrum {
    pub fn new(kind: AxisKind, axis: Vec<f64>, intensity: Vec<f64>) -> Result<Self> {
        if axis.len() != intensity.len() {
            return Err(Error::Spectrum(format!(
                "axis has {} samples but intensity has {}",
                axis.len(),
                intensity.len()
            )));
        }
        if axis.is_empty() {
            return Err(Error::Spectrum("empty spectrum".into()));
        }
        if !axis.iter().all(|x| x.is_finite()) || !is_strictly_monotone(&axis) {
            return Err(Error::Spectrum("axis must be finite and strictly monotone".into()));
        }
        if let Some(bad) = intensity.iter().find(|&&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Spectrum(format!("intensity must be finite and >= 0, got {bad}")));
        }
        Ok(Self { kind, axis, intensity, amplitude: None, meta: SpectrumMeta::default() })
    }

    /// Spectrum whose intensity is `|amplitude|²`.
    pub fn from_amplitudes(kind: AxisKind, axis: Vec<f64>, amplitude: Vec<Complex64>) -> Result<Self> {
        let intensity = amplitude.iter().map(|a| a.norm_sqr()).collect();
        let mut s = Self::new(kind, axis, intensity)?;
        s.amplitude = Some(amplitude);
        Ok(s)
    }

    pub fn with_meta(mut self, meta: SpectrumMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn amplitude(&self) -> Option<&[Complex64]> {
        self.amplitude.as_deref()
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Index and value of the largest intensity sample (first on ties).
    pub fn peak(&self) -> (usize, f64) {
        self.intensity
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
    }

    /// Scaled so the largest sample is 1; amplitudes scale by the square root.
    pub fn peak_normalized(&self) -> Result<Self> {
        let (_, peak) = self.peak();
        if !(peak > 0.0) {
            return Err(Error::Degenerate("cannot peak-normalise an all-zero spectrum".into()));
        }
        let mut out = self.clone();
        out.intensity.iter_mut().for_each(|v| *v /= peak);
        if let Some(a) = out.amplitude.as_mut() {
            let s = peak.sqrt();
            a.iter_mut().for_each(|v| *v /= s);
        }
        Ok(out)
    }

    /// Drops amplitudes and replaces intensities (used by convolution).
    pub(crate) fn with_intensity(&self, intensity: Vec<f64>) -> Self {
        Self {
            kind: self.kind,
            axis: self.axis.clone(),
            intensity,
            amplitude: None,
            meta: self.meta.clone(),
        }
    }

    /// Linear interpolation of the intensity at `x`, `None` outside the axis.
    pub fn intensity_at(&self, x: f64) -> Option<f64> {
        interp_linear(&self.axis, &self.intensity, x)
    }

    /// Point-wise change of axis units. The sample order is preserved, so a
    /// wavelength axis that increases becomes a decreasing frequency axis.
    pub fn axis_convert(&self, to: AxisKind) -> Result<Self> {
        if to == self.kind {
            return Ok(self.clone());
        }
        if self.kind == AxisKind::Detuning || to == AxisKind::Detuning {
            return Err(Error::Spectrum("detuning axes carry no absolute frequency".into()));
        }
        if let Some(bad) = self.axis.iter().find(|&&x| !(x > 0.0)) {
            return Err(Error::Spectrum(format!("axis value {bad} must be positive to convert")));
        }
        let to_nm = |x: f64| match self.kind {
            AxisKind::Wavelength => x,
            AxisKind::Frequency => thz_to_nm(x),
            AxisKind::AngularFrequency => omega_to_nm(x),
            AxisKind::Detuning => unreachable!(),
        };
        let from_nm = |nm: f64| match to {
            AxisKind::Wavelength => nm,
            AxisKind::Frequency => nm_to_thz(nm),
            AxisKind::AngularFrequency => nm_to_omega(nm),
            AxisKind::Detuning => unreachable!(),
        };
        let axis = self.axis.iter().map(|&x| from_nm(to_nm(x))).collect();
        let mut out = self.clone();
        out.kind = to;
        out.axis = axis;
        // σ is a width: convert it with the local derivative at the peak
        if self.meta.resolution_sigma > 0.0 {
            let (ip, _) = self.peak();
            let x0 = self.axis[ip];
            let h = self.meta.resolution_sigma;
            let a = from_nm(to_nm(x0 - 0.5 * h));
            let b = from_nm(to_nm(x0 + 0.5 * h));
            out.meta.resolution_sigma = (b - a).abs();
        }
        Ok(out)
    }

    /// Writes `# axis=<kind> unit=<u> temperature_C=<t> resolution_sigma=<r>`,
    /// an `axis,intensity` header, then one sample per line with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        let temp = match self.meta.temperature_c {
            Some(t) => format!("{t}"),
            None => "nan".to_string(),
        };
        let _ = writeln!(
            s,
            "# axis={} unit={} temperature_C={} resolution_sigma={}",
            self.kind.name(),
            self.kind.unit(),
            temp,
            self.meta.resolution_sigma
        );
        s.push_str("axis,intensity\n");
        for (x, y) in self.axis.iter().zip(&self.intensity) {
            let _ = writeln!(s, "{x:.16e},{y:.16e}");
        }
        s
    }

    /// Parses the format written by [`Spectrum::write_csv`]. The metadata
    /// comment line is optional (a wavelength axis is assumed without it).
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut kind = AxisKind::Wavelength;
        let mut meta = SpectrumMeta::default();
        let mut axis = Vec::new();
        let mut intensity = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                parse_header(header, lineno, &mut kind, &mut meta)?;
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            if axis.is_empty() && fields[0].parse::<f64>().is_err() && fields[1].parse::<f64>().is_err() {
                // column header row
                continue;
            }
            let parse = |s: &str, what: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("cannot parse {what} value '{s}'"),
                })
            };
            axis.push(parse(fields[0], "axis")?);
            intensity.push(parse(fields[1], "intensity")?);
        }
        if axis.is_empty() {
            return Err(Error::Parse { line: 0, message: "no data rows".into() });
        }
        Ok(Self::new(kind, axis, intensity)?.with_meta(meta))
    }
}

fn parse_header(header: &str, line: usize, kind: &mut AxisKind, meta: &mut SpectrumMeta) -> Result<()> {
    for token in header.split_whitespace() {
        let Some((key, value)) = token.split_once('=') else {
            continue;
        };
        let bad = |what: &str| Error::Parse { line, message: format!("bad {what} '{value}' in header") };
        match key {
            "axis" => *kind = value.parse().map_err(|_| bad("axis kind"))?,
            "temperature_C" => {
                let t: f64 = value.parse().map_err(|_| bad("temperature"))?;
                meta.temperature_c = (!t.is_nan()).then_some(t);
            }
            "resolution_sigma" => meta.resolution_sigma = value.parse().map_err(|_| bad("resolution"))?,
            "device" | "device_id" => meta.device_id = Some(value.to_string()),
            _ => {}
        }
    }
    Ok(())
}
