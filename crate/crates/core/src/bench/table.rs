use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionModel, ProcessConfig};
use crate::error::{Error, Result};
use crate::modes::{bandwidth_compression, sinc2_crossing};
use crate::units::{width_nm_to_ghz, width_omega_to_nm};

/// The published literature table, shipped with the crate.
pub const TABLE1_CSV: &str = include_str!("../../data/table1.csv");

/// Input bandwidth (GHz) the compression column is computed against.
pub const INPUT_BANDWIDTH_GHZ: f64 = 963.0;

/// Output wavelength (nm) at which nm bandwidths are converted to GHz.
pub const OUTPUT_CENTER_NM: f64 = 550.0;

/// How an output bandwidth in the table was quoted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthKind {
    /// Full width.
    #[default]
    Full,
    /// 1/e half-width σ; the full width is 2σ.
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiteratureEntry {
    pub length_mm: f64,
    pub output_bandwidth_nm: Option<f64>,
    #[serde(default)]
    pub bandwidth_kind: BandwidthKind,
    pub selectivity_db: Option<f64>,
    /// Footnote mark printed after the selectivity.
    #[serde(default)]
    pub selectivity_note: String,
    pub bandwidth_compression: Option<f64>,
    /// Internal conversion efficiency in percent.
    pub internal_efficiency_pct: Option<f64>,
    #[serde(default)]
    pub efficiency_note: String,
    /// 1/(W·cm²).
    pub eta_norm: Option<f64>,
    pub citation: String,
    /// The device characterised by this crate's examples.
    #[serde(default)]
    pub this_device: bool,
}

impl LiteratureEntry {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_mm > 0.0) {
            return Err(Error::Config(format!("{}: length must be > 0", self.citation)));
        }
        let any = self.output_bandwidth_nm.is_some()
            || self.selectivity_db.is_some()
            || self.bandwidth_compression.is_some()
            || self.internal_efficiency_pct.is_some()
            || self.eta_norm.is_some();
        if !any {
            return Err(Error::Config(format!("{}: at least one metric is required", self.citation)));
        }
        Ok(())
    }

    /// Output bandwidth as a full width in GHz.
    pub fn output_bandwidth_ghz(&self) -> Option<f64> {
        let nm = self.output_bandwidth_nm?;
        let full = match self.bandwidth_kind {
            BandwidthKind::Full => nm,
            BandwidthKind::Sigma => 2.0 * nm,
        };
        Some(width_nm_to_ghz(full, OUTPUT_CENTER_NM))
    }

    pub fn computed_compression(&self) -> Option<f64> {
        bandwidth_compression(INPUT_BANDWIDTH_GHZ, self.output_bandwidth_ghz()?).ok()
    }
}

pub fn read_entries<R: Read>(reader: R) -> Result<Vec<LiteratureEntry>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.deserialize::<LiteratureEntry>() {
        let entry = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        entry.validate()?;
        out.push(entry);
    }
    Ok(out)
}

pub fn builtin_entries() -> Vec<LiteratureEntry> {
    read_entries(TABLE1_CSV.as_bytes()).expect("bundled table parses")
}

const ENTRY_HEADER: &str = "length_mm,output_bandwidth_nm,bandwidth_kind,selectivity_db,selectivity_note,\
bandwidth_compression,internal_efficiency_pct,efficiency_note,eta_norm,citation,this_device";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Dataset CSV in the bundled file's exact layout.
pub fn write_entries(entries: &[LiteratureEntry]) -> String {
    let mut s = format!("{ENTRY_HEADER}\n");
    for e in entries {
        let kind = match e.bandwidth_kind {
            BandwidthKind::Full => "full",
            BandwidthKind::Sigma => "sigma",
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            e.length_mm,
            opt(e.output_bandwidth_nm),
            kind,
            opt(e.selectivity_db),
            e.selectivity_note,
            opt(e.bandwidth_compression),
            opt(e.internal_efficiency_pct),
            e.efficiency_note,
            opt(e.eta_norm),
            e.citation,
            e.this_device
        );
    }
    s
}

/// Output FWHM (nm) of an ideal uniform device of `length_mm` built on the
/// template's process.
pub fn ideal_fwhm_nm(template: &ProcessConfig, model: &DispersionModel, length_mm: f64) -> Result<f64> {
    let cfg = template.clone().with_length_mm(length_mm)?;
    let slope = crate::dispersion::output_slope(&cfg, model)?.abs();
    if slope == 0.0 {
        return Err(Error::Degenerate("Δβ does not depend on the output frequency".into()));
    }
    let fwhm_omega = 4.0 * sinc2_crossing(0.5)? / (cfg.length_m() * slope);
    Ok(width_omega_to_nm(fwhm_omega, cfg.output_nm()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub entry: LiteratureEntry,
    pub output_bandwidth_ghz: Option<f64>,
    pub computed_compression: Option<f64>,
    pub ideal_fwhm_nm: f64,
    /// Measured bandwidth narrower than an ideal device of the same length
    /// can produce, which points to external filtering.
    pub anomalous: bool,
    pub unit_efficiency_power_mw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub input_bandwidth_ghz: f64,
    pub output_center_nm: f64,
    pub rows: Vec<ComparisonRow>,
}

pub fn comparison_report(
    entries: &[LiteratureEntry],
    template: &ProcessConfig,
    model: &DispersionModel,
) -> Result<ComparisonReport> {
    let rows = entries
        .iter()
        .map(|e| {
            let ideal = ideal_fwhm_nm(template, model, e.length_mm)?;
            let full_nm = e.output_bandwidth_nm.map(|nm| match e.bandwidth_kind {
                BandwidthKind::Full => nm,
                BandwidthKind::Sigma => 2.0 * nm,
            });
            let unit = match e.eta_norm {
                Some(eta) => Some(1e3 * crate::efficiency::unit_efficiency_power(eta, e.length_mm / 10.0)?),
                None => None,
            };
            Ok(ComparisonRow {
                entry: e.clone(),
                output_bandwidth_ghz: e.output_bandwidth_ghz(),
                computed_compression: e.computed_compression(),
                ideal_fwhm_nm: ideal,
                anomalous: full_nm.is_some_and(|bw| bw < ideal),
                unit_efficiency_power_mw: unit,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonReport { input_bandwidth_ghz: INPUT_BANDWIDTH_GHZ, output_center_nm: OUTPUT_CENTER_NM, rows })
}

impl ComparisonReport {
    /// Table layout: the published columns as printed, then derived columns.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "length_mm,output_bandwidth_nm,selectivity_db,bandwidth_compression,internal_efficiency,eta_norm,ref,\
output_bandwidth_ghz,computed_compression,ideal_fwhm_nm,anomalous,unit_efficiency_power_mw\n",
        );
        let dash = |v: Option<f64>, note: &str| v.map(|x| format!("{x}{note}")).unwrap_or_else(|| "-".into());
        let fixed = |v: Option<f64>, digits: usize| v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            let e = &r.entry;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{:.4},{},{}",
                e.length_mm,
                dash(e.output_bandwidth_nm, ""),
                dash(e.selectivity_db, &e.selectivity_note),
                dash(e.bandwidth_compression, ""),
                e.internal_efficiency_pct.map(|x| format!("{x}%{}", e.efficiency_note)).unwrap_or_else(|| "-".into()),
                dash(e.eta_norm, ""),
                e.citation,
                fixed(r.output_bandwidth_ghz, 2),
                fixed(r.computed_compression, 2),
                r.ideal_fwhm_nm,
                r.anomalous,
                fixed(r.unit_efficiency_power_mw, 1),
            );
        }
        s
    }

    /// JSON with derived values rounded as in the CSV, so the file is stable
    /// against last-bit differences in the math library.
    pub fn to_json(&self) -> Result<String> {
        let round = |v: f64, d: i32| (v * 10f64.powi(d)).round() / 10f64.powi(d);
        let mut copy = self.clone();
        for r in &mut copy.rows {
            r.output_bandwidth_ghz = r.output_bandwidth_ghz.map(|v| round(v, 2));
            r.computed_compression = r.computed_compression.map(|v| round(v, 2));
            r.ideal_fwhm_nm = round(r.ideal_fwhm_nm, 4);
            r.unit_efficiency_power_mw = r.unit_efficiency_power_mw.map(|v| round(v, 1));
        }
        let mut s = serde_json::to_string_pretty(&copy)?;
        s.push('\n');
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_round_trips() {
        let entries = builtin_entries();
        assert_eq!(entries.len(), 9);
        assert_eq!(write_entries(&entries), TABLE1_CSV);
    }

    #[test]
    fn empty_report_has_headers_only() {
        let cfg = ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 71.0).unwrap();
        let r = comparison_report(&[], &cfg, &DispersionModel::default()).unwrap();
        assert_eq!(r.to_csv().lines().count(), 1);
    }

    #[test]
    fn entry_needs_a_metric() {
        let mut e = builtin_entries()[0].clone();
        e.output_bandwidth_nm = None;
        e.selectivity_db = None;
        e.bandwidth_compression = None;
        e.internal_efficiency_pct = None;
        e.eta_norm = None;
        assert!(e.validate().is_err());
    }
}
