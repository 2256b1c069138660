//! Benchmarks against the literature: length sweeps of bandwidth and
//! extinction, efficiency curves, and the comparison table.

mod curves;
mod sweep;
mod table;

pub use curves::{efficiency_curves, CurveSet, DeviceFigures, EfficiencyCurve};
pub use sweep::{sweep_csv, sweep_length, PumpPolicy, SweepOptions, SweepRow};
pub use table::{
    builtin_entries, comparison_report, ideal_fwhm_nm, read_entries, write_entries, BandwidthKind, ComparisonReport,
    ComparisonRow, LiteratureEntry, INPUT_BANDWIDTH_GHZ, OUTPUT_CENTER_NM, TABLE1_CSV,
};

use crate::dispersion::ProcessConfig;

/// The characterised device: 1550 nm signal, 850 nm pump, 4.4 µm poling,
/// 200 °C, 71 mm.
pub fn reference_process() -> ProcessConfig {
    ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 71.0).expect("reference process is valid")
}
