use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use qpg_core::bench::{
    builtin_entries, comparison_report, efficiency_curves, ideal_fwhm_nm, read_entries, reference_process,
    sweep_csv, sweep_length, write_entries, DeviceFigures, PumpPolicy,
};
use qpg_core::config::{ExperimentConfig, ResolutionSection};
use qpg_core::dispersion::{DeltaBetaProfile, DispersionModel, ProcessConfig};
use qpg_core::efficiency::{
    efficiency_curve, fit_eta_norm, read_depletion_csv, unit_efficiency_power, write_depletion_csv, EfficiencyPoint,
};
use qpg_core::inverse::{run_fit, Checkpoint, FitProblem, FitResult, RunControl};
use qpg_core::modes::{
    build_jsa, extinction_from_selectivity, jsa_axes, mode_projection_power, schmidt_decompose, selectivity,
    JsaGrid, ProjectionPowers, PumpEnvelope, SchmidtSummary, Selectivity, SpectralWidth,
};
use qpg_core::numeric::linspace;
use qpg_core::phasematch::{
    bandwidth, convolve_resolution, pm_spectrum, BandwidthMetric, Normalization, Scan, Spectrum,
};

use crate::manifest::ManifestBuilder;
use crate::output::OutputDir;
use crate::plot::{heat_map, line_plot, Series};
use crate::{CliError, CommonArgs, CONFIG_DIR_ENV, DEFAULT_CONFIG_NAME};

type CliResult<T> = Result<T, CliError>;

/// Pump width used when neither the config nor the flags give one, nm.
pub const DEFAULT_PUMP_SIGMA_NM: f64 = 2.12;
/// Points in the default output scan.
pub const DEFAULT_SCAN_POINTS: usize = 2001;
/// Half-span of the default output scan in ideal FWHMs.
pub const DEFAULT_SCAN_HALF_SPAN_FWHM: f64 = 10.0;
/// Schmidt coefficients kept in reports.
pub const SCHMIDT_KEEP: usize = 10;

struct LoadedConfig {
    config: ExperimentConfig,
    path: PathBuf,
}

fn locate_config(path: Option<&Path>) -> CliResult<Option<PathBuf>> {
    let env_dir = std::env::var_os(CONFIG_DIR_ENV).map(PathBuf::from);
    match path {
        Some(p) if p.exists() => Ok(Some(p.to_path_buf())),
        Some(p) => {
            if p.is_relative() {
                if let Some(dir) = &env_dir {
                    let candidate = dir.join(p);
                    if candidate.exists() {
                        return Ok(Some(candidate));
                    }
                }
            }
            Err(CliError::Usage(format!("config file {} not found", p.display())))
        }
        None => Ok(env_dir.map(|d| d.join(DEFAULT_CONFIG_NAME)).filter(|p| p.exists())),
    }
}

fn load_config(common: &CommonArgs, required: bool) -> CliResult<Option<LoadedConfig>> {
    match locate_config(common.config.as_deref())? {
        Some(path) => {
            let config = ExperimentConfig::load(&path).map_err(|source| CliError::Input { path: path.clone(), source })?;
            Ok(Some(LoadedConfig { config, path }))
        }
        None if required => Err(CliError::Usage(format!(
            "no config given: pass --config or set {CONFIG_DIR_ENV} to a directory containing {DEFAULT_CONFIG_NAME}"
        ))),
        None => Ok(None),
    }
}

fn require_config(common: &CommonArgs) -> CliResult<LoadedConfig> {
    Ok(load_config(common, true)?.expect("required config is present"))
}

fn start(common: &CommonArgs, subcommand: &str, loaded: Option<&LoadedConfig>) -> CliResult<(OutputDir, ManifestBuilder)> {
    let out = OutputDir::create(&common.out)?;
    let mut manifest = ManifestBuilder::new(subcommand);
    if let Some(l) = loaded {
        manifest.input(&l.path)?;
    }
    Ok((out, manifest))
}

fn echo(out: &mut OutputDir, manifest: &mut ManifestBuilder, config: &ExperimentConfig) -> CliResult<()> {
    manifest.config_echo(out, &config.to_toml_string()?)?;
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value).map_err(qpg_core::Error::from)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

fn input<T>(path: &Path, r: qpg_core::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Input { path: path.to_path_buf(), source })
}

/// Reads a profile JSON, either a bare profile or a fit result.
pub fn read_profile(path: &Path) -> CliResult<DeltaBetaProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    if let Ok(p) = serde_json::from_str::<DeltaBetaProfile>(&text) {
        return Ok(p);
    }
    serde_json::from_str::<FitResult>(&text)
        .map(|r| r.best_profile)
        .map_err(|e| CliError::Input { path: path.to_path_buf(), source: e.into() })
}

#[derive(Debug, Clone, Args)]
pub struct SimulatePmArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Device length override, mm.
    #[arg(long)]
    pub length_mm: Option<f64>,
    /// Temperature override, °C.
    #[arg(long)]
    pub temperature_c: Option<f64>,
    /// Δβ profile JSON (a profile or a fit-profile result).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Instrument resolution FWHM, nm (replaces `[resolution]`).
    #[arg(long)]
    pub resolution_nm: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PmSummary {
    length_mm: f64,
    temperature_c: f64,
    sections: usize,
    resolution_fwhm_nm: f64,
    peak_nm: f64,
    fwhm_nm: Option<f64>,
    one_over_e_nm: Option<f64>,
}

/// Output scan centred on the design output wavelength.
pub fn default_scan(process: &ProcessConfig, model: &DispersionModel) -> qpg_core::Result<Scan> {
    let fwhm = ideal_fwhm_nm(process, model, process.length_mm())?;
    let half = DEFAULT_SCAN_HALF_SPAN_FWHM * fwhm;
    let o = process.output_nm();
    Ok(Scan::output_linspace(o - half, o + half, DEFAULT_SCAN_POINTS, process.signal_nm()))
}

/// Experiment config after the simulate-pm flag overrides.
pub fn simulate_pm_config(mut config: ExperimentConfig, args: &SimulatePmArgs) -> qpg_core::Result<ExperimentConfig> {
    if let Some(l) = args.length_mm {
        config.process = config.process.with_length_mm(l)?;
    }
    if let Some(t) = args.temperature_c {
        config.process = config.process.with_temperature_c(t);
    }
    if let Some(r) = args.resolution_nm {
        config.resolution = ResolutionSection { sigma_nm: None, fwhm_nm: Some(r) };
    }
    Ok(config)
}

/// Convolved, peak-normalised spectrum exactly as `simulate-pm` writes it.
pub fn simulate_pm_spectrum(config: &ExperimentConfig, profile: Option<&DeltaBetaProfile>) -> qpg_core::Result<Spectrum> {
    let (process, model) = config.resolve()?;
    let scan = match &config.scan {
        Some(s) => s.to_scan(&process)?,
        None => default_scan(&process, &model)?,
    };
    let raw = pm_spectrum(&process, &model, profile, &scan, Normalization::Absolute)?;
    convolve_resolution(&raw, &config.resolution.kernel()?)?.peak_normalized()
}

pub fn simulate_pm(args: &SimulatePmArgs) -> CliResult<PathBuf> {
    let loaded = require_config(&args.common)?;
    let config = simulate_pm_config(loaded.config.clone(), args)?;
    let (mut out, mut manifest) = start(&args.common, "simulate-pm", Some(&loaded))?;
    let profile = match &args.profile {
        Some(p) => {
            manifest.input(p)?;
            Some(read_profile(p)?)
        }
        None => None,
    };
    let spectrum = simulate_pm_spectrum(&config, profile.as_ref())?;
    echo(&mut out, &mut manifest, &config)?;
    out.write("spectrum.csv", spectrum.to_csv_string().as_bytes())?;
    let (i, _) = spectrum.peak();
    let summary = PmSummary {
        length_mm: config.process.length_mm(),
        temperature_c: config.process.temperature_c,
        sections: profile.as_ref().map_or(1, DeltaBetaProfile::sections),
        resolution_fwhm_nm: config.resolution.kernel()?.fwhm(),
        peak_nm: spectrum.axis()[i],
        fwhm_nm: bandwidth(&spectrum, BandwidthMetric::Fwhm).ok(),
        one_over_e_nm: bandwidth(&spectrum, BandwidthMetric::OneOverE).ok(),
    };
    out.write("summary.json", &json_bytes(&summary)?)?;
    if args.common.plot {
        let svg = line_plot(
            "Phase-matching spectrum",
            "wavelength (nm)",
            "normalised intensity",
            &[Series { label: "simulated", x: spectrum.axis(), y: spectrum.intensity() }],
        );
        out.write("spectrum.svg", svg.as_bytes())?;
    }
    manifest.finish(&mut out)?;
    Ok(out.root().to_path_buf())
}

#[derive(Debug, Clone, Args)]
pub struct PumpArgs {
    /// Hermite–Gauss order of the pump envelope.
    #[arg(long)]
    pub pump_order: Option<usize>,
    /// Pump centre wavelength, nm.
    #[arg(long)]
    pub pump_center_nm: Option<f64>,
    /// Pump 1/e intensity half-width, nm.
    #[arg(long)]
    pub pump_sigma_nm: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct JsaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub pump: PumpArgs,
    /// Δβ profile JSON applied to the phase matching.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Skip the order-n versus order-0 projection.
    #[arg(long)]
    pub no_projection: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SchmidtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub pump: PumpArgs,
    /// Complex JSA CSV (`signal_omega,output_omega,re,im`) to decompose
    /// instead of building one from the config.
    #[arg(long)]
    pub jsa: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ModeReport {
    pub schmidt: SchmidtSummary,
    pub selectivity: Selectivity,
    /// `−10·log10(1 − S)` for the selectivity above.
    pub selectivity_extinction_db: f64,
    pub pump: Option<PumpEnvelope>,
    pub projection: Option<ProjectionReport>,
}

#[derive(Debug, Serialize)]
pub struct ProjectionReport {
    pub order: usize,
    pub p_n: f64,
    pub p_0: f64,
    pub ratio: f64,
    pub extinction_db: f64,
}

/// Pump from the config `[pump]` table with flag overrides; defaults to a
/// Gaussian at the process pump wavelength.
pub fn resolve_pump(config: &ExperimentConfig, args: &PumpArgs) -> qpg_core::Result<PumpEnvelope> {
    let mut pump = config
        .pump
        .clone()
        .unwrap_or_else(|| PumpEnvelope::gaussian(config.process.pump_nm(), SpectralWidth::Nm(DEFAULT_PUMP_SIGMA_NM)));
    if let Some(n) = args.pump_order {
        pump.order = n;
    }
    if let Some(c) = args.pump_center_nm {
        pump.center_nm = c;
    }
    if let Some(s) = args.pump_sigma_nm {
        pump.sigma = SpectralWidth::Nm(s);
    }
    pump.validate()?;
    Ok(pump)
}

/// JSA on the configured grid.
pub fn build_config_jsa(
    config: &ExperimentConfig,
    pump: &PumpEnvelope,
    profile: Option<&DeltaBetaProfile>,
) -> qpg_core::Result<JsaGrid> {
    let (process, model) = config.resolve()?;
    let (s, o) = jsa_axes(&process, &model, pump, &config.grid)?;
    build_jsa(&process, &model, profile, pump, s, o)
}

/// Order-`n` versus order-0 projection; an order-0 pump is compared with
/// its order-1 counterpart.
pub fn projection_report(
    config: &ExperimentConfig,
    pump: &PumpEnvelope,
    profile: Option<&DeltaBetaProfile>,
) -> qpg_core::Result<ProjectionReport> {
    let (process, model) = config.resolve()?;
    let probe = if pump.order == 0 { pump.clone().with_order(1) } else { pump.clone() };
    let p: ProjectionPowers = mode_projection_power(&process, &model, profile, &probe, &config.projection)?;
    Ok(ProjectionReport { order: p.order, p_n: p.p_n, p_0: p.p_0, ratio: p.ratio(), extinction_db: p.extinction_db()? })
}

pub fn mode_report(jsa: &JsaGrid, pump: Option<PumpEnvelope>, projection: Option<ProjectionReport>) -> qpg_core::Result<ModeReport> {
    let d = schmidt_decompose(jsa)?;
    let sel = selectivity(&d, 0)?;
    Ok(ModeReport {
        schmidt: d.summary(SCHMIDT_KEEP),
        selectivity: sel,
        selectivity_extinction_db: extinction_from_selectivity(sel.selectivity),
        pump,
        projection,
    })
}

fn jsi_plot(jsa: &JsaGrid) -> String {
    let i = jsa.intensity();
    let rows: Vec<Vec<f64>> = (0..i.nrows()).map(|r| i.row(r).iter().copied().collect()).collect();
    let s = jsa.signal_omega();
    let o = jsa.output_omega();
    heat_map(
        "Joint spectral intensity",
        "output ω (rad/s)",
        "signal ω (rad/s)",
        (o[0], o[o.len() - 1]),
        (s[0], s[s.len() - 1]),
        &rows,
    )
}

pub fn jsa(args: &JsaArgs) -> CliResult<PathBuf> {
    let loaded = require_config(&args.common)?;
    let config = loaded.config.clone();
    let (mut out, mut manifest) = start(&args.common, "jsa", Some(&loaded))?;
    let profile = match &args.profile {
        Some(p) => {
            manifest.input(p)?;
            Some(read_profile(p)?)
        }
        None => None,
    };
    let pump = resolve_pump(&config, &args.pump)?;
    let grid = build_config_jsa(&config, &pump, profile.as_ref())?;
    let projection = if args.no_projection { None } else { Some(projection_report(&config, &pump, profile.as_ref())?) };
    let report = mode_report(&grid, Some(pump.clone()), projection)?;
    let config = ExperimentConfig { pump: Some(pump), ..config };
    echo(&mut out, &mut manifest, &config)?;
    out.write("jsi.csv", grid.intensity_csv().as_bytes())?;
    out.write("jsi_axes.json", &json_bytes(&grid.sidecar())?)?;
    out.write("jsa_amplitude.csv", grid.amplitude_csv().as_bytes())?;
    out.write("schmidt.json", &json_bytes(&report)?)?;
    if args.common.plot {
        out.write("jsi.svg", jsi_plot(&grid).as_bytes())?;
    }
    manifest.finish(&mut out)?;
    Ok(out.root().to_path_buf())
}

pub fn schmidt(args: &SchmidtArgs) -> CliResult<PathBuf> {
    let loaded = load_config(&args.common, args.jsa.is_none())?;
    let (mut out, mut manifest) = start(&args.common, "schmidt", loaded.as_ref())?;
    let (grid, pump) = match &args.jsa {
        Some(path) => {
            manifest.input(path)?;
            (input(path, JsaGrid::read_amplitude_csv(open(path)?))?, None)
        }
        None => {
            let config = &loaded.as_ref().expect("config required without --jsa").config;
            let pump = resolve_pump(config, &args.pump)?;
            (build_config_jsa(config, &pump, None)?, Some(pump))
        }
    };
    let report = mode_report(&grid, pump.clone(), None)?;
    if let Some(l) = &loaded {
        let config = ExperimentConfig { pump: pump.or(l.config.pump.clone()), ..l.config.clone() };
        echo(&mut out, &mut manifest, &config)?;
    }
    out.write("schmidt.json", &json_bytes(&report)?)?;
    if args.common.plot {
        let rho = &report.schmidt.coefficients;
        let n: Vec<f64> = (0..rho.len()).map(|k| k as f64).collect();
        let svg = line_plot("Schmidt coefficients", "mode n", "ρ_n", &[Series { label: "ρ_n", x: &n, y: rho }]);
        out.write("schmidt.svg", svg.as_bytes())?;
    }
    manifest.finish(&mut out)?;
    Ok(out.root().to_path_buf())
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Measured spectrum CSV (`axis,intensity`); defaults to `[fit] measurement`.
    #[arg(long)]
    pub measurement: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sections: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    /// Continue from the newest checkpoint in the checkpoint directory.
    #[arg(long)]
    pub resume: bool,
    /// Checkpoint directory; defaults to `<out>/checkpoints`.
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
}

/// Experiment config after the fit-profile flag overrides.
pub fn fit_config(mut config: ExperimentConfig, args: &FitArgs) -> qpg_core::Result<ExperimentConfig> {
    if let Some(s) = args.seed {
        config.ga.seed = s;
    }
    if let Some(s) = args.sections {
        config.ga.sections = s;
    }
    if let Some(g) = args.generations {
        config.ga.generations = g;
    }
    if let Some(p) = args.population {
        config.ga.population = p;
    }
    config.ga.validate()?;
    Ok(config)
}

/// Fitting problem for a measurement, scanned as the config's `[scan]`
/// describes (a signal scan at the process pump when absent).
pub fn fit_problem(config: &ExperimentConfig, measured: &Spectrum) -> qpg_core::Result<FitProblem> {
    let (process, model) = config.resolve()?;
    let axis = measured.axis();
    let template = match &config.scan {
        Some(s) => s.to_scan(&process)?,
        None => Scan::signal_linspace(axis[0], axis[axis.len() - 1], axis.len(), process.pump_nm()),
    };
    FitProblem::new(measured, &template, &process, &model, &config.resolution.kernel()?)
}

pub fn fit_profile(args: &FitArgs) -> CliResult<PathBuf> {
    let loaded = require_config(&args.common)?;
    let config = fit_config(loaded.config.clone(), args)?;
    let measurement = match (&args.measurement, &config.fit) {
        (Some(p), _) => p.clone(),
        (None, Some(f)) => loaded.path.parent().unwrap_or(Path::new(".")).join(&f.measurement),
        (None, None) => {
            return Err(CliError::Usage("no measurement: pass --measurement or set [fit] measurement".into()));
        }
    };
    let (mut out, mut manifest) = start(&args.common, "fit-profile", Some(&loaded))?;
    manifest.input(&measurement)?;
    manifest.seed(config.ga.seed);
    let measured = input(&measurement, Spectrum::read_csv(open(&measurement)?))?;
    let problem = fit_problem(&config, &measured)?;
    let checkpoints = args.checkpoint_dir.clone().unwrap_or_else(|| out.root().join("checkpoints"));
    std::fs::create_dir_all(&checkpoints)?;
    let control = RunControl { checkpoint_dir: Some(checkpoints.clone()), resume: args.resume };
    let result = run_fit(&problem, &config.ga, &control)?;
    echo(&mut out, &mut manifest, &config)?;
    out.write("fit_result.json", &json_bytes(&result)?)?;
    out.write("best_profile.json", &json_bytes(&result.best_profile)?)?;
    let best = problem.simulated_spectrum(&result.best_profile)?;
    out.write("best_spectrum.csv", best.to_csv_string().as_bytes())?;
    out.write("mse_trace.csv", result.trace_csv().as_bytes())?;
    if checkpoints.starts_with(out.root()) {
        if let Some(cp) = Checkpoint::latest(&checkpoints)? {
            let rel = checkpoints.strip_prefix(out.root()).unwrap_or(Path::new("")).join(Checkpoint::file_name(cp.generation));
            out.record(&rel)?;
        }
    }
    if args.common.plot {
        let svg = line_plot(
            "Measured and fitted phase matching",
            "wavelength (nm)",
            "normalised intensity",
            &[
                Series { label: "measured", x: problem.measured_axis(), y: problem.measured() },
                Series { label: "fit", x: best.axis(), y: best.intensity() },
            ],
        );
        out.write("fit.svg", svg.as_bytes())?;
        let gens: Vec<f64> = result.trace.iter().map(|r| r.generation as f64).collect();
        let best_mse: Vec<f64> = result.trace.iter().map(|r| r.best_mse.log10()).collect();
        let svg = line_plot("Best MSE", "generation", "log10 MSE", &[Series { label: "best", x: &gens, y: &best_mse }]);
        out.write("mse_trace.svg", svg.as_bytes())?;
    }
    manifest.finish(&mut out)?;
    Ok(out.root().to_path_buf())
}

#[derive(Debug, Clone, Args)]
pub struct EfficiencyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Depletion CSV (`power_W,efficiency`) to fit η_norm to.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Interaction length, cm; defaults to the config device length, else 7.1.
    #[arg(long)]
    pub length_cm: Option<f64>,
    /// η_norm for the curve when no data is given, W⁻¹cm⁻².
    #[arg(long)]
    pub eta_norm: Option<f64>,
    /// Largest pump power of the curve, W; defaults to `[bench] max_power_w`.
    #[arg(long)]
    pub max_power_w: Option<f64>,
    /// Samples on the curve; defaults to `[bench] power_points`.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Serialize)]
struct EfficiencyReport {
    length_cm: f64,
    eta_norm: f64,
    unit_efficiency_power_mw: f64,
    fit: Option<qpg_core::efficiency::EtaNormFit>,
}

pub fn efficiency(args: &EfficiencyArgs) -> CliResult<PathBuf> {
    let loaded = load_config(&args.common, false)?;
    let (mut out, mut manifest) = start(&args.common, "efficiency", loaded.as_ref())?;
    let bench = loaded.as_ref().map(|l| l.config.bench.clone()).unwrap_or_default();
    let length_cm = args
        .length_cm
        .or(loaded.as_ref().map(|l| l.config.process.length_mm() / 10.0))
        .unwrap_or(reference_process().length_mm() / 10.0);
    let (points, fit) = match &args.data {
        Some(path) => {
            manifest.input(path)?;
            let points = input(path, read_depletion_csv(open(path)?))?;
            let fit = fit_eta_norm(&points, length_cm)?;
            (points, Some(fit))
        }
        None => (Vec::new(), None),
    };
    let eta_norm = fit
        .as_ref()
        .map(|f| f.eta_norm)
        .or(args.eta_norm)
        .unwrap_or(DeviceFigures::default().eta_norm);
    let powers = linspace(0.0, args.max_power_w.unwrap_or(bench.max_power_w), args.points.unwrap_or(bench.power_points));
    let curve = efficiency_curve(eta_norm, length_cm, &powers)?;
    let samples: Vec<EfficiencyPoint> =
        powers.iter().zip(&curve).map(|(&p, &e)| EfficiencyPoint::new(p, e)).collect::<qpg_core::Result<_>>()?;
    if let Some(l) = &loaded {
        echo(&mut out, &mut manifest, &l.config)?;
    }
    let report = EfficiencyReport {
        length_cm,
        eta_norm,
        unit_efficiency_power_mw: 1e3 * unit_efficiency_power(eta_norm, length_cm)?,
        fit,
    };
    out.write("efficiency.json", &json_bytes(&report)?)?;
    out.write("efficiency_curve.csv", write_depletion_csv(&samples).as_bytes())?;
    if args.common.plot {
        let mut series = vec![Series { label: "model", x: &powers, y: &curve }];
        let px: Vec<f64> = points.iter().map(|p| p.power_w).collect();
        let py: Vec<f64> = points.iter().map(|p| p.efficiency).collect();
        if !points.is_empty() {
            series.push(Series { label: "data", x: &px, y: &py });
        }
        out.write("efficiency.svg", line_plot("Conversion efficiency", "pump power (W)", "η", &series).as_bytes())?;
    }
    manifest.finish(&mut out)?;
    Ok(out.root().to_path_buf())
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sweep lengths, mm (comma separated); defaults to `[bench] lengths_mm`.
    #[arg(long, value_delimiter = ',')]
    pub lengths_mm: Option<Vec<f64>>,
    /// Optimise the pump width per length over [lo, hi] × the phase-matching
    /// width instead of the configured pump policy.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub optimize_pump: Option<Vec<f64>>,
    /// Literature dataset CSV replacing the built-in table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Only regenerate the table, report and efficiency curves.
    #[arg(long)]
    pub skip_sweep: bool,
}

pub fn bench(args: &BenchArgs) -> CliResult<PathBuf> {
    let loaded = load_config(&args.common, false)?;
    let (mut out, mut manifest) = start(&args.common, "bench", loaded.as_ref())?;
    let (process, model, bench, projection) = match &loaded {
        Some(l) => {
            let (p, m) = l.config.resolve()?;
            (p, m, l.config.bench.clone(), l.config.projection)
        }
        None => (reference_process(), DispersionModel::default(), Default::default(), Default::default()),
    };
    let entries = match &args.table {
        Some(path) => {
            manifest.input(path)?;
            input(path, read_entries(open(path)?))?
        }
        None => builtin_entries(),
    };
    let report = comparison_report(&entries, &process, &model)?;
    let mut options = bench.sweep_options(projection);
    if let Some(b) = &args.optimize_pump {
        options.pump = PumpPolicy::Optimized { lo: b[0], hi: b[1] };
    }
    let lengths = args.lengths_mm.clone().unwrap_or(bench.lengths_mm.clone());
    let sweep = if args.skip_sweep { None } else { Some(sweep_length(&process, &model, &lengths, &options)?) };
    let powers = linspace(0.0, bench.max_power_w, bench.power_points);
    let curves = efficiency_curves(&entries, &powers, Some(&DeviceFigures::default()))?;
    for w in &curves.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(l) = &loaded {
        echo(&mut out, &mut manifest, &l.config)?;
    }
    out.write("table1.csv", write_entries(&entries).as_bytes())?;
    out.write("comparison_report.csv", report.to_csv().as_bytes())?;
    out.write("comparison_report.json", report.to_json()?.as_bytes())?;
    out.write("efficiency_curves.csv", curves.to_csv().as_bytes())?;
    if let Some(rows) = &sweep {
        out.write("length_sweep.csv", sweep_csv(rows).as_bytes())?;
    }
    if args.common.plot {
        let series: Vec<Series> =
            curves.curves.iter().map(|c| Series { label: &c.citation, x: &c.powers_w, y: &c.efficiency }).collect();
        out.write("efficiency_curves.svg", line_plot("Conversion efficiency", "pump power (W)", "η", &series).as_bytes())?;
        if let Some(rows) = &sweep {
            let l: Vec<f64> = rows.iter().map(|r| r.length_mm).collect();
            let e: Vec<f64> = rows.iter().map(|r| r.extinction_db).collect();
            let svg = line_plot("Order-1 extinction", "length (mm)", "dB", &[Series { label: "extinction", x: &l, y: &e }]);
            out.write("length_sweep.svg", svg.as_bytes())?;
        }
    }
    manifest.finish(&mut out)?;
    Ok(out.root().to_path_buf())
}
