use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qpg_core::bench::reference_process;
use qpg_core::config::ExperimentConfig;
use qpg_core::dispersion::DeltaBetaProfile;
use qpg_core::efficiency::{conversion_efficiency, write_depletion_csv, EfficiencyPoint};
use qpg_core::modes::{build_jsa, jsa_axes, schmidt_decompose, JsaGrid};
use qpg_core::numeric::linspace;
use qpg_core::phasematch::{bandwidth, convolve_resolution, pm_spectrum, BandwidthMetric, Normalization, Spectrum};
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn configs() -> PathBuf {
    workspace().join("configs")
}

fn qpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpg")).args(args).env_remove("QPG_CONFIG_DIR").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = qpg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&read(p)).unwrap()
}

fn check_manifest(dir: &Path) {
    let m = json(&dir.join("manifest.json"));
    for o in m["outputs"].as_array().unwrap() {
        let path = dir.join(o["path"].as_str().unwrap());
        let digest = hex::encode(Sha256::digest(std::fs::read(&path).unwrap()));
        assert_eq!(digest, o["sha256"].as_str().unwrap(), "{}", path.display());
    }
    if let Some(h) = m["config_sha256"].as_str() {
        let echo = std::fs::read(dir.join("config.toml")).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&echo)), h);
        ExperimentConfig::from_toml_str(std::str::from_utf8(&echo).unwrap()).unwrap();
    }
}

fn library_spectrum(config: &ExperimentConfig, profile: Option<&DeltaBetaProfile>) -> Spectrum {
    let (process, model) = config.resolve().unwrap();
    let scan = config.scan.as_ref().unwrap().to_scan(&process).unwrap();
    let raw = pm_spectrum(&process, &model, profile, &scan, Normalization::Absolute).unwrap();
    convolve_resolution(&raw, &config.resolution.kernel().unwrap()).unwrap().peak_normalized().unwrap()
}

#[test]
fn simulate_pm_matches_library() {
    let dir = TempDir::new().unwrap();
    let cfg_path = configs().join("qpg.toml");
    ok(&["simulate-pm", "-c", s(&cfg_path), "-o", s(dir.path()), "--plot"]);
    let config = ExperimentConfig::load(&cfg_path).unwrap();
    let lib = library_spectrum(&config, None);
    assert_eq!(read(&dir.path().join("spectrum.csv")), lib.to_csv_string());
    let cli = Spectrum::read_csv(read(&dir.path().join("spectrum.csv")).as_bytes()).unwrap();
    let summary = json(&dir.path().join("summary.json"));
    let w = bandwidth(&lib, BandwidthMetric::OneOverE).unwrap();
    assert_eq!(summary["one_over_e_nm"].as_f64().unwrap(), w);
    assert_eq!(bandwidth(&cli, BandwidthMetric::OneOverE).unwrap(), w);
    assert!(dir.path().join("spectrum.svg").exists());
    check_manifest(dir.path());
}

#[test]
fn simulate_pm_with_profile_and_overrides_matches_library() {
    let dir = TempDir::new().unwrap();
    let offsets: Vec<f64> = (0..14).map(|j| 150.0 * (j as f64 * 0.9).sin()).collect();
    let profile = DeltaBetaProfile::equal_sections(40.0, offsets).unwrap();
    let profile_path = dir.path().join("profile.json");
    std::fs::write(&profile_path, serde_json::to_string(&profile).unwrap()).unwrap();
    let out = dir.path().join("run");
    let cfg_path = configs().join("qpg.toml");
    ok(&[
        "simulate-pm", "-c", s(&cfg_path), "-o", s(&out), "--profile", s(&profile_path),
        "--length-mm", "40", "--temperature-c", "190", "--resolution-nm", "0.01",
    ]);
    let mut config = ExperimentConfig::load(&cfg_path).unwrap();
    config.process = config.process.with_length_mm(40.0).unwrap().with_temperature_c(190.0);
    config.resolution.fwhm_nm = Some(0.01);
    assert_eq!(read(&out.join("spectrum.csv")), library_spectrum(&config, Some(&profile)).to_csv_string());
    assert_eq!(json(&out.join("summary.json"))["sections"], 14);
    check_manifest(&out);
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = qpg(&["simulate-pm", "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage"), "{err}");
    let out = qpg(&["jsa", "-c", "does-not-exist.toml", "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = qpg(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qpg")).args(args).env("QPG_CONFIG_DIR", configs()).output().unwrap()
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["simulate-pm", "-o", s(&a)]).status.success());
    assert!(run(&["simulate-pm", "-c", "qpg.toml", "-o", s(&b)]).status.success());
    assert_eq!(read(&a.join("spectrum.csv")), read(&b.join("spectrum.csv")));
}

#[test]
fn malformed_config_reports_line() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[process]\nsignal_nm = 1550.0\npump_nm = \"x\"\n").unwrap();
    let out = qpg(&["simulate-pm", "-c", s(&cfg), "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn jsa_single_lobe_and_projection() {
    let dir = TempDir::new().unwrap();
    let cfg_path = configs().join("fig1_jsa.toml");
    ok(&["jsa", "-c", s(&cfg_path), "-o", s(dir.path()), "--plot"]);
    let report = json(&dir.path().join("schmidt.json"));
    let rho: Vec<f64> =
        report["schmidt"]["coefficients"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(rho[0] > 0.9 && rho[0] > 10.0 * rho[1]);
    assert_eq!(report["projection"]["order"], 1);

    let config = ExperimentConfig::load(&cfg_path).unwrap();
    let (process, model) = config.resolve().unwrap();
    let pump = config.pump.clone().unwrap();
    let (sg, og) = jsa_axes(&process, &model, &pump, &config.grid).unwrap();
    let grid = build_jsa(&process, &model, None, &pump, sg, og).unwrap();
    let lib = schmidt_decompose(&grid).unwrap();
    for (a, b) in rho.iter().zip(lib.coefficients()) {
        assert_eq!(a, b);
    }
    assert_eq!(read(&dir.path().join("jsi.csv")), grid.intensity_csv());
    let back = JsaGrid::read_amplitude_csv(read(&dir.path().join("jsa_amplitude.csv")).as_bytes()).unwrap();
    assert_eq!(&back, &grid);
    check_manifest(dir.path());

    let order1 = dir.path().join("order1");
    ok(&["jsa", "-c", s(&cfg_path), "-o", s(&order1), "--pump-order", "1", "--pump-sigma-nm", "1.5"]);
    let r1 = json(&order1.join("schmidt.json"));
    assert_eq!(r1["pump"]["order"], 1);
    assert_eq!(r1["projection"]["order"], 1);
    let p = &r1["projection"];
    let ratio = p["p_n"].as_f64().unwrap() / p["p_0"].as_f64().unwrap();
    assert!((ratio - p["ratio"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn schmidt_of_separable_input() {
    let dir = TempDir::new().unwrap();
    let sig = linspace(0.0, 4.0, 40);
    let out = linspace(-2.0, 2.0, 30);
    let grid = JsaGrid::from_fn(sig, out, |a, b| {
        num_complex::Complex64::new((-(a - 2.0) * (a - 2.0)).exp() * (1.0 + b * b).recip(), 0.0)
    })
    .unwrap();
    let path = dir.path().join("jsa.csv");
    std::fs::write(&path, grid.amplitude_csv()).unwrap();
    let run = dir.path().join("run");
    ok(&["schmidt", "--jsa", s(&path), "-o", s(&run)]);
    let r = json(&run.join("schmidt.json"));
    assert!((r["selectivity"]["selectivity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    check_manifest(&run);

    std::fs::write(&path, "signal_omega,output_omega,re,im\n1,2,3,4\n1,3,oops,0\n").unwrap();
    let bad = qpg(&["schmidt", "--jsa", s(&path), "-o", s(&run)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
}

#[test]
fn fit_profile_roundtrip() {
    let dir = TempDir::new().unwrap();
    let out = qpg(&["fit-profile", "-c", s(&configs().join("room_temperature_fit.toml")), "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let result = json(&dir.path().join("fit_result.json"));
    assert!(result["best_mse"].as_f64().unwrap() <= 1e-6);
    assert_eq!(result["seed"], 7);
    assert!(read(&dir.path().join("mse_trace.csv")).starts_with("generation,"));
    Spectrum::read_csv(read(&dir.path().join("best_spectrum.csv")).as_bytes()).unwrap();
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["seed"], 7);
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    check_manifest(dir.path());
}

#[test]
fn fit_profile_resume_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("room_temperature_fit.toml");
    let resumed = dir.path().join("resumed");
    let direct = dir.path().join("direct");
    let base = ["fit-profile", "-c", s(&cfg), "--population", "12", "--seed", "4"];
    fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
        base.iter().chain(extra).copied().collect()
    }
    ok(&with(&base, &["-o", s(&resumed), "--generations", "4"]));
    ok(&with(&base, &["-o", s(&resumed), "--generations", "8", "--resume"]));
    ok(&with(&base, &["-o", s(&direct), "--generations", "8"]));
    assert_eq!(read(&resumed.join("fit_result.json")), read(&direct.join("fit_result.json")));
    assert_eq!(read(&resumed.join("mse_trace.csv")), read(&direct.join("mse_trace.csv")));
    check_manifest(&resumed);
}

#[test]
fn malformed_measurement_reports_line() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("meas.csv");
    std::fs::write(&csv, "axis,intensity\n1549.0,0.1\n1549.5,abc\n1550.0,1.0\n").unwrap();
    let out = qpg(&[
        "fit-profile", "-c", s(&configs().join("room_temperature_fit.toml")),
        "--measurement", s(&csv), "-o", s(&dir.path().join("run")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn efficiency_fit_from_depletion_data() {
    let dir = TempDir::new().unwrap();
    let points: Vec<EfficiencyPoint> = linspace(0.001, 0.03, 15)
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let eta = conversion_efficiency(1.15, p, 7.1).unwrap() * (1.0 + 0.005 * (17.0 * k as f64).sin());
            EfficiencyPoint::new(p, eta).unwrap()
        })
        .collect();
    let data = dir.path().join("depletion.csv");
    std::fs::write(&data, write_depletion_csv(&points)).unwrap();
    let run = dir.path().join("run");
    ok(&["efficiency", "--data", s(&data), "--length-cm", "7.1", "-o", s(&run), "--plot"]);
    let r = json(&run.join("efficiency.json"));
    assert!((r["fit"]["eta_norm"].as_f64().unwrap() - 1.15).abs() < 0.05);
    assert!(run.join("efficiency.svg").exists());
    check_manifest(&run);

    std::fs::write(&data, "power_W,efficiency\n0.001,0.01\n0.002\n").unwrap();
    let bad = qpg(&["efficiency", "--data", s(&data), "-o", s(&run)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
}

#[test]
fn bench_defaults_and_golden_report() {
    let dir = TempDir::new().unwrap();
    ok(&["bench", "-o", s(dir.path())]);
    let golden = workspace().join("crates/core/data/golden");
    for name in ["comparison_report.csv", "comparison_report.json"] {
        assert_eq!(read(&dir.path().join(name)), read(&golden.join(name)), "{name}");
    }
    assert_eq!(read(&dir.path().join("table1.csv")), read(&workspace().join("crates/core/data/table1.csv")));
    let sweep = read(&dir.path().join("length_sweep.csv"));
    let rows: Vec<Vec<f64>> =
        sweep.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0]);
    assert!(rows.windows(2).all(|w| w[1][4] >= w[0][4]));
    check_manifest(dir.path());
    assert_eq!(reference_process().length_mm(), 71.0);
}
