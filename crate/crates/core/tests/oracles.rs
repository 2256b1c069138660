//! Checks against quantities computed independently of the library code
//! paths they test.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qpg_core::dispersion::*;
use qpg_core::efficiency::*;
use qpg_core::inverse::*;
use qpg_core::modes::*;
use qpg_core::numeric::linspace;
use qpg_core::phasematch::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sinc2(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (x.sin() / x).powi(2)
    }
}

#[test]
fn sinc_half_power_root_by_bisection() {
    let x = bisect(|x| sinc2(x) - 0.5, 0.5, 3.0);
    assert!((x - 1.391_557_4).abs() < 1e-6);
    assert!((sinc2_crossing(0.5).unwrap() - x).abs() < 1e-10);
    let l = 0.071;
    assert!((pm_uniform(2.0 * x / l, l).norm_sqr() - 0.5).abs() < 1e-12);
    let e = bisect(|x| sinc2(x) - (-1.0f64).exp(), 0.5, 3.0);
    assert!((sinc2_crossing((-1.0f64).exp()).unwrap() - e).abs() < 1e-10);
    // First side lobe.
    let lobe = bisect(|x| x.tan() - x, 4.0, 4.6);
    assert!((sinc2(lobe) - 0.047_19).abs() < 1e-5);
}

/// `(1/L)∫₀^L exp(i∫₀^z [Δβ + f]) dz` by the midpoint rule. Steps must land on
/// the section boundaries.
fn brute_force(profile: &DeltaBetaProfile, db: f64, steps: usize) -> Complex64 {
    let l = profile.length_mm() * 1e-3;
    let dz = l / steps as f64;
    let mut phase = 0.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..steps {
        let z_mid_mm = (k as f64 + 0.5) * dz * 1e3;
        let b = db + profile.offset_at(z_mid_mm);
        acc += Complex64::from_polar(1.0, phase + 0.5 * b * dz) * dz;
        phase += b * dz;
    }
    acc / l
}

#[test]
fn profile_amplitude_matches_quadrature() {
    let p = DeltaBetaProfile::new(vec![0.0, 5.0, 22.0, 40.0, 71.0], vec![120.0, -40.0, 0.0, 75.0]).unwrap();
    for db in [-300.0, -50.0, 0.0, 12.5, 90.0, 400.0] {
        let exact = pm_profile(&p, db);
        let quad = brute_force(&p, db, 142_000);
        assert!((exact - quad).norm() <= 1e-6 * exact.norm().max(1e-3), "Δβ = {db}: {exact} vs {quad}");
    }
}

/// Gauss–Hermite nodes and weights (Golub–Welsch) for `∫ f(x) e^{−x²} dx`.
fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let j = DMatrix::from_fn(n, n, |i, k| if i + 1 == k || k + 1 == i { (i.max(k) as f64 / 2.0).sqrt() } else { 0.0 });
    let eig = SymmetricEigen::new(j);
    (0..n)
        .map(|i| (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect()
}

#[test]
fn hermite_gaussian_pumps_are_orthonormal_under_gauss_hermite() {
    let sigma = 1.7e12;
    let pumps: Vec<PumpEnvelope> =
        (0..4).map(|n| PumpEnvelope::gaussian(850.0, SpectralWidth::RadPerS(sigma)).with_order(n)).collect();
    let c = pumps[0].center_omega();
    let nodes = gauss_hermite(40);
    let inner = |a: &PumpEnvelope, b: &PumpEnvelope| -> f64 {
        nodes
            .iter()
            .map(|&(x, w)| {
                let om = c + sigma * x;
                w * (x * x).exp() * (a.amplitude(om).conj() * b.amplitude(om)).re * sigma
            })
            .sum()
    };
    for m in 0..4 {
        for n in 0..4 {
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((inner(&pumps[m], &pumps[n]) - want).abs() < 1e-8, "⟨{m}|{n}⟩");
        }
    }
    // Closed form of the order-2 function: (4x² − 2)e^{−x²/2}/√(8√π).
    for x in [-2.0f64, -0.3, 0.0, 1.1, 3.0] {
        let closed = (4.0 * x * x - 2.0) * (-0.5 * x * x).exp() / (8.0 * std::f64::consts::PI.sqrt()).sqrt();
        assert!((hermite_function(2, x) - closed).abs() < 1e-14);
    }
}

#[test]
fn double_gaussian_schmidt_spectrum_is_geometric() {
    let (a, b) = (4.0, 1.0);
    let axis = linspace(-7.0, 7.0, 281);
    let jsa = JsaGrid::from_fn(axis.clone(), axis, |x, y| {
        Complex64::new((-a * (x + y) * (x + y) - b * (x - y) * (x - y)).exp(), 0.0)
    })
    .unwrap();
    let d = schmidt_decompose(&jsa).unwrap();
    let mu = ((a.sqrt() - b.sqrt()) / (a.sqrt() + b.sqrt())).powi(2);
    for n in 0..8 {
        let want = (1.0 - mu) * mu.powi(n as i32);
        assert!((d.coefficients()[n] - want).abs() < 1e-6, "ρ_{n}: {} vs {want}", d.coefficients()[n]);
    }
    // The fourth-root form disagrees with the decomposition.
    let mu4 = ((a.powf(0.25) - b.powf(0.25)) / (a.powf(0.25) + b.powf(0.25))).powi(2);
    assert!((d.coefficients()[0] - (1.0 - mu4)).abs() > 1e-2);
}

fn device() -> (ProcessConfig, DispersionModel) {
    let model = DispersionModel::default();
    let cfg = phase_matched_at_center(&ProcessConfig::new(1550.0, 850.0, 4.4, 200.0, 71.0).unwrap(), &model).unwrap();
    (cfg, model)
}

#[test]
fn schmidt_coefficients_converge_under_grid_refinement() {
    let (cfg, model) = device();
    let pump = PumpEnvelope::gaussian(841.0, SpectralWidth::Nm(2.12));
    let rho = |n: usize| {
        let opts = GridOptions { signal_points: n, output_points: n, ..Default::default() };
        let (s, o) = jsa_axes(&cfg, &model, &pump, &opts).unwrap();
        let j = build_jsa(&cfg, &model, None, &pump, s, o).unwrap();
        schmidt_decompose(&j).unwrap().coefficients()[..5].to_vec()
    };
    let coarse = rho(160);
    let fine = rho(320);
    for k in 0..5 {
        assert!((coarse[k] - fine[k]).abs() < 1e-4, "ρ_{k}: {} vs {}", coarse[k], fine[k]);
    }
    // Single dominant lobe.
    assert!(fine[0] > 0.5 && fine[0] > 5.0 * fine[1]);
}

#[test]
fn group_velocity_matched_kernel_is_flat_along_the_signal() {
    let (cfg, model) = device();
    let DispersionModel::Sellmeier(s) = &model else { unreachable!() };
    let gvm = DispersionModel::Taylor(TaylorDispersionModel::ideal_qpg(&cfg, s).unwrap());
    let ws = cfg.signal_omega();
    let wo = cfg.output_omega();
    let h = 1e10;
    let phi2 = |x: f64, u: f64| {
        pm_uniform(delta_beta(&cfg, &gvm, ws + x, wo + u - ws - x).unwrap(), cfg.length_m()).norm_sqr()
    };
    for u in [-5e10, -1e10, 2e10, 4e10] {
        let along_signal = (phi2(h, u) - phi2(-h, u)) / (2.0 * h);
        let along_output = (phi2(0.0, u + h) - phi2(0.0, u - h)) / (2.0 * h);
        assert!(along_signal.abs() < 1e-9 * along_output.abs(), "u = {u}");
    }
}

#[test]
fn tournament_of_one_is_uniform() {
    let n = 10;
    let mse: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut counts = vec![0usize; n];
    let trials = 10_000;
    for _ in 0..trials {
        counts[tournament_select(&mse, 1, &mut rng).unwrap()] += 1;
    }
    let expected = trials as f64 / n as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((n - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 0.01, "χ² = {chi2}, p = {p}");
}

#[test]
fn tournament_sequence_is_seeded() {
    let mse: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64).collect();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).map(|_| tournament_select(&mse, 4, &mut rng).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}

#[test]
fn crossover_sources_are_balanced() {
    let a = vec![1.0; 14];
    let b = vec![2.0; 14];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut from_a = vec![0usize; 14];
    let trials = 10_000;
    for _ in 0..trials {
        let c = crossover_offsets(&a, &b, &mut rng).unwrap();
        for (j, v) in c.iter().enumerate() {
            if *v == 1.0 {
                from_a[j] += 1;
            }
        }
    }
    for f in from_a {
        assert!((f as f64 / trials as f64 - 0.5).abs() < 0.02);
    }
}

#[test]
fn mutation_spread_matches_scale() {
    let scale = 7.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let trials = 10_000;
    let mut sums = [0.0f64; 3];
    let mut squares = [0.0f64; 3];
    for _ in 0..trials {
        let mut x = vec![0.0; 3];
        mutate_offsets(&mut x, scale, 1e6, &mut rng).unwrap();
        for j in 0..3 {
            sums[j] += x[j];
            squares[j] += x[j] * x[j];
        }
    }
    for j in 0..3 {
        let mean = sums[j] / trials as f64;
        let std = (squares[j] / trials as f64 - mean * mean).sqrt();
        assert!((std / scale - 1.0).abs() < 0.03, "section {j}: {std}");
    }
    let mut tiny = vec![3.0, -2.0];
    mutate_offsets(&mut tiny, 1e-300, 10.0, &mut rng).unwrap();
    assert_eq!(tiny, vec![3.0, -2.0]);
}

#[test]
fn efficiency_fit_recovers_noisy_eta_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let noise = Normal::new(0.0, 0.005).unwrap();
    let points: Vec<EfficiencyPoint> = linspace(0.001, 0.035, 20)
        .into_iter()
        .map(|p| {
            let eta = conversion_efficiency(1.15, p, 7.1).unwrap() * (1.0 + noise.sample(&mut rng));
            EfficiencyPoint::new(p, eta.clamp(0.0, 1.0)).unwrap()
        })
        .collect();
    let fit = fit_eta_norm(&points, 7.1).unwrap();
    assert!((fit.eta_norm - 1.15).abs() < 0.05, "{}", fit.eta_norm);
    assert!(fit.ci95[0] < fit.eta_norm && fit.eta_norm < fit.ci95[1]);
}

#[test]
fn objective_matches_direct_two_curve_mse() {
    let model = DispersionModel::default();
    let cfg = phase_matched_at_center(&ProcessConfig::new(1550.0, 850.0, 4.4, 25.0, 30.0).unwrap(), &model).unwrap();
    let axis = linspace(1549.0, 1551.0, 257);
    let wp = qpg_core::units::nm_to_omega(850.0);
    let l = cfg.length_m();
    let shift = 150.0;
    let db: Vec<f64> =
        axis.iter().map(|&s| delta_beta(&cfg, &model, qpg_core::units::nm_to_omega(s), wp).unwrap()).collect();
    let normalize = |v: Vec<f64>| {
        let m = v.iter().copied().fold(0.0, f64::max);
        v.into_iter().map(|x| x / m).collect::<Vec<_>>()
    };
    let meas = normalize(db.iter().map(|d| sinc2((d + shift) * l / 2.0)).collect());
    let sim = normalize(db.iter().map(|d| sinc2(d * l / 2.0)).collect());
    let direct = meas.iter().zip(&sim).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / meas.len() as f64;
    let measured = Spectrum::new(AxisKind::Wavelength, axis, meas).unwrap();
    let flat = DeltaBetaProfile::uniform(30.0).unwrap();
    let mse = objective_mse(&flat, &measured, &cfg, &model, &ResolutionKernel::identity()).unwrap();
    assert!((mse - direct).abs() < 1e-12, "{mse} vs {direct}");
    assert!(direct > 1e-3);
}

#[test]
fn gaussian_convolution_width_law() {
    let axis = linspace(-50.0, 50.0, 4001);
    let sa = 1.3;
    let sb = 0.9;
    let g: Vec<f64> = axis.iter().map(|x| (-0.5 * (x / sa).powi(2)).exp()).collect();
    let s = Spectrum::new(AxisKind::Detuning, axis, g).unwrap();
    let out = convolve_resolution(&s, &ResolutionKernel::new(sb).unwrap()).unwrap();
    // Intensity 1/e half-width of exp(−x²/2σ²) is √2·σ.
    let got = bandwidth(&out.peak_normalized().unwrap(), BandwidthMetric::OneOverE).unwrap();
    let want = std::f64::consts::SQRT_2 * (sa * sa + sb * sb).sqrt();
    assert!((got / want - 1.0).abs() < 0.01);
}

#[test]
fn thermal_gradient_adds_secondary_peak() {
    let model = DispersionModel::default();
    let room = ProcessConfig::new(1550.0, 850.0, 4.4, 25.0, 71.0).unwrap();
    let room = phase_matched_at_center(&room, &model).unwrap();
    let hot = phase_matched_at_center(&room.clone().with_temperature_c(200.0), &model).unwrap();
    let retrieved = DeltaBetaProfile::equal_sections(71.0, vec![0.0; 14]).unwrap();
    let step = 6.0 * 2.0 * std::f64::consts::PI / 0.071;
    let gradient: Vec<f64> = (0..14).map(|j| step / (1.0 + (-(j as f64 - 9.0) / 0.6).exp())).collect();
    let extra = DeltaBetaProfile::equal_sections(71.0, gradient).unwrap();
    let scan = Scan::signal_linspace(1548.5, 1551.5, 3001, 850.0);
    let plain = predict_at_conditions(&retrieved, &room, &hot, &model, None, &scan).unwrap();
    let heated = predict_at_conditions(&retrieved, &room, &hot, &model, Some(&extra), &scan).unwrap();
    let maxima = |s: &Spectrum| {
        let v = s.intensity();
        (1..v.len() - 1).filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > 0.1).count()
    };
    assert_eq!(maxima(&plain), 1);
    assert!(maxima(&heated) >= 2);
}
