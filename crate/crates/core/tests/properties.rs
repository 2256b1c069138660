use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qpg_core::dispersion::DeltaBetaProfile;
use qpg_core::efficiency::conversion_efficiency;
use qpg_core::modes::{schmidt_decompose, JsaGrid};
use qpg_core::numeric::linspace;
use qpg_core::phasematch::*;

fn profile() -> impl Strategy<Value = DeltaBetaProfile> {
    (1usize..12, 5.0f64..80.0).prop_flat_map(|(n, len)| {
        prop::collection::vec(-2000.0f64..2000.0, n)
            .prop_map(move |offsets| DeltaBetaProfile::equal_sections(len, offsets).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reversal_preserves_spectrum(p in profile(), db in -3000.0f64..3000.0) {
        let a = pm_profile(&p, db).norm_sqr();
        let b = pm_profile(&p.reversed(), db).norm_sqr();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn amplitude_is_bounded(p in profile(), db in -1e5f64..1e5) {
        prop_assert!(pm_profile(&p, db).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn zero_offsets_match_uniform(n in 1usize..20, len in 1.0f64..100.0, db in -5000.0f64..5000.0) {
        let p = DeltaBetaProfile::equal_sections(len, vec![0.0; n]).unwrap();
        prop_assert!((pm_profile(&p, db) - pm_uniform(db, len * 1e-3)).norm() < 1e-12);
    }

    #[test]
    fn splitting_a_section_changes_nothing(p in profile(), j in 0usize..12, frac in 0.05f64..0.95, db in -3000.0f64..3000.0) {
        let j = j % p.sections();
        let (a, b) = (p.boundaries_mm()[j], p.boundaries_mm()[j + 1]);
        let q = p.split_section(j, a + frac * (b - a)).unwrap();
        prop_assert_eq!(q.sections(), p.sections() + 1);
        prop_assert!((pm_profile(&p, db) - pm_profile(&q, db)).norm() < 1e-12);
    }

    #[test]
    fn efficiency_depends_on_product(eta in 0.1f64..5.0, p in 1e-4f64..0.5, l in 0.5f64..10.0, k in 0.2f64..5.0) {
        let a = conversion_efficiency(eta * k, p, l).unwrap();
        let b = conversion_efficiency(eta, p * k, l).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn efficiency_rises_below_unit_power(eta in 0.1f64..5.0, l in 0.5f64..10.0, f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
        let unit = qpg_core::efficiency::unit_efficiency_power(eta, l).unwrap();
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let a = conversion_efficiency(eta, lo * unit, l).unwrap();
        let b = conversion_efficiency(eta, hi * unit, l).unwrap();
        prop_assert!(a <= b + 1e-15);
    }

    #[test]
    fn convolution_conserves_energy(values in prop::collection::vec(0.0f64..1.0, 8..200), sigma in 0.01f64..30.0) {
        let axis = linspace(0.0, values.len() as f64 - 1.0, values.len());
        let s = Spectrum::new(AxisKind::Detuning, axis, values.clone()).unwrap();
        let out = convolve_resolution(&s, &ResolutionKernel::new(sigma).unwrap()).unwrap();
        let before: f64 = values.iter().sum();
        let after: f64 = out.intensity().iter().sum();
        prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
        prop_assert!(out.intensity().iter().all(|&v| v >= -1e-15));
    }

    #[test]
    fn schmidt_sums_to_one_and_reconstructs(
        (rows, cols, re, im) in (2usize..10, 2usize..10).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(-1.0f64..1.0, r * c), prop::collection::vec(-1.0f64..1.0, r * c))
        })
    ) {
        let amp = DMatrix::from_fn(rows, cols, |i, j| Complex64::new(re[i * cols + j], im[i * cols + j]));
        prop_assume!(amp.iter().any(|z| z.norm() > 1e-3));
        let sig = linspace(0.0, 1.0, rows).iter().map(|x| x * x + x).collect();
        let out = linspace(-1.0, 2.0, cols);
        let jsa = JsaGrid::new(sig, out, amp.clone()).unwrap();
        let d = schmidt_decompose(&jsa).unwrap();
        let total: f64 = d.coefficients().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(d.coefficients().windows(2).all(|w| w[0] >= w[1]));
        let back = d.reconstruct(None);
        prop_assert!((back - amp.clone()).norm() < 1e-9 * amp.norm());
        let rank = d.coefficients().iter().filter(|&&r| r > 1e-12).count();
        let (gs, go) = d.gram(rank);
        let eye = DMatrix::<Complex64>::identity(rank, rank);
        prop_assert!((gs - &eye).norm() < 1e-9);
        prop_assert!((go - &eye).norm() < 1e-9);
    }
}
