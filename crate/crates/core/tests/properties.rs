//! Randomised invariants of shapes, propagation, frames, landscapes and analysis.

use std::f64::consts::PI;

use proptest::prelude::*;
use superbroad_core::analysis::operational_linewidth;
use superbroad_core::dynamics::{default_substeps, propagate, QubitState};
use superbroad_core::frames::diagnose;
use superbroad_core::landscape::{slice_at_area, Axis, LandscapeSpec};
use superbroad_core::noise::add_shot_noise;
use superbroad_core::quadrature::integrate;
use superbroad_core::shapes::{Family, PulseShape};
use superbroad_core::units::{mhz_to_rad_per_ns, POWER_LAW_DURATION_NS, QUADRATIC_DURATION_NS};

fn analytic_family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Rectangular),
        (-1.0f64..=1.0).prop_map(|beta| Family::Quadratic { beta }),
        (0u32..=3).prop_map(|p| Family::PowerLaw { p }),
        (10.0f64..22.0).prop_map(|sigma| Family::Gaussian { sigma }),
        (4.0f64..9.0).prop_map(|tau| Family::Sech { tau }),
    ]
}

fn duration_for(family: &Family) -> f64 {
    match family {
        Family::PowerLaw { .. } => POWER_LAW_DURATION_NS,
        _ => QUADRATIC_DURATION_NS,
    }
}

fn shape(family: Family, omega0_mhz: f64) -> PulseShape {
    let t = duration_for(&family);
    PulseShape::new(family, mhz_to_rad_per_ns(omega0_mhz), t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn envelopes_are_nonnegative_and_mirror_symmetric(
        family in analytic_family(),
        w in 0.0f64..30.0,
        x in 0.0f64..=1.0,
    ) {
        let s = shape(family, w);
        let t = x * s.duration();
        let a = s.envelope(t);
        let b = s.envelope(s.duration() - t);
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn area_is_linear_in_amplitude(family in analytic_family(), w in 0.1f64..30.0) {
        let one = shape(family.clone(), w);
        let two = shape(family, 2.0 * w);
        prop_assert!((two.area() - 2.0 * one.area()).abs() <= 1e-12 * two.area());
    }

    #[test]
    fn closed_form_area_matches_quadrature(family in analytic_family(), w in 0.1f64..30.0) {
        let s = shape(family, w);
        let q = integrate(|t| s.envelope(t), 0.0, s.duration(), 1e-12);
        prop_assert!((q.value - s.area()).abs() <= 1e-9 * s.area(), "{} vs {}", q.value, s.area());
    }

    #[test]
    fn propagation_conserves_norm(
        family in analytic_family(),
        w in 0.0f64..40.0,
        d in -60.0f64..60.0,
    ) {
        let s = shape(family, w);
        let out = propagate(&s, mhz_to_rad_per_ns(d), QubitState::ground(), default_substeps(s.duration())).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn resonant_population_follows_area(family in analytic_family(), k in 0.0f64..4.0) {
        let t = duration_for(&family);
        let s = PulseShape::with_area(family, t, k * PI).unwrap();
        let p2 = propagate(&s, 0.0, QubitState::ground(), default_substeps(t)).unwrap().p2();
        let expected = (0.5 * k * PI).sin().powi(2);
        prop_assert!((p2 - expected).abs() < 1e-6, "p2 {p2} vs {expected}");
    }

    #[test]
    fn detuning_sign_does_not_matter(
        family in analytic_family(),
        w in 0.0f64..40.0,
        d in 0.0f64..60.0,
    ) {
        let s = shape(family, w);
        let n = default_substeps(s.duration());
        let plus = propagate(&s, mhz_to_rad_per_ns(d), QubitState::ground(), n).unwrap().p2();
        let minus = propagate(&s, mhz_to_rad_per_ns(-d), QubitState::ground(), n).unwrap().p2();
        prop_assert!((plus - minus).abs() < 1e-9);
    }

    #[test]
    fn superadiabatic_splitting_dominates(
        family in analytic_family(),
        w in 0.5f64..30.0,
        d in -60.0f64..60.0,
    ) {
        let s = shape(family, w);
        let diag = diagnose(&s, mhz_to_rad_per_ns(d), 64).unwrap();
        for k in 0..diag.len() {
            prop_assert!(diag.eps1[k] >= 0.0);
            prop_assert!(diag.eps2[k] >= diag.eps1[k] * (1.0 - 1e-15));
        }
    }

    #[test]
    fn linewidth_shrinks_as_threshold_rises(beta in -1.0f64..=1.0, lo in 0.05f64..0.9, gap in 0.0f64..0.5) {
        let t = QUADRATIC_DURATION_NS;
        let template = PulseShape::new(Family::Quadratic { beta }, 0.0, t).unwrap();
        let detunings: Vec<f64> = (0..=240).map(|j| -60.0 + 0.5 * j as f64).collect();
        let slice = slice_at_area(&template, 3.0 * PI, &detunings).unwrap();
        let hi = (lo + gap).min(0.99);
        let wide = operational_linewidth(&slice, lo).unwrap().width_mhz;
        let narrow = operational_linewidth(&slice, hi).unwrap().width_mhz;
        prop_assert!(narrow <= wide);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shot_noise_is_a_function_of_seed(seed in any::<u64>(), shots in 1u32..400) {
        let spec = LandscapeSpec::new(
            PulseShape::new(Family::Quadratic { beta: 0.5 }, 0.0, QUADRATIC_DURATION_NS).unwrap(),
            Axis::new(-20.0, 20.0, 9).unwrap(),
            Axis::new(0.0, 10.0, 5).unwrap(),
        )
        .unwrap();
        let grid = spec.sweep().unwrap();
        let a = add_shot_noise(&grid, shots, seed).unwrap();
        let b = add_shot_noise(&grid, shots, seed).unwrap();
        prop_assert_eq!(&a, &b);
        for v in &a.p2 {
            prop_assert!((0.0..=1.0).contains(v));
            let k = v * shots as f64;
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
    }
}

#[test]
fn limit_families_reduce_to_rectangle() {
    for (family, t) in [
        (Family::Quadratic { beta: 0.0 }, QUADRATIC_DURATION_NS),
        (Family::PowerLaw { p: 0 }, POWER_LAW_DURATION_NS),
    ] {
        let s = PulseShape::new(family, 0.2, t).unwrap();
        let r = PulseShape::rectangular(0.2, t).unwrap();
        for k in 0..1000 {
            let x = t * k as f64 / 999.0;
            assert_eq!(s.envelope(x), r.envelope(x), "t = {x}");
        }
    }
}
