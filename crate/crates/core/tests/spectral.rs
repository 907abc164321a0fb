use diffk_core::characters::EnrichedCycle;
use diffk_core::geometry::disk2_flat;
use diffk_core::spectral::*;
use diffk_core::Error;
use proptest::prelude::*;

#[test]
fn eta_matches_the_hurwitz_oracle() {
    for a in [0.1, 0.25, 0.5, 0.9] {
        let r = eta_invariant(&CircleDiracSpec::new(a).unwrap()).unwrap();
        assert!((r.zeta - (1.0 - 2.0 * a)).abs() < 1e-12, "a={a}: {r:?}");
        assert!((r.abel - (1.0 - 2.0 * a)).abs() < 1e-4, "a={a}: {r:?}");
        assert_eq!(r.h, 0);
    }
    let zero = eta_invariant(&CircleDiracSpec::new(0.0).unwrap()).unwrap();
    assert!(zero.zeta.abs() < 1e-14 && zero.abel.abs() < 1e-10 && zero.h == 1);
}

#[test]
fn eta_is_affine_in_the_twist() {
    let etas: Vec<f64> = (1..20).map(|k| eta_invariant(&CircleDiracSpec::new(k as f64 / 20.0).unwrap()).unwrap().abel).collect();
    for w in etas.windows(3) {
        assert!((w[2] - 2.0 * w[1] + w[0]).abs() < 1e-4);
    }
}

#[test]
fn coarse_regulators_are_flagged() {
    let mut s = CircleDiracSpec::new(0.3).unwrap();
    // Two far-apart regulator values extrapolate badly.
    s.s_grid = vec![1.0, 3.0];
    assert!(matches!(eta_invariant(&s), Err(Error::EtaDivergence { .. })));
}

#[test]
fn aps_relation_holds_after_one_calibration() {
    let cal = ApsCalibration::run(64).unwrap();
    assert!(cal.residual < 1e-6, "{cal:?}");
    assert_eq!(cal.sigma, -1.0);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let a = (k as f64 + 0.5) / 20.0;
        let ec = EnrichedCycle::from_filling(disk2_flat(a, 64).unwrap()).unwrap();
        let r = aps_mod1_check(&CircleDiracSpec::new(a).unwrap(), &ec, &cal).unwrap();
        worst = worst.max(r.residual);
    }
    assert!(worst < 1e-4, "{worst}");
    let ec = EnrichedCycle::from_filling(disk2_flat(0.0, 32).unwrap()).unwrap();
    let zero = aps_mod1_check(&CircleDiracSpec::new(0.0).unwrap(), &ec, &cal).unwrap();
    assert!(zero.residual < 1e-10 && zero.h == 0, "{zero:?}");
}

#[test]
fn mismatched_twists_are_rejected() {
    let cal = ApsCalibration { sigma: -1.0, residual: 0.0 };
    let ec = EnrichedCycle::from_filling(disk2_flat(0.3, 32).unwrap()).unwrap();
    let r = aps_mod1_check(&CircleDiracSpec::new(0.4).unwrap(), &ec, &cal);
    assert!(matches!(r, Err(Error::BoundaryMismatch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eta_is_odd_under_reflection(a in 0.001f64..0.999) {
        let (x, y) = (
            eta_invariant(&CircleDiracSpec::new(a).unwrap()).unwrap(),
            eta_invariant(&CircleDiracSpec::new(1.0 - a).unwrap()).unwrap(),
        );
        prop_assert!((x.zeta + y.zeta).abs() < 1e-6);
        prop_assert!((x.abel + y.abel).abs() < 1e-6);
    }

    #[test]
    fn hurwitz_recurrence(s in -3.0f64..4.0, a in 0.05f64..3.0) {
        prop_assume!((s - 1.0).abs() > 1e-3);
        // ζ(s, a) − ζ(s, a + 1) = a^{−s}.
        let d = hurwitz_zeta(s, a).unwrap() - hurwitz_zeta(s, a + 1.0).unwrap();
        prop_assert!((d - a.powf(-s)).abs() < 1e-10 * (1.0 + a.powf(-s)));
    }
}
