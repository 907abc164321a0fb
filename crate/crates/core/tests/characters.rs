use diffk_core::characters::*;
use diffk_core::connections::{chern_character, Connection};
use diffk_core::forms::{exterior_d, Axis, ChartGrid, MatrixForm, MixedForm};
use std::f64::consts::PI;
use std::sync::Arc;
use diffk_core::geometry::*;
use diffk_core::{Error, C64};

fn disk_cycle(a: f64, n: usize) -> EnrichedCycle {
    EnrichedCycle::from_filling(disk2_flat(a, n).unwrap()).unwrap()
}

fn angle_of(a: f64) -> AngleValue {
    AngleValue::reduce(C64::new(a, 0.0))
}

#[test]
fn trivial_bundle_pairs_to_zero() {
    let ec = disk_cycle(0.0, 32);
    assert!(angle_pairing(&ec).unwrap().distance(&AngleValue::zero()) < 1e-14);
}

#[test]
fn stabilization_leaves_the_angle_alone() {
    for a in [0.1, 0.7] {
        let ec = disk_cycle(a, 64);
        let plain = angle_pairing(&ec).unwrap();
        let stable = angle_pairing(&ec.stabilized().unwrap()).unwrap();
        assert!(plain.distance(&stable) < 1e-12);
        assert!(stable.distance(&angle_of(a)) < 1e-6);
    }
}

#[test]
fn disjoint_union_adds_mod_one() {
    let (x, y) = (disk_cycle(0.7, 64), disk_cycle(0.6, 64));
    let sum = angle_pairing_disjoint(&[x.clone(), y.clone()]).unwrap();
    let separate = angle_pairing(&x).unwrap() + angle_pairing(&y).unwrap();
    assert!(sum.distance(&separate) < 1e-14);
    assert!(sum.distance(&angle_of(0.3)) < 1e-6);
}

#[test]
fn random_profiles_with_equal_boundary_data_agree() {
    let profiles = [(0.05, 0.65), (0.12, 0.81), (0.2, 0.78), (0.3, 0.85)];
    let fillings: Vec<_> = profiles
        .iter()
        .map(|&(s, e)| {
            let d = disk(DiskProfile { flux: 0.42, ramp: profile::Ramp::new(s, e) }, 64, 8, 1.0).unwrap();
            EnrichedCycle::from_filling(d).unwrap()
        })
        .collect();
    for w in fillings.windows(2) {
        let r = filling_independence(&w[0], &w[1]).unwrap();
        assert_eq!(r.nearest, 0);
        assert!(r.deviation < 1e-6, "{r:?}");
    }
}

#[test]
fn identical_fillings_have_zero_difference() {
    let ec = disk_cycle(0.3, 32);
    let r = filling_independence(&ec, &ec).unwrap();
    assert_eq!((r.nearest, r.deviation), (0, 0.0));
}

#[test]
fn variation_along_a_cylinder_is_its_chern_integral() {
    let (a, b) = (0.15, 0.55);
    let (x, y) = (disk_cycle(a, 64), disk_cycle(b, 64));
    let cyl = cylinder(a, b, 64, 16).unwrap();
    let c = chern_character(cyl.bundle().unwrap()).unwrap();
    let r = variation_check(&BundleCharacter, &x, &y, &cyl, &c).unwrap();
    assert!(r < 1e-6, "{r}");
    let still = cylinder(a, a, 32, 16).unwrap();
    let c0 = chern_character(still.bundle().unwrap()).unwrap();
    assert!(variation_check(&BundleCharacter, &x, &x, &still, &c0).unwrap() < 1e-8);
}

#[test]
fn non_closed_variation_forms_are_rejected() {
    let (x, y) = (disk_cycle(0.1, 32), disk_cycle(0.2, 32));
    let cyl = cylinder(0.1, 0.2, 32, 64).unwrap();
    let mut c = MixedForm::zeros(cyl.grid.clone(), 1);
    c.set_part(MatrixForm::scalar_fn(cyl.grid.clone(), 1, |x, m| C64::new(if m == 1 { x[1].sin() } else { 0.0 }, 0.0)))
        .unwrap();
    assert!(matches!(variation_check(&BundleCharacter, &x, &y, &cyl, &c), Err(Error::NotClosed(_))));
}

#[test]
fn gauge_shift_of_the_filling_keeps_the_angle() {
    let d = disk2_flat(0.25, 64).unwrap();
    let a = d.bundle().unwrap().potential().unwrap().clone();
    // Curvature is re-derived from the potential on both sides.
    let plain = Connection::from_potential(a).unwrap();
    let f = MatrixForm::scalar_fn(d.grid.clone(), 0, |x, _| {
        let bump = (std::f64::consts::PI * x[0]).sin().powi(2) * x[0] * (1.0 - x[0]);
        C64::new(0.0, 0.3 * bump * (1.0 + 0.5 * x[1].cos()))
    });
    let shifted = Connection::from_potential(plain.gauge_shift(&f).unwrap().potential().unwrap().clone()).unwrap();
    let mut d0 = d.clone();
    d0.set_connection("bundle", plain).unwrap();
    let mut d1 = d.clone();
    d1.set_connection("bundle", shifted).unwrap();
    let v0 = angle_pairing(&EnrichedCycle { sigma: d.boundary.as_ref().unwrap().components[0].geometry.clone(), filling: d0 }).unwrap();
    let v1 = angle_pairing(&EnrichedCycle { sigma: d.boundary.as_ref().unwrap().components[0].geometry.clone(), filling: d1 }).unwrap();
    assert!(v0.distance(&v1) < 1e-8, "{v0:?} {v1:?}");
}

#[test]
fn monopole_chern_forms_are_integral() {
    let probe = |k: i64, scale: f64, drop_rank: bool| {
        let g = sphere2_monopole(k, 64).unwrap();
        let mut ch = chern_character(g.bundle().unwrap()).unwrap().scale(C64::new(scale, 0.0));
        if drop_rank {
            ch.set_part(MatrixForm::zeros(g.grid.clone(), 0, 1)).unwrap();
        }
        Probe { geometry: g, form: ch }
    };
    let full = integrality_membership(&[probe(1, 1.0, false), probe(-2, 1.0, false)], 1e-6).unwrap();
    assert!(full.member, "{full:?}");
    assert!((full.values[0].re - 2.0).abs() < 1e-6 && (full.values[1].re + 1.0).abs() < 1e-6);
    let half = integrality_membership(&[probe(1, 0.5, true)], 1e-6).unwrap();
    assert!(!half.member && (half.values[0].re - 0.5).abs() < 1e-6);
    assert!(!integrality_membership(&[probe(2, 0.5, false)], 1e-6).unwrap().member);
}

#[test]
fn exact_forms_have_zero_pairings() {
    let g = torus(2, 32).unwrap();
    let eta = MatrixForm::scalar_fn(g.grid.clone(), 1, |x, m| {
        let t = 2.0 * std::f64::consts::PI;
        C64::new(if m == 1 { (t * x[1]).sin() } else { (t * x[0]).cos() }, 0.0)
    });
    let mut c = MixedForm::zeros(g.grid.clone(), 1);
    c.set_part(exterior_d(&eta).unwrap()).unwrap();
    let r = integrality_membership(&[Probe { geometry: g, form: c }], 1e-10).unwrap();
    assert!(r.member && r.values[0].norm() < 1e-12);
}

#[test]
fn zn_value_is_constant_along_a_deformation() {
    let base = zn_pairing(&zn_pair(3, 1, 64).unwrap()).unwrap();
    assert!(base.order_residual(3) < 1e-6);
    for step in 1..=10 {
        let z = zn_pair_deformed(3, 1, 64, step as f64 / 10.0).unwrap();
        let v = zn_pairing(&z).unwrap();
        assert!(v.distance(&base) < 1e-6, "step {step}: {v:?} vs {base:?}");
    }
}

#[test]
fn zn_orders_over_the_catalog() {
    for (n, k) in [(2, 1), (3, 2), (4, 1), (5, 3)] {
        let v = zn_pairing(&zn_pair(n, k, 48).unwrap()).unwrap();
        assert!(v.order_residual(n) < 1e-6, "n={n} k={k}: {v:?}");
    }
    assert!(zn_pairing(&zn_pair(3, 0, 32).unwrap()).unwrap().distance(&AngleValue::zero()) < 1e-12);
}

#[test]
fn zn_value_survives_a_todd_trivial_factor() {
    let z = zn_pair(3, 1, 48).unwrap();
    // Todd-trivial CP¹ factor: everything is φ-independent, so few φ nodes suffice.
    let grid = Arc::new(ChartGrid::new(vec![Axis::interval(40, 0.0, PI), Axis::periodic(4, 0.0, 2.0 * PI)]).unwrap());
    let mut u = GeometrySpec::new("cp1", grid.clone());
    u.connections.push(("tangent".into(), sphere_line(&grid, 2.0).unwrap()));
    u.connections.push(("bundle".into(), Connection::trivial(grid, 1)));
    let zu = zn_product(&z, &u).unwrap();
    let (v, q) = (zn_pairing(&z).unwrap(), zn_pairing(&zu).unwrap());
    assert!(v.distance(&q) < 1e-6, "{v:?} vs {q:?}");
}

#[test]
fn pushforward_matches_the_total_space() {
    for k in [0, 1, -2] {
        let fiber = sphere2_monopole(k, 24).unwrap();
        let total = product(&circle(8, 0.0).unwrap(), &fiber).unwrap();
        let b = PushforwardCharacter::new(BundleCharacter, &total).unwrap();
        let a = 0.3;
        let ec = EnrichedCycle::from_filling(disk(DiskProfile::standard(a), 48, 8, 1.0).unwrap()).unwrap();
        let via_fiber = b.evaluate(&ec).unwrap();
        let direct = b.direct(&ec).unwrap();
        assert!(via_fiber.distance(&direct) < 1e-10, "k={k}: {via_fiber:?} {direct:?}");
        assert!(direct.distance(&angle_of(a * (k as f64 + 1.0))) < 1e-4, "k={k}: {direct:?}");
    }
}

#[test]
fn pushforward_of_a_trivial_bundle_vanishes() {
    let mut fiber = sphere2_monopole(1, 16).unwrap();
    fiber.set_connection("bundle", Connection::trivial(fiber.grid.clone(), 1)).unwrap();
    let total = product(&circle(8, 0.0).unwrap(), &fiber).unwrap();
    let b = PushforwardCharacter::new(BundleCharacter, &total).unwrap();
    let ec = disk_cycle(0.0, 16);
    assert!(b.evaluate(&ec).unwrap().distance(&AngleValue::zero()) < 1e-10);
}

#[test]
fn pushforward_variation_form_drives_its_variation() {
    let fiber = sphere2_monopole(1, 24).unwrap();
    let total = product(&circle(8, 0.0).unwrap(), &fiber).unwrap();
    let b = PushforwardCharacter::new(BundleCharacter, &total).unwrap();
    let (x, y) = (
        EnrichedCycle::from_filling(disk(DiskProfile::standard(0.1), 48, 8, 1.0).unwrap()).unwrap(),
        EnrichedCycle::from_filling(disk(DiskProfile::standard(0.35), 48, 8, 1.0).unwrap()).unwrap(),
    );
    let cyl = cylinder(0.1, 0.35, 48, 8).unwrap();
    let c = b.variation_form(&cyl).unwrap();
    let r = variation_check(&b, &x, &y, &cyl, &c).unwrap();
    assert!(r < 1e-6, "{r}");
}

#[test]
fn odd_fibres_are_rejected() {
    let total = product(&torus(2, 8).unwrap(), &circle(8, 0.0).unwrap()).unwrap();
    assert!(matches!(PushforwardCharacter::new(BundleCharacter, &total), Err(Error::OddFiber(1))));
    assert!(matches!(
        PushforwardCharacter::new(BundleCharacter, &torus(2, 8).unwrap()),
        Err(Error::NoFibration(_))
    ));
}
