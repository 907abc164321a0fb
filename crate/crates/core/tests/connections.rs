use diffk_core::connections::*;
use diffk_core::forms::{Axis, ChartGrid, MatrixForm};
use diffk_core::geometry::{cp1_tangent, sphere2_monopole, torus};
use diffk_core::{CURVATURE_NORMALIZATION, C64};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

fn pair(grid: &Arc<ChartGrid>, seed: u64, active_axes: Option<usize>) -> (Connection, Connection) {
    let spec = |seed| RandomConnectionSpec { rank: 2, modes: 2, amplitude: 0.1, seed, active_axes };
    (random_connection(grid, spec(2 * seed)).unwrap(), random_connection(grid, spec(2 * seed + 1)).unwrap())
}

/// `|(i/2π)^l (d TP_l − ΔP_l)|_max`.
fn normalized_residual(curve: &ConnectionCurve, l: usize) -> f64 {
    let norm = CURVATURE_NORMALIZATION.powu(l as u32).norm();
    norm * transgression_residual(curve, &InvariantPolynomial::trace_power(l)).unwrap()
}

#[test]
fn monopole_chern_numbers_are_their_charges() {
    let start = Instant::now();
    for k in [-2, -1, 1, 3] {
        let g = sphere2_monopole(k, 64).unwrap();
        let c1 = g.integrate(&chern_character(g.bundle().unwrap()).unwrap().part(2).clone()).unwrap();
        assert!((c1.re - k as f64).abs() < 1e-6 && c1.im.abs() < 1e-12, "k={k}: {c1}");
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn todd_genus_of_the_projective_line_is_one() {
    let g = cp1_tangent(64).unwrap();
    let td = todd_form(g.tangent().unwrap()).unwrap();
    let v = g.integrate(td.top()).unwrap();
    assert!((v.re - 1.0).abs() < 1e-6, "{v}");
    // td = 1 + c₁/2: the degree-2 part is half the Chern form.
    let ch = chern_character(g.tangent().unwrap()).unwrap();
    assert!(td.part(2).distance(&ch.part(2).scale(C64::new(0.5, 0.0))).unwrap() < 1e-14);
}

#[test]
fn transgression_closes_within_ten_h_squared() {
    for n in [16, 32, 64] {
        let g = torus(2, n).unwrap();
        for seed in 0..3 {
            let (c0, c1) = pair(&g.grid, seed, None);
            let curve = ConnectionCurve::linear(&c0, &c1).unwrap();
            let h = g.grid.max_spacing();
            for l in [1, 2] {
                assert!(normalized_residual(&curve, l) < 10.0 * h * h);
            }
        }
    }
    let g = torus(4, 16).unwrap();
    let (c0, c1) = pair(&g.grid, 7, None);
    let curve = ConnectionCurve::linear(&c0, &c1).unwrap();
    let h = g.grid.max_spacing();
    for l in [1, 2] {
        let r = normalized_residual(&curve, l);
        assert!(r < 10.0 * h * h, "l={l}: {r:e}");
    }
}

#[test]
fn transgression_residual_converges_at_second_order() {
    // Coefficients vary along the first two axes only, so the other two are
    // resolved exactly by four nodes.
    let mut points = Vec::new();
    for n in [16, 32, 64] {
        let axes = vec![Axis::periodic(n, 0.0, 1.0), Axis::periodic(n, 0.0, 1.0), Axis::periodic(4, 0.0, 1.0), Axis::periodic(4, 0.0, 1.0)];
        let grid = Arc::new(ChartGrid::new(axes).unwrap());
        let (c0, c1) = pair(&grid, 3, Some(2));
        let r = normalized_residual(&ConnectionCurve::linear(&c0, &c1).unwrap(), 2);
        assert!(r < 10.0 / (n * n) as f64, "n={n}: {r:e}");
        points.push(((1.0 / n as f64).ln(), r.ln()));
    }
    let order = least_squares_slope(&points);
    assert!(order >= 1.9, "{order}");
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = (points.iter().map(|p| p.0).sum::<f64>() / n, points.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn product_transgression_identity_holds_on_periods() {
    let g = torus(4, 8).unwrap();
    let (c0, c1) = pair(&g.grid, 11, None);
    let curve = ConnectionCurve::linear(&c0, &c1).unwrap();
    assert!(transgression_product_check(&curve, 1, 1, &g.cycles).unwrap() < 1e-6);
    let bent = ConnectionCurve::bent(&c0, &c1, c1.potential().unwrap().scale(C64::new(0.5, 0.0))).unwrap();
    assert!(transgression_product_check(&bent, 1, 1, &g.cycles).unwrap() < 1e-6);
}

#[test]
fn cs_equivalence_sees_gauge_shifts_and_flat_twists() {
    let g = torus(2, 32).unwrap();
    let (c0, _) = pair(&g.grid, 5, None);
    let f = MatrixForm::scalar_fn(g.grid.clone(), 0, |x, _| C64::new(0.0, 0.4 * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()));
    let shifted = Connection::from_potential(c0.gauge_shift(&f).unwrap().potential().unwrap().clone()).unwrap();
    let tol = CsTolerance::for_grid(g.grid.max_spacing());
    assert!(cs_equivalent(&c0, &shifted, &g.cycles, tol).unwrap().equivalent);
    // A constant twist by 0.3 of a flat line has a non-integral period.
    let flat = constant_abelian(g.grid.clone(), 0, C64::new(0.0, -2.0 * PI * 0.3)).unwrap();
    let trivial = Connection::trivial(g.grid.clone(), 1);
    let report = cs_equivalent(&trivial, &flat, &g.cycles, tol).unwrap();
    assert!(!report.equivalent);
    assert!((report.levels[0].max_period - 0.3).abs() < 1e-12, "{report:?}");
}

#[test]
fn bianchi_residual_is_a_second_order_discretisation_error() {
    let residual = |n| {
        let g = torus(3, n).unwrap();
        bianchi_residual(&pair(&g.grid, 9, None).0).unwrap()
    };
    let (coarse, fine) = (residual(12), residual(24));
    assert!(coarse < 10.0 / 144.0 && fine < coarse / 3.5, "{coarse:e} {fine:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reversing_the_curve_negates_the_transgression(seed in 0u64..1000, l in 1usize..3) {
        let g = torus(4, 4).unwrap();
        let (c0, c1) = pair(&g.grid, seed, None);
        let forward = transgression(&ConnectionCurve::linear(&c0, &c1).unwrap(), l).unwrap();
        let back = transgression(&ConnectionCurve::linear(&c1, &c0).unwrap(), l).unwrap();
        prop_assert!(forward.add(&back).unwrap().max_norm() < 1e-13);
    }

    #[test]
    fn constant_curves_transgress_to_zero(seed in 0u64..1000) {
        let g = torus(2, 8).unwrap();
        let (c, _) = pair(&g.grid, seed, None);
        let tp = transgression(&ConnectionCurve::linear(&c, &c).unwrap(), 1).unwrap();
        prop_assert_eq!(tp.max_norm(), 0.0);
    }

    #[test]
    fn first_transgression_is_exactly_closed(seed in 0u64..1000, n in 4usize..12) {
        // TP₁ = tr(A¹ − A⁰) and P₁ = tr dA: linear in d on the grid.
        let g = torus(2, n).unwrap();
        let (c0, c1) = pair(&g.grid, seed, None);
        prop_assert!(normalized_residual(&ConnectionCurve::linear(&c0, &c1).unwrap(), 1) < 1e-14);
    }
}
