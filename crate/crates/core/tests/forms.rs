use diffk_core::forms::*;
use diffk_core::C64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn sphere_grid(n: usize) -> Arc<ChartGrid> {
    Arc::new(ChartGrid::new(vec![Axis::interval(n, 0.0, PI), Axis::periodic(n, 0.0, 2.0 * PI)]).unwrap())
}

#[test]
fn round_sphere_area() {
    let g = sphere_grid(64);
    let area = integrate(&MatrixForm::scalar_fn(g, 2, |x, _| C64::new(x[0].sin(), 0.0))).unwrap();
    assert!((area.re - 4.0 * PI).abs() < 1e-6, "{area}");
}

#[test]
fn stokes_on_the_sphere_chart() {
    // Smooth on S²: the dφ coefficient vanishes at both poles.
    for n in [16, 33, 64] {
        let g = sphere_grid(n);
        let omega = MatrixForm::scalar_fn(g, 1, |x, m| {
            let (t, p) = (x[0], x[1]);
            let v = if m == 0b10 { t.sin() * (1.0 + t.cos() * (2.0 * p).sin()) } else { (3.0 * t).cos() * p.cos() + t * t };
            C64::new(v, 0.5 * v)
        });
        let total = integrate(&exterior_d(&omega).unwrap()).unwrap();
        assert!(total.norm() < 1e-8, "n={n}: {total}");
    }
}

#[test]
fn fibre_integration_splits_products() {
    let base = Arc::new(ChartGrid::new(vec![Axis::periodic(6, 0.0, 1.0), Axis::interval(9, 0.0, 2.0)]).unwrap());
    let fiber = sphere_grid(12);
    let total = Arc::new(base.product(&fiber).unwrap());
    let a = MatrixForm::scalar_fn(base.clone(), 2, |x, _| C64::new(1.0 + x[1] * (2.0 * PI * x[0]).cos(), 0.0));
    let b = MatrixForm::scalar_fn(fiber.clone(), 2, |x, _| C64::new(x[0].sin() * (1.0 + x[1].cos()), x[0].sin()));
    let lifted = wedge(&pullback_first(&a, &total, &fiber).unwrap(), &pullback_second(&b, &total, &base).unwrap()).unwrap();
    let pushed = fiber_integrate(&lifted, &base, &fiber).unwrap();
    let expected = integrate(&a).unwrap() * integrate(&b).unwrap();
    assert!((integrate(&pushed).unwrap() - expected).norm() < 1e-12);
    assert!((integrate(&lifted).unwrap() - expected).norm() < 1e-10);
}

/// Random smooth coefficient `Σ c_j cos(2π f_j · s + φ_j)` on the unit cube.
fn coefficient(params: &[f64], x: &[f64], extents: &[(f64, f64)], m: u32, e: usize) -> f64 {
    let mut v = 0.0;
    for (j, chunk) in params.chunks_exact(3).enumerate() {
        let arg: f64 = x
            .iter()
            .zip(extents)
            .enumerate()
            .map(|(k, (xi, (lo, hi)))| ((j + k + m as usize + e) % 3) as f64 * (xi - lo) / (hi - lo))
            .sum();
        v += chunk[0] * (2.0 * PI * arg * chunk[1] + chunk[2]).cos();
    }
    v
}

fn grid_strategy() -> impl Strategy<Value = Arc<ChartGrid>> {
    prop::collection::vec((3usize..9, any::<bool>()), 1..4).prop_map(|axes| {
        let axes = axes.into_iter().map(|(n, periodic)| if periodic { Axis::periodic(n, 0.0, 1.0) } else { Axis::interval(n, -1.0, 1.0) });
        Arc::new(ChartGrid::new(axes.collect()).unwrap())
    })
}

fn random_form(grid: &Arc<ChartGrid>, degree: usize, rank: usize, params: &[f64]) -> MatrixForm {
    let extents: Vec<_> = grid.axes().iter().map(|a| (a.lo, a.lo + a.length())).collect();
    MatrixForm::from_fn(grid.clone(), degree, rank, |x, m, out| {
        for (e, o) in out.iter_mut().enumerate() {
            *o = C64::new(coefficient(params, x, &extents, m, e), coefficient(&params[3..], x, &extents, m, e));
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(grid in grid_strategy(), degree in 0usize..3, rank in 1usize..3,
                          params in prop::collection::vec(-1.0f64..1.0, 9)) {
        prop_assume!(degree <= grid.dim());
        let w = random_form(&grid, degree, rank, &params);
        let dd = exterior_d(&exterior_d(&w).unwrap()).unwrap();
        prop_assert!(dd.max_norm() < 1e-10 * w.max_norm().max(1.0) / grid.max_spacing().powi(2));
    }

    #[test]
    fn scalar_wedge_is_graded_commutative(grid in grid_strategy(), p in 0usize..3, q in 0usize..3,
                                          params in prop::collection::vec(-1.0f64..1.0, 9)) {
        prop_assume!(p + q <= grid.dim());
        let a = random_form(&grid, p, 1, &params);
        let b = random_form(&grid, q, 1, &params[1..]);
        let sign = if p * q % 2 == 0 { 1.0 } else { -1.0 };
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap().scale(C64::new(sign, 0.0));
        prop_assert!(ab.distance(&ba).unwrap() < 1e-13);
    }

    #[test]
    fn discrete_stokes_on_interval_boxes(n in 3usize..20, params in prop::collection::vec(-1.0f64..1.0, 9)) {
        // ∫ d(f dy) over [−1,1] × S¹ is the difference of the end circles.
        let grid = Arc::new(ChartGrid::new(vec![Axis::interval(n, -1.0, 1.0), Axis::periodic(7, 0.0, 1.0)]).unwrap());
        let w = random_form(&grid, 1, 1, &params);
        let inside = integrate(&exterior_d(&w).unwrap()).unwrap();
        let ring = |i: usize| -> C64 {
            (0..7).map(|j| w.scalar(grid.node_of(&[i, j]), 0b10) * grid.axis_weights(1)[j]).sum()
        };
        prop_assert!((inside - (ring(n - 1) - ring(0))).norm() < 1e-12);
    }
}
