use diffk_core::adiabatic::*;
use proptest::prelude::*;

const LAMBDAS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Levi-Civita components `⟨∇_{e_a} e_b, e_c⟩` of the Hopf chart metric
/// `dα² + dβ² + dγ² + 2 cos 2β dα dγ`, from its Christoffel symbols and the
/// β-derivative of the frame. Independent of any bracket table.
fn hopf_levi_civita(beta: f64) -> [[[f64; 3]; 3]; 3] {
    let (s, c) = ((2.0 * beta).sin(), (2.0 * beta).cos());
    let g = [[1.0, 0.0, c], [0.0, 1.0, 0.0], [c, 0.0, 1.0]];
    // Only ∂_β g_αγ = −2 sin 2β is nonzero.
    let mut dg = [[[0.0; 3]; 3]; 3];
    dg[1][0][2] = -2.0 * s;
    dg[1][2][0] = -2.0 * s;
    let det = 1.0 - c * c;
    let ginv = [[1.0 / det, 0.0, -c / det], [0.0, 1.0, 0.0], [-c / det, 0.0, 1.0 / det]];
    let mut christoffel = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                christoffel[k][i][j] =
                    (0..3).map(|l| 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])).sum::<f64>();
            }
        }
    }
    let frame = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0 / s, 0.0, -c / s]];
    // ∂_β of the frame fields; only I depends on β.
    let mut dframe = [[0.0; 3]; 3];
    dframe[2] = [-2.0 * c / (s * s), 0.0, 2.0 / (s * s)];
    let mut out = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut v = [0.0; 3];
            for k in 0..3 {
                v[k] = frame[a][1] * dframe[b][k];
                for i in 0..3 {
                    for j in 0..3 {
                        v[k] += christoffel[k][i][j] * frame[a][i] * frame[b][j];
                    }
                }
            }
            for cc in 0..3 {
                out[a][b][cc] = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| v[i] * g[i][j] * frame[cc][j]).sum();
            }
        }
    }
    out
}

#[test]
fn hopf_levi_civita_matches_the_christoffel_oracle() {
    let f = hopf_frame(12).unwrap();
    let r = riemannian_connection(&f, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for node in 0..f.nodes() {
        let beta = f.grid().coord(node, 1);
        let oracle = hopf_levi_civita(beta);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    worst = worst.max((r.get(node, a, b, c) - oracle[a][b][c]).abs());
                }
            }
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn product_vertical_connection_is_the_fibre_levi_civita() {
    let f = product_frame(8).unwrap();
    let v = vertical_connection(&f);
    for node in [0, 517, 4095] {
        let cot = 1.0 / f.grid().coord(node, 2).tan();
        // ∇_Y Y = −cot θ X and ∇_Y X = cot θ Y on the round fibre.
        assert!((v.get(node, 1, 1, 0) + cot).abs() < 1e-13);
        assert!((v.get(node, 1, 0, 1) - cot).abs() < 1e-13);
        for b in 0..4 {
            for c in 0..4 {
                assert_eq!(v.get(node, 2, b, c), 0.0, "H-components vanish");
                assert_eq!(v.get(node, 3, b, c), 0.0);
            }
        }
    }
    let r = riemannian_connection(&f, 1.0).unwrap();
    assert!(r.distance(&direct_sum_connection(&f)).unwrap() < 1e-14);
}

#[test]
fn connections_preserve_their_metrics() {
    for f in [hopf_frame(8).unwrap(), product_frame(8).unwrap()] {
        for t in [vertical_connection(&f), horizontal_connection(&f), direct_sum_connection(&f)] {
            assert!(t.metric_residual(1.0) < 1e-10, "{:?}", t.kind);
        }
        for lambda in LAMBDAS {
            assert!(riemannian_connection(&f, lambda).unwrap().metric_residual(lambda) < 1e-10);
            assert!(b_tensor(&f, lambda).unwrap().metric_residual(lambda) < 1e-10);
        }
    }
}

#[test]
fn difference_tensor_classes_match_their_closed_forms() {
    let f = hopf_frame(8).unwrap();
    let report = scaling_check(&f, &LAMBDAS).unwrap();
    assert!(report.closed_form_residual < 1e-10, "{report:?}");
    assert!(report.worst() < 1e-10, "{report:?}");
    let b = b_tensor(&f, 1.0).unwrap();
    let mut worst_zero: f64 = 0.0;
    let mut worst_transpose: f64 = 0.0;
    for node in 0..f.nodes() {
        for s in 0..3 {
            for u in 0..3 {
                for v in 0..3 {
                    if BClass::of(&f, s, u, v).scaling() == ClassScaling::Zero {
                        worst_zero = worst_zero.max(b.get(node, s, u, v).abs());
                    }
                    worst_transpose = worst_transpose.max((b.get(node, s, u, v) + b.get(node, s, v, u)).abs());
                }
            }
        }
    }
    assert!(worst_zero < 1e-12 && worst_transpose < 1e-12, "{worst_zero} {worst_transpose}");
    // The mixed classes are really exercised.
    let hvh = report.classes.iter().find(|c| c.0 == BClass::Hvh).unwrap();
    assert!((hvh.2 - 1.0).abs() < 1e-12);
}

#[test]
fn stretched_mixed_components_scale_by_one_over_lambda() {
    let f = hopf_frame(8).unwrap();
    let (b1, b4) = (b_tensor(&f, 1.0).unwrap(), b_tensor(&f, 4.0).unwrap());
    for node in [0, 200, 511] {
        // ⟨B_H X, I⟩, ⟨B_X H, I⟩ scale; ⟨B_H I, X⟩ does not.
        assert!((b4.get(node, 1, 0, 2) - 0.25 * b1.get(node, 1, 0, 2)).abs() < 1e-14);
        assert!((b4.get(node, 0, 1, 2) - 0.25 * b1.get(node, 0, 1, 2)).abs() < 1e-14);
        assert!((b4.get(node, 1, 2, 0) - b1.get(node, 1, 2, 0)).abs() < 1e-14);
    }
}

#[test]
fn limit_is_approached_at_rate_one_over_lambda() {
    let f = hopf_frame(8).unwrap();
    let r = limit_extrapolation(&f, 1e3, 1e6).unwrap();
    assert!(r.is_inverse_rate(2.0), "{r:?}");
    assert!(r.richardson_residual < 1e-10, "{r:?}");
    let limit = limit_difference(&f);
    for node in 0..f.nodes() {
        for s in 0..3 {
            for v in 0..3 {
                assert_eq!(limit.get(node, s, 0, v), 0.0, "B̃ kills vertical inputs");
            }
            for u in 1..3 {
                for v in 1..3 {
                    assert_eq!(limit.get(node, s, u, v), 0.0, "B̃ lands in V");
                }
            }
        }
    }
    let full = adiabatic_limit(&f);
    assert!(full.distance(&direct_sum_connection(&f).add_scaled(1.0, &limit).unwrap()).unwrap() < 1e-15);
    assert!(matches!(limit_extrapolation(&f, 10.0, 5.0), Err(diffk_core::Error::InvalidParameter(_))));
}

#[test]
fn hopf_certificate_passes_and_the_full_difference_fails() {
    let f = hopf_frame(16).unwrap();
    let r = cs_triviality_certificate(&f, 2).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.bracket_residual < 1e-12 && r.block_residual < 1e-10 && r.worst_trace() < 1e-10);
    let control = curve_certificate(&f, &b_tensor(&f, 1.0).unwrap(), 2).unwrap();
    assert!(!control.pass);
    assert!(control.traces[1].worst > 1e-2, "{control:?}");
}

#[test]
fn frame_curvature_of_the_base_is_the_round_sphere() {
    // The base is the sphere of radius ½: sectional curvature 4.
    let f = hopf_frame(32).unwrap();
    let h = horizontal_connection(&f);
    let r = frame_curvature(&f, &h).unwrap();
    let n = 3;
    let node = f.grid().node_of(&[0, 16, 0]);
    let at = |a: usize, b: usize| &r[((node * n + a) * n + b) * n * n..][..n * n];
    // ⟨R(H, I) I, H⟩ = 4: entry [row H][col I].
    assert!((at(1, 2)[n + 2] - 4.0).abs() < 1e-3, "{:?}", at(1, 2));
}

#[test]
fn bridged_connections_reproduce_the_frame_curvature() {
    use diffk_core::connections::curvature;
    let f = hopf_frame(16).unwrap();
    let c = to_connection(&f, &adiabatic_limit(&f)).unwrap();
    assert_eq!(c.rank(), 3);
    assert!(curvature(&c).unwrap().max_norm() > 1.0);
}

/// Two-step nilpotent frames: central vertical fields, abelian base,
/// `[H_i, H_j] = Σ_k c_ij^k X_k`.
fn nilpotent(v: usize, h: usize, coeffs: &[f64]) -> SubmersionFrame {
    let n = v + h;
    let mut t = vec![0.0; n * n * n];
    let mut it = coeffs.iter().cycle();
    for i in 0..h {
        for j in (i + 1)..h {
            for k in 0..v {
                let c = *it.next().unwrap();
                t[((v + i) * n + v + j) * n + k] = c;
                t[((v + j) * n + v + i) * n + k] = -c;
            }
        }
    }
    SubmersionFrame::constant("nilpotent", v, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nilpotent_frames_certify(v in 1usize..3, h in 2usize..4, coeffs in prop::collection::vec(-2.0f64..2.0, 6)) {
        let f = nilpotent(v, h, &coeffs);
        let r = cs_triviality_certificate(&f, 3).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        let s = scaling_check(&f, &LAMBDAS).unwrap();
        prop_assert!(s.worst() < 1e-10 && s.closed_form_residual < 1e-10);
    }

    #[test]
    fn stretched_connections_stay_metric(lambda in 1.0f64..1e4, coeffs in prop::collection::vec(-2.0f64..2.0, 6)) {
        let f = nilpotent(1, 3, &coeffs);
        prop_assert!(riemannian_connection(&f, lambda).unwrap().metric_residual(lambda) < 1e-9 * lambda);
    }
}
