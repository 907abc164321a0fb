use std::path::PathBuf;

use diffk::geometry_config::{load_geometry, load_geometry_file};
use diffk::{run, Error, RunConfig};
use diffk_core::characters::{angle_pairing, EnrichedCycle};
use diffk_core::geometry::{catalog, circle, product, sphere2_monopole, CatalogName};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn torus_config_matches_the_catalog() {
    let g = load_geometry_file(&data("torus2.toml"), None).unwrap();
    let t = catalog(&CatalogName::Torus2, Some(16)).unwrap();
    assert_eq!(g.name, t.name);
    assert_eq!(g.grid, t.grid);
    assert_eq!(g.cycles, t.cycles);
    for c in ["tangent", "bundle"] {
        assert_eq!(g.connection(c).unwrap(), t.connection(c).unwrap());
    }
}

#[test]
fn catalog_configs_take_the_fallback_resolution() {
    let g = load_geometry("catalog = \"torus2\"").unwrap();
    assert_eq!(g.grid.len(), 64 * 64);
    let text = "catalog = \"sphere2_monopole(2)\"\nresolution = 12\norientation = -1";
    let g = load_geometry(text).unwrap();
    assert_eq!((g.grid.len(), g.orientation), (144, -1.0));
}

#[test]
fn negative_masks_violate_the_grid_invariants() {
    let text = "[grid]\naxes = [{ kind = \"periodic\", nodes = 3, lo = 0.0, hi = 1.0 }]\nmask = [1.0, -1.0, 1.0]\n";
    let err = load_geometry(text).unwrap_err();
    assert!(matches!(err, Error::Core(diffk_core::Error::InvariantViolation { .. })), "{err}");
}

#[test]
fn disk_config_pairs_to_its_holonomy() {
    let g = load_geometry_file(&data("disk_quarter.toml"), None).unwrap();
    let v = angle_pairing(&EnrichedCycle::from_filling(g).unwrap()).unwrap();
    assert!((v.value.re - 0.25).abs() < 1e-6 && v.value.im.abs() < 1e-12, "{v:?}");
}

#[test]
fn fibration_configs_are_products() {
    let g = load_geometry_file(&data("circle_bundle.toml"), None).unwrap();
    let expected = product(&circle(8, 0.0).unwrap(), &sphere2_monopole(1, 16).unwrap()).unwrap();
    assert_eq!(g.grid, expected.grid);
    assert_eq!(g.fibration, expected.fibration);
    assert_eq!(g.connection("bundle").unwrap(), expected.connection("bundle").unwrap());
}

#[test]
fn chart_errors_carry_their_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[grid]\naxes = []\n").unwrap();
    let err = load_geometry_file(&path, None).unwrap_err();
    assert!(err.to_string().starts_with(&path.display().to_string()), "{err}");
    assert!(matches!(err.root(), Error::Field { path, .. } if path == "grid.axes"));
}

#[test]
fn named_connections_are_checked_from_a_run_config() {
    let config = RunConfig::from_file(&data("cs_named.toml")).unwrap();
    let report = run(&config).unwrap();
    assert!(report.passed(), "{:?}", report.failures());
    // The twist by 0.3 has a non-integral period on the first circle.
    let period = report.records().into_iter().find(|r| r.key == "cs.twisted_torus.period.l=1").unwrap().value;
    assert!((period - 0.3).abs() < 1e-12, "{period}");
    let equivalent = report.records().into_iter().find(|r| r.key.ends_with("equivalent")).unwrap().value;
    assert_eq!(equivalent, 0.0);
}

#[test]
fn run_configs_reject_unknown_connections() {
    let config = RunConfig { connections: Some(["flat".into(), "nope".into()]), ..RunConfig::from_file(&data("cs_named.toml")).unwrap() };
    assert!(matches!(run(&config), Err(Error::Core(diffk_core::Error::InvalidParameter(m))) if m.contains("nope")));
}
