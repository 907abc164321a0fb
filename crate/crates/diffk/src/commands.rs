//! The individual commands. Each returns a [`Report`]; numerical failures and
//! core errors met while evaluating become failing records, while errors in
//! the configuration itself are returned.

use std::sync::Arc;

use diffk_core::adiabatic::{b_tensor, cs_triviality_certificate, curve_certificate, hopf_frame, scaling_check, ClassScaling, SubmersionFrame};
use diffk_core::characters::{
    angle_pairing, char_integral, filling_independence, zn_boundary_vanishing, zn_pairing, AngleValue, BundleCharacter,
    Character, EnrichedCycle, PushforwardCharacter,
};
use diffk_core::connections::{
    cs_equivalent, random_connection, transgression_product_check, transgression_residual, Connection, ConnectionCurve,
    CsTolerance, InvariantPolynomial, RandomConnectionSpec,
};
use diffk_core::forms::ChartGrid;
use diffk_core::geometry::profile::Ramp;
use diffk_core::geometry::{
    catalog, circle, default_resolution, disk, product, sphere2_monopole, zn_bounding, zn_pair, zn_pair_deformed,
    CatalogName, DiskProfile, GeometrySpec,
};
use diffk_core::spectral::{aps_mod1_check, eta_invariant, ApsCalibration, CircleDiracSpec};
use diffk_core::{CURVATURE_NORMALIZATION, C64};

use crate::geometry_config::load_geometry_file;
use crate::report::Report;
use crate::run::RunConfig;
use crate::Error;

/// Runs `f`, turning a core error into a failing record under `key`.
pub(crate) fn guarded(r: &mut Report, key: &str, f: impl FnOnce(&mut Report) -> diffk_core::Result<()>) {
    if let Err(e) = f(r) {
        r.error(key, e.to_string());
    }
}

fn parse_catalog(name: &str) -> Result<CatalogName, Error> {
    name.parse().map_err(|e| Error::Field { path: "catalog".into(), message: format!("{e}") })
}

/// The configured geometry: a geometry file, else the catalog entry, else
/// `default`.
fn geometry(config: &RunConfig, default: &str) -> Result<GeometrySpec, Error> {
    let res = config.resolution()?;
    match (&config.geometry, &config.catalog) {
        (Some(_), Some(_)) => Err(Error::Field { path: "geometry".into(), message: "give a geometry file or a catalog name, not both".into() }),
        (Some(path), None) => load_geometry_file(path, res),
        (None, name) => Ok(catalog(&parse_catalog(name.as_deref().unwrap_or(default))?, res)?),
    }
}

fn fmt_a(a: f64) -> String {
    format!("a={a}")
}

/// `a mod 1` as an angle.
fn angle_of(a: f64) -> AngleValue {
    AngleValue::reduce(C64::new(a, 0.0))
}

const DEFAULT_TWISTS: [f64; 3] = [0.1, 0.25, 0.7];

/// Angle pairings of fillings. A bare `disk2_flat` catalog is swept over
/// `a`; flat disks are checked against `a mod 1` and against a second
/// filling with a different interior profile.
pub fn pairing(config: &RunConfig) -> Result<Report, Error> {
    let mut r = Report::new("pairing");
    let res = config.resolution()?;
    let bare = config.geometry.is_none() && config.catalog.as_deref().is_none_or(|c| c.trim() == "disk2_flat");
    if bare {
        let twists = if config.a.is_empty() { DEFAULT_TWISTS.to_vec() } else { config.a.clone() };
        for a in twists {
            disk_pairing(&mut r, config, a, res.unwrap_or(default_resolution(2)));
        }
        return Ok(r);
    }
    if let Some(CatalogName::Disk2Flat { a }) = config.catalog.as_deref().map(parse_catalog).transpose()? {
        disk_pairing(&mut r, config, a, res.unwrap_or(default_resolution(2)));
        return Ok(r);
    }
    let filling = geometry(config, "disk2_flat(0)")?;
    let key = format!("pairing.{}", filling.name);
    guarded(&mut r, &key.clone(), |r| {
        let v = angle_pairing(&EnrichedCycle::from_filling(filling)?)?;
        r.info(format!("{key}.value"), v.value.re);
        r.info(format!("{key}.imag"), v.value.im);
        if let [a] = config.a[..] {
            r.below(format!("{key}.angle_error"), v.distance(&angle_of(a)), config.tolerance("angle"));
        }
        Ok(())
    });
    Ok(r)
}

fn disk_pairing(r: &mut Report, config: &RunConfig, a: f64, n: usize) {
    let key = format!("pairing.disk2_flat.{}", fmt_a(a));
    guarded(r, &key.clone(), |r| {
        let ec = EnrichedCycle::from_filling(disk(DiskProfile::standard(a), n, n, 1.0)?)?;
        let v = angle_pairing(&ec)?;
        r.info(format!("{key}.value"), v.value.re);
        r.below(format!("{key}.angle_error"), v.distance(&angle_of(a)), config.tolerance("angle"));
        let other = EnrichedCycle::from_filling(disk(DiskProfile { flux: a, ramp: Ramp::new(0.25, 0.65) }, n, n, 1.0)?)?;
        let gap = filling_independence(&ec, &other)?;
        r.below(format!("{key}.filling_gap"), gap.deviation, config.tolerance("filling"));
        Ok(())
    });
}

/// Order, deformation invariance and boundary vanishing of the Z/n pairing.
pub fn zn(config: &RunConfig) -> Result<Report, Error> {
    let mut r = Report::new("zn");
    let (n, k) = (config.n.unwrap_or(3), config.k.unwrap_or(1));
    if n < 2 {
        return Err(Error::Field { path: "n".into(), message: format!("Z/n needs n >= 2, got {n}") });
    }
    let res = config.resolution()?.unwrap_or(default_resolution(2));
    let steps = config.steps.unwrap_or(10);
    let key = format!("zn.n={n}.k={k}");
    guarded(&mut r, &key.clone(), |r| {
        let base = zn_pairing(&zn_pair(n, k, res)?)?;
        r.info(format!("{key}.value"), base.value.re);
        r.below(format!("{key}.order"), base.order_residual(n), config.tolerance("order"));
        let mut worst: f64 = 0.0;
        for step in 1..=steps {
            let v = zn_pairing(&zn_pair_deformed(n, k, res, step as f64 / steps as f64)?)?;
            worst = worst.max(v.distance(&base));
        }
        r.below(format!("{key}.deformation"), worst, config.tolerance("deformation"));
        Ok(())
    });
    let key = format!("zn.n={n}.bounding");
    guarded(&mut r, &key.clone(), |r| {
        let v = zn_boundary_vanishing(&zn_bounding(n, 0.4, res.min(48))?)?;
        r.below(key, v, config.tolerance("bounding"));
        Ok(())
    });
    Ok(r)
}

/// Rank-2 pair with reproducible random potentials.
pub fn random_pair(grid: &Arc<ChartGrid>, seed: u64, active_axes: Option<usize>) -> diffk_core::Result<(Connection, Connection)> {
    let spec = |seed| RandomConnectionSpec { rank: 2, modes: 2, amplitude: 0.1, seed, active_axes };
    Ok((random_connection(grid, spec(2 * seed))?, random_connection(grid, spec(2 * seed + 1))?))
}

/// `|(i/2π)^l (d TP_l − ΔP_l)|_max` along `curve`.
pub fn normalized_residual(curve: &ConnectionCurve, l: usize) -> diffk_core::Result<f64> {
    let norm = CURVATURE_NORMALIZATION.powu(l as u32).norm();
    Ok(norm * transgression_residual(curve, &InvariantPolynomial::trace_power(l))?)
}

/// Transgression closure, the product identity and CS equivalence for two
/// connections: named ones of the geometry, or a seeded random pair.
pub fn cs_check(config: &RunConfig) -> Result<Report, Error> {
    let mut r = Report::new("cs-check");
    let g = geometry(config, "torus2")?;
    let (c0, c1) = match &config.connections {
        Some([a, b]) => (g.connection(a)?.clone(), g.connection(b)?.clone()),
        None => match random_pair(&g.grid, config.seed, None) {
            Ok(pair) => pair,
            Err(e) => {
                r.error(format!("cs.{}.pair", g.name), e.to_string());
                return Ok(r);
            }
        },
    };
    let lmax = config.lmax.unwrap_or(2);
    let key = format!("cs.{}", g.name);
    let h = g.grid.max_spacing();
    guarded(&mut r, &key.clone(), |r| {
        let curve = ConnectionCurve::linear(&c0, &c1)?;
        for l in 1..=lmax {
            r.below(format!("{key}.closure.l={l}"), normalized_residual(&curve, l)?, config.tolerance("closure") * h * h);
        }
        if g.dim() >= 4 {
            r.below(format!("{key}.product.l=1,1"), transgression_product_check(&curve, 1, 1, &g.cycles)?, config.tolerance("product"));
        }
        let tol = CsTolerance { period: config.tolerance("period"), ..CsTolerance::for_grid(h) };
        let eq = cs_equivalent(&c0, &c1, &g.cycles, tol)?;
        for level in &eq.levels {
            r.info(format!("{key}.period.l={}", level.l), level.max_period);
        }
        r.info(format!("{key}.equivalent"), if eq.equivalent { 1.0 } else { 0.0 });
        Ok(())
    });
    Ok(r)
}

fn frame(config: &RunConfig) -> Result<SubmersionFrame, Error> {
    let name = parse_catalog(config.catalog.as_deref().unwrap_or("hopf"))?;
    if config.geometry.is_some() || name != CatalogName::HopfS3OverS2 {
        return Err(Error::Field {
            path: "catalog".into(),
            message: "the adiabatic certificate runs on the `hopf` submersion frame".into(),
        });
    }
    Ok(hopf_frame(config.resolution()?.unwrap_or(16))?)
}

const LAMBDAS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// CS-triviality certificate of the adiabatic limit, scaling of the
/// difference tensor, and the control run with the unscaled difference.
pub fn adiabatic(config: &RunConfig) -> Result<Report, Error> {
    let mut r = Report::new("adiabatic");
    let f = frame(config)?;
    let lmax = config.lmax.unwrap_or(2);
    let (cert_tol, scale_tol) = (config.tolerance("certificate"), config.tolerance("scaling"));
    guarded(&mut r, "adiabatic.certificate", |r| {
        let c = cs_triviality_certificate(&f, lmax)?;
        r.below("adiabatic.certificate.bracket", c.bracket_residual, cert_tol);
        r.below("adiabatic.certificate.block", c.block_residual, cert_tol);
        r.below("adiabatic.certificate.curvature", c.curvature_residual, c.curvature_tol);
        for t in &c.traces {
            r.below(format!("adiabatic.certificate.trace.l={}", t.l), t.worst, cert_tol);
        }
        Ok(())
    });
    guarded(&mut r, "adiabatic.scaling", |r| {
        let s = scaling_check(&f, &LAMBDAS)?;
        r.below("adiabatic.scaling.closed_form", s.closed_form_residual, scale_tol);
        let mut zero: f64 = 0.0;
        for (class, dev, size) in &s.classes {
            r.below(format!("adiabatic.scaling.{class:?}"), *dev, scale_tol);
            if class.scaling() == ClassScaling::Zero {
                zero = zero.max(*size);
            }
        }
        r.below("adiabatic.scaling.zero_classes", zero, scale_tol);
        Ok(())
    });
    guarded(&mut r, "adiabatic.control", |r| {
        let c = curve_certificate(&f, &b_tensor(&f, 1.0)?, lmax)?;
        let worst = c.traces.iter().map(|t| t.worst).fold(0.0, f64::max);
        // The unscaled difference must not certify.
        r.above("adiabatic.control.trace", worst, cert_tol);
        Ok(())
    });
    Ok(r)
}

/// `1 − 2 (a mod 1)`, zero at integers.
pub fn eta_oracle(a: f64) -> f64 {
    let frac = a - a.floor();
    if frac == 0.0 {
        0.0
    } else {
        1.0 - 2.0 * frac
    }
}

const DEFAULT_ETA_TWISTS: [f64; 4] = [0.1, 0.25, 0.5, 0.9];

/// Reduced eta invariants of the twisted circle Dirac operator and, with
/// `aps`, the mod-one comparison with disk pairings.
pub fn eta(config: &RunConfig) -> Result<Report, Error> {
    let mut r = Report::new("eta");
    let twists = if config.a.is_empty() { DEFAULT_ETA_TWISTS.to_vec() } else { config.a.clone() };
    for a in twists {
        let key = format!("eta.{}", fmt_a(a));
        guarded(&mut r, &key.clone(), |r| {
            let e = eta_invariant(&CircleDiracSpec::new(a)?)?;
            r.info(format!("{key}.zeta"), e.zeta);
            r.below(format!("{key}.error"), (e.abel - eta_oracle(a)).abs(), config.tolerance("eta"));
            Ok(())
        });
    }
    if config.aps {
        let res = config.resolution()?.unwrap_or(default_resolution(2));
        guarded(&mut r, "eta.aps", |r| {
            let cal = ApsCalibration::run(res)?;
            r.info("eta.aps.sigma", cal.sigma);
            let mut worst: f64 = 0.0;
            for k in 0..20 {
                let a = (k as f64 + 0.5) / 20.0;
                let ec = EnrichedCycle::from_filling(disk(DiskProfile::standard(a), res, res, 1.0)?)?;
                worst = worst.max(aps_mod1_check(&CircleDiracSpec::new(a)?, &ec, &cal)?.residual);
            }
            r.below("eta.aps.residual", worst, config.tolerance("aps"));
            Ok(())
        });
    }
    Ok(r)
}

/// The wrong-way image of the bundle character along `S¹ × S²_k → S¹`,
/// evaluated on flat disks.
pub fn pushforward(config: &RunConfig) -> Result<Report, Error> {
    let mut r = Report::new("pushforward");
    let k = config.k.unwrap_or(1);
    let fiber_res = config.resolution()?.unwrap_or(24);
    let twists = if config.a.is_empty() { vec![0.3] } else { config.a.clone() };
    for a in twists {
        let key = format!("pushforward.k={k}.{}", fmt_a(a));
        guarded(&mut r, &key.clone(), |r| {
            let total = product(&circle(8, 0.0)?, &sphere2_monopole(k, fiber_res)?)?;
            let b = PushforwardCharacter::new(BundleCharacter, &total)?;
            let ec = EnrichedCycle::from_filling(disk(DiskProfile::standard(a), 48, 8, 1.0)?)?;
            let (via_fiber, direct) = (b.evaluate(&ec)?, b.direct(&ec)?);
            r.info(format!("{key}.value"), via_fiber.value.re);
            r.below(format!("{key}.agreement"), via_fiber.distance(&direct), config.tolerance("agreement"));
            // Unreduced: ∫_{W×F} Todd ∧ ch against ∫_W Todd(W) ∧ ∫_F Todd ∧ ch.
            let projection = (char_integral(&b.lift(&ec)?.filling)? - via_fiber.raw).norm();
            r.below(format!("{key}.projection"), projection, config.tolerance("projection"));
            r.below(format!("{key}.oracle"), direct.distance(&angle_of(a * (k as f64 + 1.0))), config.tolerance("oracle"));
            Ok(())
        });
    }
    Ok(r)
}
