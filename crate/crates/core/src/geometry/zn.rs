use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use super::catalog::{circle, disk, DiskProfile};
use super::profile::Ramp;
use super::spec::{Boundary, BoundaryComponent, GeometrySpec, Placement};
use crate::connections::Connection;
use crate::forms::{exterior_d, Axis, ChartGrid, CycleBasis, MatrixForm};
use crate::{Error, Result, C64};

const OUTER_RADIUS: f64 = 0.9;
const HOLE_RADIUS: f64 = 0.24;
const HOLE_RING: f64 = 0.5;
/// Radial profile of each hole's flux, supported strictly inside the hole.
const HOLE_RAMP: (f64, f64) = (0.01, 0.16);
/// Radius of the compactly supported deformation bump at the origin.
const BUMP_RADIUS: f64 = 0.12;
const CIRCLE_NODES: usize = 128;

/// A Z/n-manifold `(V, βV)` with a filling `Q` of `βV` and abelian bundle
/// data.
///
/// `v` lists the connected pieces of `V`; their boundary components, `n` in
/// total, each carry bundle data gauge-equivalent to that of `beta_v` after
/// orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct ZnCycleSpec {
    pub n: usize,
    pub v: Vec<GeometrySpec>,
    pub beta_v: GeometrySpec,
    pub q: GeometrySpec,
}

impl ZnCycleSpec {
    /// Checks the boundary count and that each boundary component of `V`
    /// and of `Q` carries the `βV` holonomy mod 1.
    pub fn validate(&self) -> Result<()> {
        let count: usize = self.v.iter().map(|p| p.boundary.as_ref().map_or(0, |b| b.components.len())).sum();
        if count != self.n {
            return Err(Error::BoundaryMismatch(format!("V has {count} boundary components, {} expected", self.n)));
        }
        let target = oriented_holonomy(&self.beta_v, 1.0)?;
        let q_parts = self.q.boundary.as_ref().map_or(&[][..], |b| &b.components[..]);
        for piece in self.v.iter().chain(core::iter::once(&self.q)) {
            piece.validate()?;
        }
        let v_parts = self.v.iter().flat_map(|p| p.boundary.iter().flat_map(|b| b.components.iter()));
        for comp in v_parts.chain(q_parts.iter()) {
            let h = oriented_holonomy(&comp.geometry, comp.orientation)?;
            let gap = h - target;
            if (gap - gap.round()).abs() > 1e-8 {
                return Err(Error::BoundaryMismatch(format!(
                    "boundary holonomy {h} does not match βV holonomy {target} mod 1"
                )));
            }
        }
        if q_parts.len() != 1 {
            return Err(Error::BoundaryMismatch(format!("Q has {} boundary components, 1 expected", q_parts.len())));
        }
        Ok(())
    }
}

/// `orientation · (i/2π) ∮ A` of the bundle on a circle geometry.
pub fn oriented_holonomy(circle: &GeometrySpec, orientation: f64) -> Result<f64> {
    if circle.dim() != 1 {
        return Err(Error::InvalidParameter(format!("`{}` is not a circle", circle.name)));
    }
    let a = circle.bundle()?.potential()?;
    if a.rank() != 1 {
        return Err(Error::RankMismatch { left: a.rank(), right: 1 });
    }
    let total = circle.integrate(a)? * crate::CURVATURE_NORMALIZATION;
    Ok(orientation * total.re)
}

fn hole_centers(n: usize) -> Vec<[f64; 2]> {
    (0..n - 1)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / (n - 1) as f64;
            [HOLE_RING * t.cos(), HOLE_RING * t.sin()]
        })
        .collect()
}

/// Flat abelian data on the planar Z/n surface: `A = −i f Σ_j ψ(ρ_j) dθ_j`
/// around each hole centre, plus `s` times a bump `β` supported near the
/// origin.
#[derive(Clone, Debug)]
struct PlanarField {
    centers: Vec<[f64; 2]>,
    flux: f64,
    ramp: Ramp,
    bump: f64,
}

impl PlanarField {
    /// Coefficients `(A_x, A_y)` at `(x, y)`, imaginary unit stripped.
    fn potential(&self, x: f64, y: f64) -> [f64; 2] {
        let mut out = [0.0, 0.0];
        for c in &self.centers {
            let (dx, dy) = (x - c[0], y - c[1]);
            let rho2 = dx * dx + dy * dy;
            let psi = self.ramp.value(rho2.sqrt());
            if psi == 0.0 {
                continue;
            }
            out[0] += -self.flux * psi * (-dy) / rho2;
            out[1] += -self.flux * psi * dx / rho2;
        }
        if self.bump != 0.0 {
            // β = −i b(ρ) (x dy − y dx) with b a bump of radius BUMP_RADIUS.
            let b = bump(x * x + y * y);
            out[0] += -self.bump * b * (-y);
            out[1] += -self.bump * b * x;
        }
        out
    }

    /// Coefficient of `dx ∧ dy` in the hole part of `dA`, imaginary unit
    /// stripped. The bump part is differentiated on the grid instead, so its
    /// integral vanishes by discrete Stokes rather than by quadrature.
    fn hole_curvature(&self, x: f64, y: f64) -> f64 {
        let mut out = 0.0;
        for c in &self.centers {
            let (dx, dy) = (x - c[0], y - c[1]);
            let rho = (dx * dx + dy * dy).sqrt();
            let d = self.ramp.derivative(rho);
            if d != 0.0 {
                out += -self.flux * d / rho;
            }
        }
        out
    }
}

fn bump(r2: f64) -> f64 {
    let s = r2 / (BUMP_RADIUS * BUMP_RADIUS);
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s)).exp()
    }
}

/// Circle of radius `radius` about `center`, bundle `A` pulled back along
/// `θ ↦ center + radius (cos θ, sin θ)`.
fn boundary_circle(field: &PlanarField, center: [f64; 2], radius: f64) -> Result<GeometrySpec> {
    let mut g = circle(CIRCLE_NODES, 0.0)?;
    let grid = g.grid.clone();
    let pot = MatrixForm::scalar_fn(grid.clone(), 1, |t, _| {
        let (c, s) = (t[0].cos(), t[0].sin());
        let a = field.potential(center[0] + radius * c, center[1] + radius * s);
        C64::new(0.0, radius * (-a[0] * s + a[1] * c))
    });
    let bundle = Connection::with_curvature(pot, MatrixForm::zeros(grid, 2, 1))?;
    g.set_connection("bundle", bundle)?;
    g.name = format!("circle@({:.3},{:.3})r{radius}", center[0], center[1]);
    Ok(g)
}

fn planar_surface(n: usize, a: f64, res: usize, bump_strength: f64) -> Result<GeometrySpec> {
    let field = PlanarField {
        centers: hole_centers(n),
        flux: -a,
        ramp: Ramp::new(HOLE_RAMP.0, HOLE_RAMP.1),
        bump: bump_strength,
    };
    let base = ChartGrid::new(vec![Axis::interval(res, -1.0, 1.0), Axis::interval(res, -1.0, 1.0)])?;
    let mask = (0..base.len())
        .map(|node| {
            let (x, y) = (base.coord(node, 0), base.coord(node, 1));
            let inside = x * x + y * y < OUTER_RADIUS * OUTER_RADIUS;
            let outside_holes = field.centers.iter().all(|c| (x - c[0]).powi(2) + (y - c[1]).powi(2) > HOLE_RADIUS * HOLE_RADIUS);
            if inside && outside_holes {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let grid = Arc::new(base.with_mask(mask)?);
    let pot = MatrixForm::scalar_fn(grid.clone(), 1, |x, m| {
        let p = field.potential(x[0], x[1]);
        C64::new(0.0, if m == 0b01 { p[0] } else { p[1] })
    });
    let mut f = MatrixForm::scalar_fn(grid.clone(), 2, |x, _| C64::new(0.0, field.hole_curvature(x[0], x[1])));
    if bump_strength != 0.0 {
        let only_bump = PlanarField { centers: Vec::new(), ..field.clone() };
        let beta = MatrixForm::scalar_fn(grid.clone(), 1, |x, m| {
            let p = only_bump.potential(x[0], x[1]);
            C64::new(0.0, if m == 0b01 { p[0] } else { p[1] })
        });
        f = f.add(&exterior_d(&beta)?)?;
    }
    let mut v = GeometrySpec::new(format!("zn_surface({n})"), grid.clone());
    v.cycles = CycleBasis::default();
    v.connections.push(("tangent".into(), Connection::trivial(grid.clone(), 1)));
    v.connections.push(("bundle".into(), Connection::with_curvature(pot, f)?));
    let mut components = Vec::with_capacity(n);
    components.push(BoundaryComponent {
        geometry: boundary_circle(&field, [0.0, 0.0], OUTER_RADIUS)?,
        placement: Placement::Circle { center: [0.0, 0.0], radius: OUTER_RADIUS },
        orientation: 1.0,
    });
    for &c in &field.centers {
        components.push(BoundaryComponent {
            geometry: boundary_circle(&field, c, HOLE_RADIUS)?,
            placement: Placement::Circle { center: c, radius: HOLE_RADIUS },
            orientation: -1.0,
        });
    }
    v.boundary = Some(Boundary { components, collar_width: 0.05 });
    Ok(v)
}

/// The Z/n pair with holonomy `a = k/n`: `V` a disk with `n − 1` holes in
/// the plane carrying a flat line bundle, `βV` the flat circle, `Q` the
/// standard disk filling.
pub fn zn_pair(n: usize, k: i64, res: usize) -> Result<ZnCycleSpec> {
    zn_pair_deformed(n, k, res, 0.0)
}

/// [`zn_pair`] with the enrichment deformed by `s ∈ [0, 1]`: a compactly
/// supported bump is added to `∇_V` and the flux profile of `Q` is moved.
pub fn zn_pair_deformed(n: usize, k: i64, res: usize, s: f64) -> Result<ZnCycleSpec> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("Z/n pair needs n ≥ 2, got {n}")));
    }
    let a = k as f64 / n as f64;
    let v = planar_surface(n, a, res, 0.8 * s)?;
    let q_profile = DiskProfile { flux: a, ramp: Ramp::new(0.1 + 0.1 * s, 0.8 - 0.05 * s) };
    let z = ZnCycleSpec {
        n,
        v: vec![v],
        beta_v: circle(CIRCLE_NODES, a)?,
        q: disk(q_profile, res, res, 1.0)?,
    };
    z.validate()?;
    Ok(z)
}

/// A Z/n-manifold that bounds: `V` is `n` disks with distinct flux profiles,
/// each glued to a copy of `Q̄` giving a sphere that bounds a ball over which
/// the line bundle extends.
pub fn zn_bounding(n: usize, a: f64, res: usize) -> Result<ZnCycleSpec> {
    let pieces = (0..n)
        .map(|j| {
            let t = j as f64 / n as f64;
            disk(DiskProfile { flux: a, ramp: Ramp::new(0.05 + 0.2 * t, 0.75 + 0.05 * t) }, res, res, 1.0)
        })
        .collect::<Result<_>>()?;
    let z = ZnCycleSpec { n, v: pieces, beta_v: circle(CIRCLE_NODES, a)?, q: disk(DiskProfile::standard(a), res, res, 1.0)? };
    z.validate()?;
    Ok(z)
}

/// `n = 2` example: a disk and its mirror image, the mirror carrying the
/// reflected connection and the opposite orientation.
pub fn zn_mirror_double(a: f64, res: usize) -> Result<ZnCycleSpec> {
    let profile = DiskProfile::standard(a);
    let mirrored = DiskProfile { flux: -a, ramp: profile.ramp };
    let z = ZnCycleSpec {
        n: 2,
        v: vec![disk(profile, res, res, 1.0)?, disk(mirrored, res, res, -1.0)?],
        beta_v: circle(CIRCLE_NODES, a)?,
        q: disk(DiskProfile { flux: a, ramp: Ramp::new(0.2, 0.7) }, res, res, 1.0)?,
    };
    z.validate()?;
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_holonomies_agree_mod_one() {
        let z = zn_pair(3, 1, 48).unwrap();
        let comps = &z.v[0].boundary.as_ref().unwrap().components;
        assert_eq!(comps.len(), 3);
        for c in comps {
            let h = oriented_holonomy(&c.geometry, c.orientation).unwrap();
            let gap = h - 1.0 / 3.0;
            assert!((gap - gap.round()).abs() < 1e-10, "holonomy {h}");
        }
    }

    #[test]
    fn builders_validate_across_n_and_deformation() {
        for n in 2..=5 {
            for k in 0..n as i64 {
                zn_pair(n, k, 48).unwrap();
            }
        }
        for s in [0.25, 0.5, 1.0] {
            zn_pair_deformed(3, 1, 48, s).unwrap();
        }
        zn_bounding(3, 0.4, 32).unwrap();
        zn_mirror_double(0.3, 32).unwrap();
    }
}
