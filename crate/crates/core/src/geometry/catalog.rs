use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;
use num_traits::Float;

use super::profile::Ramp;
use super::spec::{product, Boundary, BoundaryComponent, GeometrySpec, Placement};
use super::zn::zn_pair;
use crate::connections::Connection;
use crate::forms::{Axis, ChartGrid, Cycle, CycleBasis, MatrixForm, Side};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Names accepted by [`catalog`].
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogName {
    Circle,
    Torus2,
    Torus4,
    Sphere2Monopole { k: i64 },
    Cp1Tangent,
    Disk2Flat { a: f64 },
    Product(Box<CatalogName>, Box<CatalogName>),
    HopfS3OverS2,
    ZnPair { n: usize, k: i64 },
}

impl CatalogName {
    pub fn dim(&self) -> usize {
        match self {
            Self::Circle => 1,
            Self::Torus2 | Self::Sphere2Monopole { .. } | Self::Cp1Tangent | Self::Disk2Flat { .. } => 2,
            Self::ZnPair { .. } => 2,
            Self::Torus4 => 4,
            Self::HopfS3OverS2 => 3,
            Self::Product(a, b) => a.dim() + b.dim(),
        }
    }
}

/// Default nodes per axis for a chart of the given dimension.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        0 | 1 => 256,
        2 => 64,
        3 => 24,
        _ => 16,
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Circle => f.write_str("circle"),
            Self::Torus2 => f.write_str("torus2"),
            Self::Torus4 => f.write_str("torus4"),
            Self::Sphere2Monopole { k } => write!(f, "sphere2_monopole({k})"),
            Self::Cp1Tangent => f.write_str("cp1_tangent"),
            Self::Disk2Flat { a } => write!(f, "disk2_flat({a})"),
            Self::Product(a, b) => write!(f, "product({a},{b})"),
            Self::HopfS3OverS2 => f.write_str("hopf_s3_over_s2"),
            Self::ZnPair { n, k } => write!(f, "zn_pair({n},{k})"),
        }
    }
}

/// Splits `s` at top-level commas.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn parse_int(s: &str, what: &str) -> Result<i64> {
    s.parse::<i64>().map_err(|_| Error::InvalidParameter(format!("{what} must be an integer, got `{s}`")))
}

impl FromStr for CatalogName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], split_args(&s[open + 1..s.len() - 1])),
            Some(_) => return Err(Error::UnknownGeometry(s.to_string())),
            None => (s, Vec::new()),
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("`{head}` takes {n} argument(s)")))
            }
        };
        match head {
            "circle" | "torus2" | "torus4" | "cp1_tangent" | "hopf_s3_over_s2" | "hopf" if args.is_empty() => {
                Ok(match head {
                    "circle" => Self::Circle,
                    "torus2" => Self::Torus2,
                    "torus4" => Self::Torus4,
                    "cp1_tangent" => Self::Cp1Tangent,
                    _ => Self::HopfS3OverS2,
                })
            }
            "sphere2_monopole" => {
                arity(1)?;
                Ok(Self::Sphere2Monopole { k: parse_int(args[0], "monopole charge")? })
            }
            "disk2_flat" => {
                arity(1)?;
                let a = args[0]
                    .parse::<f64>()
                    .ok()
                    .filter(|a| a.is_finite())
                    .ok_or_else(|| Error::InvalidParameter(format!("holonomy must be a number, got `{}`", args[0])))?;
                Ok(Self::Disk2Flat { a })
            }
            "product" => {
                arity(2)?;
                Ok(Self::Product(Box::new(args[0].parse()?), Box::new(args[1].parse()?)))
            }
            "zn_pair" => {
                arity(2)?;
                let n = parse_int(args[0], "n")?;
                if n < 2 {
                    return Err(Error::InvalidParameter(format!("zn_pair needs n ≥ 2, got {n}")));
                }
                Ok(Self::ZnPair { n: n as usize, k: parse_int(args[1], "k")? })
            }
            _ => Err(Error::UnknownGeometry(s.to_string())),
        }
    }
}

/// Builds and validates a catalog geometry. `resolution` overrides the
/// per-axis node count; `None` picks [`default_resolution`] for the dimension.
///
/// `zn_pair(n,k)` returns its surface `V`; the full Z/n data come from
/// [`super::zn_pair`]. `hopf_s3_over_s2` returns the chart of the Euler-angle
/// region carrying the submersion frame of [`crate::adiabatic::hopf_frame`].
pub fn catalog(name: &CatalogName, resolution: Option<usize>) -> Result<GeometrySpec> {
    let n = resolution.unwrap_or_else(|| default_resolution(name.dim()));
    let g = match name {
        CatalogName::Circle => circle(n, 0.0)?,
        CatalogName::Torus2 => torus(2, n)?,
        CatalogName::Torus4 => torus(4, n)?,
        CatalogName::Sphere2Monopole { k } => sphere2_monopole(*k, n)?,
        CatalogName::Cp1Tangent => cp1_tangent(n)?,
        CatalogName::Disk2Flat { a } => disk2_flat(*a, n)?,
        CatalogName::Product(a, b) => {
            let (ga, gb) = (catalog(a, resolution)?, catalog(b, resolution)?);
            product(&ga, &gb)?
        }
        CatalogName::HopfS3OverS2 => hopf_chart(n)?,
        CatalogName::ZnPair { n: order, k } => {
            let mut v = zn_pair(*order, *k, n)?.v;
            v.swap_remove(0)
        }
    };
    g.validate()?;
    Ok(g)
}

fn arc(axes: Vec<Axis>) -> Result<Arc<ChartGrid>> {
    Ok(Arc::new(ChartGrid::new(axes)?))
}

/// Flat line connection `−i a dx_axis` with zero curvature.
fn flat_line(grid: &Arc<ChartGrid>, axis: usize, a: f64) -> Result<Connection> {
    let mask = 1u32 << axis;
    let pot = MatrixForm::scalar_fn(grid.clone(), 1, |_, m| if m == mask { C64::new(0.0, -a) } else { ZERO });
    Connection::with_curvature(pot, MatrixForm::zeros(grid.clone(), 2, 1))
}

/// Circle `θ ∈ [0, 2π)` whose bundle is the flat line `−i a dθ`, holonomy
/// parameter `(i/2π)∮A = a`.
pub fn circle(n: usize, a: f64) -> Result<GeometrySpec> {
    let grid = arc(vec![Axis::periodic(n, 0.0, 2.0 * PI)])?;
    let mut g = GeometrySpec::new("circle", grid.clone());
    g.cycles = CycleBasis::new(vec![Cycle::point(0), Cycle::fundamental(&grid, 1.0)]);
    g.connections.push(("tangent".into(), Connection::trivial(grid.clone(), 1)));
    g.connections.push(("bundle".into(), flat_line(&grid, 0, a)?));
    Ok(g)
}

/// Unit-volume flat torus `[0,1)^dim` with the trivial line bundle.
pub fn torus(dim: usize, n: usize) -> Result<GeometrySpec> {
    let grid = arc((0..dim).map(|_| Axis::periodic(n, 0.0, 1.0)).collect())?;
    let mut g = GeometrySpec::new(format!("torus{dim}"), grid.clone());
    let mut cycles = vec![Cycle::point(0)];
    let zero = vec![0; dim];
    for mask in 1u32..(1 << dim) {
        let free: Vec<usize> = (0..dim).filter(|k| mask & (1 << k) != 0).collect();
        cycles.push(Cycle::coordinate_slice(&grid, &zero, &free, 1.0));
    }
    cycles.sort_by_key(|c| c.dim);
    g.cycles = CycleBasis::new(cycles);
    g.connections.push(("tangent".into(), Connection::trivial(grid.clone(), 1)));
    g.connections.push(("bundle".into(), Connection::trivial(grid, 1)));
    Ok(g)
}

fn sphere_grid(n: usize) -> Result<Arc<ChartGrid>> {
    arc(vec![Axis::interval(n, 0.0, PI), Axis::periodic(n, 0.0, 2.0 * PI)])
}

/// Line bundle on `(θ, φ)` with curvature `−(i c / 2) sin θ dθ ∧ dφ`, first
/// Chern number `c`.
pub fn sphere_line(grid: &Arc<ChartGrid>, charge: f64) -> Result<Connection> {
    let f = MatrixForm::scalar_fn(grid.clone(), 2, |x, _| C64::new(0.0, -0.5 * charge * x[0].sin()));
    Connection::curvature_only(f)
}

fn sphere(name: String, n: usize, charge: f64) -> Result<GeometrySpec> {
    let grid = sphere_grid(n)?;
    let mut g = GeometrySpec::new(name, grid.clone());
    g.cycles = CycleBasis::new(vec![Cycle::point(0), Cycle::fundamental(&grid, 1.0)]);
    g.connections.push(("tangent".into(), sphere_line(&grid, 2.0)?));
    g.connections.push(("bundle".into(), sphere_line(&grid, charge)?));
    Ok(g)
}

/// Round `S²` carrying the charge-`k` monopole line bundle and the
/// holomorphic tangent bundle (charge 2).
pub fn sphere2_monopole(k: i64, n: usize) -> Result<GeometrySpec> {
    sphere(format!("sphere2_monopole({k})"), n, k as f64)
}

/// `CP¹` with bundle and tangent both the tangent line.
pub fn cp1_tangent(n: usize) -> Result<GeometrySpec> {
    sphere("cp1_tangent".into(), n, 2.0)
}

/// Radial profile of a disk filling: `A = −i flux ρ(r) dθ` with `ρ` rising
/// from 0 to 1 on `ramp`; `ρ ≡ 1` on the collar `r ≥ ramp.end`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskProfile {
    pub flux: f64,
    pub ramp: Ramp,
}

impl DiskProfile {
    pub fn standard(flux: f64) -> Self {
        Self { flux, ramp: Ramp::new(0.1, 0.8) }
    }
}

/// Disk `(r, θ) ∈ [0,1] × [0,2π)` filling the circle with flat holonomy
/// `flux`, using `profile` in the interior. `orientation = −1` gives the
/// mirror image.
pub fn disk(profile: DiskProfile, n_r: usize, n_theta: usize, orientation: f64) -> Result<GeometrySpec> {
    let grid = arc(vec![Axis::interval(n_r, 0.0, 1.0), Axis::periodic(n_theta, 0.0, 2.0 * PI)])?;
    let mut g = GeometrySpec::new(format!("disk2_flat({})", profile.flux), grid.clone());
    g.orientation = orientation;
    g.cycles = CycleBasis::new(vec![Cycle::point(0)]);
    let DiskProfile { flux, ramp } = profile;
    let pot = MatrixForm::scalar_fn(grid.clone(), 1, |x, m| {
        if m == 0b10 {
            C64::new(0.0, -flux * ramp.value(x[0]))
        } else {
            ZERO
        }
    });
    let f = MatrixForm::scalar_fn(grid.clone(), 2, |x, _| C64::new(0.0, -flux * ramp.derivative(x[0])));
    g.connections.push(("tangent".into(), Connection::trivial(grid.clone(), 1)));
    g.connections.push(("bundle".into(), Connection::with_curvature(pot, f)?));
    let mut edge = circle(n_theta, flux)?;
    edge.orientation = 1.0;
    g.boundary = Some(Boundary {
        components: vec![BoundaryComponent {
            geometry: edge,
            placement: Placement::Face { axis: 0, side: Side::Hi },
            orientation,
        }],
        collar_width: 1.0 - ramp.end,
    });
    Ok(g)
}

/// The flat circle bundle with holonomy `a` filled by the standard disk.
pub fn disk2_flat(a: f64, n: usize) -> Result<GeometrySpec> {
    disk(DiskProfile::standard(a), n, n, 1.0)
}

/// Cylinder `[0,1] × S¹` from the flat holonomy `a0` at `s = 0` to `a1` at
/// `s = 1`; its oriented boundary is `Σ(a1) − Σ(a0)`.
pub fn cylinder(a0: f64, a1: f64, n_s: usize, n_theta: usize) -> Result<GeometrySpec> {
    let grid = arc(vec![Axis::interval(n_s, 0.0, 1.0), Axis::periodic(n_theta, 0.0, 2.0 * PI)])?;
    let ramp = Ramp::new(0.2, 0.8);
    let mut g = GeometrySpec::new(format!("cylinder({a0},{a1})"), grid.clone());
    g.cycles = CycleBasis::new(vec![Cycle::point(0), Cycle::coordinate_slice(&grid, &[0, 0], &[1], 1.0)]);
    let pot = MatrixForm::scalar_fn(grid.clone(), 1, |x, m| {
        if m == 0b10 {
            C64::new(0.0, -(a0 + (a1 - a0) * ramp.value(x[0])))
        } else {
            ZERO
        }
    });
    let f = MatrixForm::scalar_fn(grid.clone(), 2, |x, _| C64::new(0.0, -(a1 - a0) * ramp.derivative(x[0])));
    g.connections.push(("tangent".into(), Connection::trivial(grid.clone(), 1)));
    g.connections.push(("bundle".into(), Connection::with_curvature(pot, f)?));
    g.boundary = Some(Boundary {
        components: vec![
            BoundaryComponent {
                geometry: circle(n_theta, a0)?,
                placement: Placement::Face { axis: 0, side: Side::Lo },
                orientation: -1.0,
            },
            BoundaryComponent {
                geometry: circle(n_theta, a1)?,
                placement: Placement::Face { axis: 0, side: Side::Hi },
                orientation: 1.0,
            },
        ],
        collar_width: 0.2,
    });
    Ok(g)
}

/// Euler-angle chart `g = e^{αi} e^{βj} e^{γi}` of the region
/// `β ∈ [π/16, 7π/16]` of `S³`, periodic in `α` and `γ`.
pub fn hopf_chart(n: usize) -> Result<GeometrySpec> {
    let grid = arc(vec![
        Axis::periodic(n, 0.0, 2.0 * PI),
        Axis::interval(n, PI / 16.0, 7.0 * PI / 16.0),
        Axis::periodic(n, 0.0, 2.0 * PI),
    ])?;
    let mut g = GeometrySpec::new("hopf_s3_over_s2", grid.clone());
    let mid = vec![0, n / 2, 0];
    g.cycles = CycleBasis::new(vec![
        Cycle::point(0),
        Cycle::coordinate_slice(&grid, &mid, &[0], 1.0),
        Cycle::coordinate_slice(&grid, &mid, &[2], 1.0),
        Cycle::coordinate_slice(&grid, &mid, &[0, 2], 1.0),
    ]);
    g.connections.push(("bundle".into(), Connection::trivial(grid, 1)));
    Ok(g)
}
