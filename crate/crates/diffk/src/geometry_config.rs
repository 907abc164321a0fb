//! Geometry and bundle configuration files.
//!
//! A config either names a catalog geometry or spells a chart out section by
//! section; the field reference lives in the repository README. Every loaded
//! geometry goes through [`GeometrySpec::validate`], so construction
//! invariants hold exactly as for the catalog.

use std::path::Path;
use std::sync::Arc;

use diffk_core::connections::Connection;
use diffk_core::forms::{mask_of, Axis, ChartGrid, Cycle, CycleBasis, MatrixForm, Side};
use diffk_core::geometry::profile::Ramp;
use diffk_core::geometry::{catalog, product, Boundary, BoundaryComponent, CatalogName, GeometrySpec, Placement};
use diffk_core::C64;
use serde::Deserialize;

use crate::Error;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub name: Option<String>,
    /// Catalog name such as `disk2_flat(0.25)`; excludes every chart section.
    pub catalog: Option<String>,
    /// Nodes per axis for catalog geometries.
    pub resolution: Option<usize>,
    #[serde(default = "one")]
    pub orientation: f64,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub cycles: CyclesConfig,
    pub boundary: Option<BoundaryConfig>,
    pub fibration: Option<FibrationConfig>,
    #[serde(default)]
    pub connection: std::collections::BTreeMap<String, ConnectionConfig>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub axes: Vec<AxisConfig>,
    /// Per-node multipliers of the quadrature weights, row-major.
    pub mask: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AxisKindConfig {
    Periodic,
    Interval,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub kind: AxisKindConfig,
    pub nodes: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclesConfig {
    /// Multi-indices of 0-cycles.
    #[serde(default)]
    pub points: Vec<Vec<usize>>,
    #[serde(default)]
    pub fundamental: bool,
    #[serde(default)]
    pub slices: Vec<SliceConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub index: Vec<usize>,
    pub free: Vec<usize>,
    #[serde(default = "one")]
    pub orientation: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub collar_width: f64,
    pub faces: Vec<FaceConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SideConfig {
    Lo,
    Hi,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceConfig {
    pub axis: usize,
    pub side: SideConfig,
    #[serde(default = "one")]
    pub orientation: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationConfig {
    pub base: Box<GeometryConfig>,
    pub fiber: Box<GeometryConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionConfig {
    pub rank: usize,
    #[serde(default)]
    pub potential: Vec<ComponentConfig>,
    #[serde(default)]
    pub curvature: Vec<ComponentConfig>,
}

/// One coefficient `dx_{axes}` of a matrix-valued form.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub axes: Vec<usize>,
    /// `rank²` entries (constant) or `nodes · rank²` (sampled), row-major.
    #[serde(default)]
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
    pub profile: Option<ProfileConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Ramp,
    RampSlope,
    Sin,
    Cos,
}

/// Scalar factor depending on one coordinate.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    pub axis: usize,
    #[serde(default)]
    pub start: f64,
    #[serde(default = "one")]
    pub end: f64,
    #[serde(default = "one")]
    pub frequency: f64,
}

fn field(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Field { path: path.into(), message: message.into() }
}

/// Parses and validates a geometry config.
pub fn load_geometry(text: &str) -> Result<GeometrySpec, Error> {
    let config: GeometryConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    build_geometry(&config, "", None)
}

/// [`load_geometry`] on a file; `resolution` is the fallback for catalog
/// entries that set none.
pub fn load_geometry_file(path: &Path, resolution: Option<usize>) -> Result<GeometrySpec, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let parsed = toml::from_str::<GeometryConfig>(&text).map_err(|e| Error::Parse(e.to_string()));
    parsed.and_then(|c| build_geometry(&c, "", resolution)).map_err(|e| e.in_file(path))
}

/// Builds the geometry described by `config`; `prefix` names the enclosing
/// table in diagnostics and `resolution` is the fallback catalog resolution.
pub fn build_geometry(config: &GeometryConfig, prefix: &str, resolution: Option<usize>) -> Result<GeometrySpec, Error> {
    let at = |f: &str| if prefix.is_empty() { f.to_string() } else { format!("{prefix}.{f}") };
    if config.orientation != 1.0 && config.orientation != -1.0 {
        return Err(field(at("orientation"), "must be 1 or -1"));
    }
    let has_chart = config.grid.is_some() || config.boundary.is_some() || !config.connection.is_empty();
    let g = match (&config.catalog, &config.fibration) {
        (Some(_), Some(_)) => return Err(field(at("fibration"), "a catalog geometry already has its structure")),
        (Some(_), None) if has_chart => return Err(field(at("catalog"), "catalog excludes [grid], [boundary] and [connection]")),
        (Some(name), None) => {
            let parsed: CatalogName = name.parse().map_err(|e| field(at("catalog"), format!("{e}")))?;
            let mut g = catalog(&parsed, config.resolution.or(resolution))?;
            g.orientation *= config.orientation;
            g
        }
        (None, Some(_)) if has_chart => return Err(field(at("fibration"), "a fibration is the product of its base and fibre")),
        (None, Some(f)) => {
            let base = build_geometry(&f.base, &at("fibration.base"), config.resolution.or(resolution))?;
            let fiber = build_geometry(&f.fiber, &at("fibration.fiber"), config.resolution.or(resolution))?;
            product(&base, &fiber)?
        }
        (None, None) => build_chart(config, &at)?,
    };
    let mut g = g;
    if let Some(name) = &config.name {
        g.name = name.clone();
    }
    g.validate()?;
    Ok(g)
}

fn build_chart(config: &GeometryConfig, at: &dyn Fn(&str) -> String) -> Result<GeometrySpec, Error> {
    if config.resolution.is_some() {
        return Err(field(at("resolution"), "only applies to catalog geometries"));
    }
    let grid_config = config.grid.as_ref().ok_or_else(|| field(at("grid"), "missing: give [grid] or `catalog`"))?;
    if grid_config.axes.is_empty() || grid_config.axes.len() > 8 {
        return Err(field(at("grid.axes"), "between 1 and 8 axes"));
    }
    let axes = grid_config
        .axes
        .iter()
        .map(|a| match a.kind {
            AxisKindConfig::Periodic => Axis::periodic(a.nodes, a.lo, a.hi),
            AxisKindConfig::Interval => Axis::interval(a.nodes, a.lo, a.hi),
        })
        .collect();
    let mut grid = ChartGrid::new(axes)?;
    if let Some(mask) = &grid_config.mask {
        grid = grid.with_mask(mask.clone())?;
    }
    let grid = Arc::new(grid);
    let name = config.name.clone().unwrap_or_else(|| "chart".into());
    let mut g = GeometrySpec::new(name.clone(), grid.clone());
    g.orientation = config.orientation;
    g.cycles = build_cycles(&config.cycles, &grid, config.orientation, at)?;
    for (cname, c) in &config.connection {
        let conn = build_connection(c, &grid, &at(&format!("connection.{cname}")))?;
        g.connections.push((cname.clone(), conn));
    }
    if let Some(b) = &config.boundary {
        g.boundary = Some(build_boundary(b, &g, &name, at)?);
    }
    Ok(g)
}

fn build_cycles(c: &CyclesConfig, grid: &ChartGrid, orientation: f64, at: &dyn Fn(&str) -> String) -> Result<CycleBasis, Error> {
    let dim = grid.dim();
    let check_index = |index: &[usize], path: String| -> Result<(), Error> {
        if index.len() != dim || index.iter().zip(grid.axes()).any(|(&i, a)| i >= a.nodes) {
            return Err(field(path, format!("index {index:?} is not a node of the {dim}-dimensional grid")));
        }
        Ok(())
    };
    let mut cycles = Vec::new();
    for (i, p) in c.points.iter().enumerate() {
        check_index(p, at(&format!("cycles.points[{i}]")))?;
        cycles.push(Cycle::point(grid.node_of(p)));
    }
    for (i, s) in c.slices.iter().enumerate() {
        let path = at(&format!("cycles.slices[{i}]"));
        check_index(&s.index, path.clone())?;
        if s.free.is_empty() || s.free.windows(2).any(|w| w[0] >= w[1]) || s.free.iter().any(|&k| k >= dim) {
            return Err(field(format!("{path}.free"), "strictly increasing axis indices below the dimension"));
        }
        if let Some(&k) = s.free.iter().find(|&&k| !grid.axis(k).is_periodic()) {
            return Err(field(format!("{path}.free"), format!("axis {k} is an interval; slices must be closed")));
        }
        cycles.push(Cycle::coordinate_slice(grid, &s.index, &s.free, s.orientation));
    }
    if c.fundamental {
        cycles.push(Cycle::fundamental(grid, orientation));
    }
    cycles.sort_by_key(|c| c.dim);
    Ok(CycleBasis::new(cycles))
}

fn build_boundary(b: &BoundaryConfig, g: &GeometrySpec, name: &str, at: &dyn Fn(&str) -> String) -> Result<Boundary, Error> {
    if !(b.collar_width > 0.0 && b.collar_width.is_finite()) {
        return Err(field(at("boundary.collar_width"), "must be positive"));
    }
    let mut components = Vec::new();
    for (i, f) in b.faces.iter().enumerate() {
        let path = at(&format!("boundary.faces[{i}]"));
        if f.axis >= g.dim() || g.grid.axis(f.axis).is_periodic() {
            return Err(field(format!("{path}.axis"), "must name an interval axis"));
        }
        if f.orientation != 1.0 && f.orientation != -1.0 {
            return Err(field(format!("{path}.orientation"), "must be 1 or -1"));
        }
        let side = match f.side {
            SideConfig::Lo => Side::Lo,
            SideConfig::Hi => Side::Hi,
        };
        let face_grid = Arc::new(g.grid.without_axis(f.axis)?);
        let mut face = GeometrySpec::new(format!("{name}.boundary{i}"), face_grid.clone());
        face.cycles = CycleBasis::new(vec![Cycle::point(0), Cycle::fundamental(&face_grid, 1.0)]);
        let mut comp = BoundaryComponent { geometry: face, placement: Placement::Face { axis: f.axis, side }, orientation: f.orientation };
        for (cname, _) in &g.connections {
            let restricted = g.restrict_connection(cname, &comp)?;
            comp.geometry.connections.push((cname.clone(), restricted));
        }
        components.push(comp);
    }
    Ok(Boundary { components, collar_width: b.collar_width })
}

fn build_connection(c: &ConnectionConfig, grid: &Arc<ChartGrid>, path: &str) -> Result<Connection, Error> {
    if c.rank == 0 {
        return Err(field(format!("{path}.rank"), "must be positive"));
    }
    let potential = build_form(&c.potential, grid, 1, c.rank, &format!("{path}.potential"))?;
    let curvature = build_form(&c.curvature, grid, 2, c.rank, &format!("{path}.curvature"))?;
    Ok(match (potential, curvature) {
        (None, None) => Connection::trivial(grid.clone(), c.rank),
        (Some(a), None) => Connection::from_potential(a)?,
        (Some(a), Some(f)) => Connection::with_curvature(a, f)?,
        (None, Some(f)) => Connection::curvature_only(f)?,
    })
}

fn build_form(
    parts: &[ComponentConfig],
    grid: &Arc<ChartGrid>,
    degree: usize,
    rank: usize,
    path: &str,
) -> Result<Option<MatrixForm>, Error> {
    if parts.is_empty() {
        return Ok(None);
    }
    let mut form = MatrixForm::zeros(grid.clone(), degree, rank);
    let width = rank * rank;
    let nodes = grid.len();
    for (i, p) in parts.iter().enumerate() {
        let at = format!("{path}[{i}]");
        if p.axes.len() != degree || p.axes.windows(2).any(|w| w[0] >= w[1]) || p.axes.iter().any(|&k| k >= grid.dim()) {
            return Err(field(format!("{at}.axes"), format!("{degree} strictly increasing axis indices below {}", grid.dim())));
        }
        let len = p.re.len().max(p.im.len());
        for (part, name) in [(&p.re, "re"), (&p.im, "im")] {
            if !part.is_empty() && part.len() != len {
                return Err(field(format!("{at}.{name}"), "re and im must have the same length"));
            }
        }
        if len != width && len != nodes * width {
            return Err(field(at.clone(), format!("{len} entries; expected {width} or {}", nodes * width)));
        }
        let profile = p.profile.as_ref().map(|pr| profile_fn(pr, grid.dim(), &format!("{at}.profile"))).transpose()?;
        let target = form.component_mut(mask_of(&p.axes)).expect("degree matches");
        for node in 0..nodes {
            let factor = profile.as_ref().map_or(1.0, |f| (f.eval)(grid.coord(node, f.axis)));
            for e in 0..width {
                let src = if len == width { e } else { node * width + e };
                let z = C64::new(p.re.get(src).copied().unwrap_or(0.0), p.im.get(src).copied().unwrap_or(0.0));
                target[node * width + e] += z * factor;
            }
        }
    }
    Ok(Some(form))
}

struct Profile {
    axis: usize,
    eval: Box<dyn Fn(f64) -> f64>,
}

fn profile_fn(p: &ProfileConfig, dim: usize, path: &str) -> Result<Profile, Error> {
    if p.axis >= dim {
        return Err(field(format!("{path}.axis"), format!("axis {} on a {dim}-dimensional grid", p.axis)));
    }
    let eval: Box<dyn Fn(f64) -> f64> = match p.kind {
        ProfileKind::Ramp | ProfileKind::RampSlope => {
            if !(p.end > p.start) {
                return Err(field(path, "ramp needs end > start"));
            }
            let ramp = Ramp::new(p.start, p.end);
            if p.kind == ProfileKind::Ramp {
                Box::new(move |x| ramp.value(x))
            } else {
                Box::new(move |x| ramp.derivative(x))
            }
        }
        ProfileKind::Sin => {
            let w = p.frequency;
            Box::new(move |x: f64| (w * x).sin())
        }
        ProfileKind::Cos => {
            let w = p.frequency;
            Box::new(move |x: f64| (w * x).cos())
        }
    };
    Ok(Profile { axis: p.axis, eval })
}
