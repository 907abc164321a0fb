use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::connections::{curvature, Connection};
use crate::forms::{
    exterior_d, integrate, pullback_first, pullback_second, restrict_to_face, ChartGrid, Cycle, CycleBasis,
    MatrixForm, Side,
};
use crate::{Error, Result, C64};

/// Where a boundary component sits inside its parent chart.
#[derive(Clone, Debug, PartialEq)]
pub enum Placement {
    /// The face `axis = lo | hi` of an interval axis.
    Face { axis: usize, side: Side },
    /// A circle in the plane of axes 0 and 1 of a masked planar chart.
    Circle { center: [f64; 2], radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryComponent {
    pub geometry: GeometrySpec,
    pub placement: Placement,
    /// `+1` when the component's own orientation is the induced
    /// (outward-normal-first) one, `−1` otherwise.
    pub orientation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Boundary {
    pub components: Vec<BoundaryComponent>,
    /// Width of the normal collar on which all connections are product-like.
    pub collar_width: f64,
}

/// Product fibration `base × fiber → base`; the fibre axes are the trailing
/// axes of the total chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Fibration {
    pub base: GeometrySpec,
    pub fiber: GeometrySpec,
}

/// A chart grid with orientation, homology generators, optional boundary and
/// fibration structure, and named connections.
///
/// Catalog geometries name their tangent connection `tangent` and their
/// coefficient bundle `bundle`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySpec {
    pub name: String,
    pub grid: Arc<ChartGrid>,
    pub orientation: f64,
    pub cycles: CycleBasis,
    pub boundary: Option<Boundary>,
    pub fibration: Option<Box<Fibration>>,
    pub connections: Vec<(String, Connection)>,
}

impl GeometrySpec {
    pub fn new(name: impl Into<String>, grid: Arc<ChartGrid>) -> Self {
        Self {
            name: name.into(),
            grid,
            orientation: 1.0,
            cycles: CycleBasis::default(),
            boundary: None,
            fibration: None,
            connections: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.as_ref().is_none_or(|b| b.components.is_empty()) && self.grid.mask().is_none()
    }

    pub fn connection(&self, name: &str) -> Result<&Connection> {
        self.connections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::InvalidParameter(format!("geometry `{}` has no connection `{name}`", self.name)))
    }

    pub fn tangent(&self) -> Result<&Connection> {
        self.connection("tangent")
    }

    pub fn bundle(&self) -> Result<&Connection> {
        self.connection("bundle")
    }

    /// Inserts or replaces a named connection.
    pub fn set_connection(&mut self, name: impl Into<String>, c: Connection) -> Result<()> {
        if !c.grid().same_nodes(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let c = c.rebind(self.grid.clone())?;
        let name = name.into();
        match self.connections.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = c,
            None => self.connections.push((name, c)),
        }
        Ok(())
    }

    /// Oriented integral of a scalar top-degree form.
    pub fn integrate(&self, form: &MatrixForm) -> Result<C64> {
        Ok(integrate(form)? * self.orientation)
    }

    /// Largest period of an exact test form `dη` over the cycle basis,
    /// relative to the largest coefficient of `dη`.
    pub fn exactness_calibration(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let max_dim = self.cycles.cycles.iter().map(|c| c.dim).max().unwrap_or(0);
        for k in 1..=max_dim {
            if self.cycles.of_dim(k).next().is_none() {
                continue;
            }
            let eta = test_form(&self.grid, k - 1);
            let d_eta = exterior_d(&eta)?;
            let scale = d_eta.max_norm().max(1.0);
            worst = worst.max(self.cycles.max_period(&d_eta)? / scale);
        }
        Ok(worst)
    }

    /// Checks the construction invariants: weights, orientation sign, cycle
    /// calibration, and collar product-likeness of every connection.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate_weights()?;
        if self.orientation != 1.0 && self.orientation != -1.0 {
            return Err(Error::InvariantViolation { check: "orientation is ±1", detail: format!("{}", self.orientation) });
        }
        let calibration = self.exactness_calibration()?;
        if calibration > 1e-8 {
            return Err(Error::InvariantViolation {
                check: "exact forms have vanishing periods",
                detail: format!("{}: relative period {calibration:e}", self.name),
            });
        }
        for (name, c) in &self.connections {
            if !c.grid().same_nodes(&self.grid) {
                return Err(Error::InvariantViolation {
                    check: "connections live on the geometry grid",
                    detail: name.clone(),
                });
            }
        }
        if let Some(b) = &self.boundary {
            for comp in &b.components {
                self.check_collar(comp, b.collar_width)?;
            }
        }
        Ok(())
    }

    fn check_collar(&self, comp: &BoundaryComponent, width: f64) -> Result<()> {
        for (name, c) in &self.connections {
            let residual = match &comp.placement {
                Placement::Face { axis, side } => face_collar_residual(&self.grid, c, *axis, *side, width)?,
                Placement::Circle { center, radius } => circle_collar_curvature(&self.grid, c, *center, *radius, width)?,
            };
            if residual > 1e-10 {
                return Err(Error::InvariantViolation {
                    check: "connections are product-like on the collar",
                    detail: format!("{} connection `{name}`: residual {residual:e}", self.name),
                });
            }
        }
        Ok(())
    }

    /// Restriction of a named connection to a face boundary component.
    pub fn restrict_connection(&self, name: &str, comp: &BoundaryComponent) -> Result<Connection> {
        let Placement::Face { axis, side } = comp.placement else {
            return Err(Error::InvalidParameter("only face components restrict on the grid".into()));
        };
        let face_grid = comp.geometry.grid.clone();
        self.connection(name)?.map_forms(|f| restrict_to_face(f, &face_grid, axis, side))
    }
}

/// Deviation from product form on a face collar: coefficients must not vary
/// along the normal and normal components must vanish.
fn face_collar_residual(grid: &ChartGrid, c: &Connection, axis: usize, side: Side, width: f64) -> Result<f64> {
    let a = &grid.axes()[axis];
    let h = a.spacing();
    let depth = ((width / h).floor() as usize).min(a.nodes - 1);
    let mut worst: f64 = 0.0;
    let forms = [c.potential().ok().cloned(), Some(curvature(c)?)];
    for form in forms.iter().flatten() {
        let w = form.rank() * form.rank();
        for &m in form.component_masks() {
            let field = form.component(m).expect("own component");
            for node in 0..grid.len() {
                let i = grid.index_along(node, axis);
                let from_face = match side {
                    Side::Lo => i,
                    Side::Hi => a.nodes - 1 - i,
                };
                if from_face > depth {
                    continue;
                }
                let face_i = match side {
                    Side::Lo => 0,
                    Side::Hi => a.nodes - 1,
                };
                let face_node = node - i * grid.stride(axis) + face_i * grid.stride(axis);
                for e in 0..w {
                    let v = field[node * w + e];
                    let d = if m & (1 << axis) != 0 { v.norm() } else { (v - field[face_node * w + e]).norm() };
                    worst = worst.max(d);
                }
            }
        }
    }
    Ok(worst)
}

/// Max curvature on the annulus of width `width` outside (or inside) a
/// boundary circle; flat collars are product-like up to gauge.
fn circle_collar_curvature(grid: &ChartGrid, c: &Connection, center: [f64; 2], radius: f64, width: f64) -> Result<f64> {
    let f = curvature(c)?;
    let mut worst: f64 = 0.0;
    let w = f.rank() * f.rank();
    for node in 0..grid.len() {
        let (x, y) = (grid.coord(node, 0) - center[0], grid.coord(node, 1) - center[1]);
        let rho = (x * x + y * y).sqrt();
        if (rho - radius).abs() > width || grid.quad_weight(node) == 0.0 {
            continue;
        }
        for &m in f.component_masks() {
            let field = f.component(m).expect("own component");
            for e in 0..w {
                worst = worst.max(field[node * w + e].norm());
            }
        }
    }
    Ok(worst)
}

/// Smooth `(degree)`-form whose coefficient for `dx_m` vanishes at both ends
/// of every interval axis outside `m`, so its differential integrates to zero
/// over closed cycles.
pub(crate) fn test_form(grid: &Arc<ChartGrid>, degree: usize) -> MatrixForm {
    let axes: Vec<_> = grid.axes().to_vec();
    MatrixForm::scalar_fn(grid.clone(), degree, |x, m| {
        let mut v = 1.0;
        for (k, a) in axes.iter().enumerate() {
            let s = (x[k] - a.lo) / a.length();
            let phase = 0.37 * (k as f64 + 1.0) + 0.11 * m as f64;
            v *= if a.is_periodic() {
                1.0 + 0.5 * (2.0 * PI * s + phase).cos()
            } else if m & (1 << k) == 0 {
                (PI * s).sin() * (1.0 + 0.3 * s + phase)
            } else {
                1.0 + 0.7 * s * s + phase
            };
        }
        C64::new(v, 0.1 * v)
    })
}

/// Cartesian product `g1 × g2` with the product fibration over `g1`.
///
/// Cycles are cross products, tangent connections add as direct sums,
/// coefficient bundles as external tensor products, and every factor
/// connection is kept as `base.<name>` / `fiber.<name>`.
pub fn product(g1: &GeometrySpec, g2: &GeometrySpec) -> Result<GeometrySpec> {
    let grid = Arc::new(g1.grid.product(&g2.grid)?);
    let (d1, len2) = (g1.dim(), g2.grid.len());
    let mut out = GeometrySpec::new(format!("product({},{})", g1.name, g2.name), grid.clone());
    out.orientation = g1.orientation * g2.orientation;
    let mut cycles = Vec::new();
    for a in &g1.cycles.cycles {
        for b in &g2.cycles.cycles {
            cycles.push(Cycle::cross(a, d1, b, len2));
        }
    }
    out.cycles = CycleBasis::new(cycles);
    let lift1 = |c: &Connection| c.map_forms(|f| pullback_first(f, &grid, &g2.grid));
    let lift2 = |c: &Connection| c.map_forms(|f| pullback_second(f, &grid, &g1.grid));
    for (name, c) in &g1.connections {
        out.connections.push((format!("base.{name}"), lift1(c)?));
    }
    for (name, c) in &g2.connections {
        out.connections.push((format!("fiber.{name}"), lift2(c)?));
    }
    if let (Ok(t1), Ok(t2)) = (g1.tangent(), g2.tangent()) {
        out.connections.push(("tangent".into(), lift1(t1)?.direct_sum(&lift2(t2)?)?));
    }
    if let (Ok(b1), Ok(b2)) = (g1.bundle(), g2.bundle()) {
        out.connections.push(("bundle".into(), lift1(b1)?.tensor(&lift2(b2)?)?));
    }
    let mut components = Vec::new();
    let mut collar = f64::INFINITY;
    if let Some(b) = &g1.boundary {
        collar = collar.min(b.collar_width);
        for comp in &b.components {
            components.push(BoundaryComponent {
                geometry: product(&comp.geometry, g2)?,
                placement: comp.placement.clone(),
                orientation: comp.orientation,
            });
        }
    }
    if let Some(b) = &g2.boundary {
        collar = collar.min(b.collar_width);
        let sign = if d1 % 2 == 0 { 1.0 } else { -1.0 };
        for comp in &b.components {
            let placement = match &comp.placement {
                Placement::Face { axis, side } => Placement::Face { axis: axis + d1, side: *side },
                Placement::Circle { .. } => {
                    return Err(Error::InvalidParameter("circle boundaries are only supported on the first factor".into()))
                }
            };
            components.push(BoundaryComponent {
                geometry: product(g1, &comp.geometry)?,
                placement,
                orientation: sign * comp.orientation,
            });
        }
    }
    if !components.is_empty() {
        out.boundary = Some(Boundary { components, collar_width: collar });
    }
    out.fibration = Some(Box::new(Fibration { base: g1.clone(), fiber: g2.clone() }));
    Ok(out)
}
