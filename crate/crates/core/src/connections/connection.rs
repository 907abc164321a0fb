use alloc::format;
use alloc::sync::Arc;

use crate::forms::{exterior_d, wedge, ChartGrid, MatrixForm};
use crate::{Error, Result, C64};

/// A connection on a trivialised rank-`n` bundle over a chart.
///
/// Either the potential `A` is known, or only the curvature is (monopole
/// bundles without a global gauge); at least one of the two is present.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    rank: usize,
    grid: Arc<ChartGrid>,
    potential: Option<MatrixForm>,
    curvature: Option<MatrixForm>,
}

impl Connection {
    pub fn from_potential(potential: MatrixForm) -> Result<Self> {
        if potential.degree() != 1 {
            return Err(Error::DegreeMismatch { expected: 1, found: potential.degree() });
        }
        Ok(Self { rank: potential.rank(), grid: potential.grid().clone(), potential: Some(potential), curvature: None })
    }

    /// Connection with a known curvature, validated against `dA + A ∧ A`.
    ///
    /// The check is relative: the max-norm residual over nodes of positive
    /// quadrature weight must stay below `10 h² max(1, |F|_max)` with `h` the
    /// largest grid spacing.
    pub fn with_curvature(potential: MatrixForm, curvature: MatrixForm) -> Result<Self> {
        let mut c = Self::from_potential(potential)?;
        c.check_curvature_shape(&curvature)?;
        let computed = structure_curvature(c.potential.as_ref().expect("just set"))?;
        let residual = weighted_distance(&computed, &curvature)?;
        let h = c.grid.max_spacing();
        let bound = 10.0 * h * h * curvature.max_norm().max(1.0);
        if residual > bound {
            return Err(Error::InvariantViolation {
                check: "curvature matches dA + A^A",
                detail: format!("residual {residual:e} exceeds {bound:e}"),
            });
        }
        c.curvature = Some(curvature);
        Ok(c)
    }

    /// Connection known only through its curvature.
    pub fn curvature_only(curvature: MatrixForm) -> Result<Self> {
        if curvature.degree() != 2 {
            return Err(Error::DegreeMismatch { expected: 2, found: curvature.degree() });
        }
        Ok(Self { rank: curvature.rank(), grid: curvature.grid().clone(), potential: None, curvature: Some(curvature) })
    }

    /// The product connection `d` on the trivial rank-`n` bundle.
    pub fn trivial(grid: Arc<ChartGrid>, rank: usize) -> Self {
        let potential = MatrixForm::zeros(grid.clone(), 1, rank);
        let curvature = MatrixForm::zeros(grid.clone(), 2, rank);
        Self { rank, grid, potential: Some(potential), curvature: Some(curvature) }
    }

    fn check_curvature_shape(&self, f: &MatrixForm) -> Result<()> {
        if f.degree() != 2 {
            return Err(Error::DegreeMismatch { expected: 2, found: f.degree() });
        }
        if f.rank() != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: f.rank() });
        }
        if !f.grid().same_nodes(&self.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn potential(&self) -> Result<&MatrixForm> {
        self.potential.as_ref().ok_or(Error::MissingPotential)
    }

    pub fn analytic_curvature(&self) -> Option<&MatrixForm> {
        self.curvature.as_ref()
    }

    /// `dA`: from the analytic curvature as `F − A ∧ A` when present,
    /// otherwise by differentiating the potential on the grid.
    pub fn d_potential(&self) -> Result<MatrixForm> {
        let a = self.potential()?;
        match &self.curvature {
            Some(f) => f.sub(&wedge(a, a)?),
            None => exterior_d(a),
        }
    }

    /// Block-diagonal direct sum `∇ ⊕ ∇'`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let potential = match (&self.potential, &other.potential) {
            (Some(a), Some(b)) => Some(a.direct_sum(b)?),
            _ => None,
        };
        let curvature = match (&self.curvature, &other.curvature) {
            (Some(f), Some(g)) => Some(f.direct_sum(g)?),
            _ if potential.is_none() => Some(curvature(self)?.direct_sum(&curvature(other)?)?),
            _ => None,
        };
        Ok(Self { rank: self.rank + other.rank, grid: self.grid.clone(), potential, curvature })
    }

    /// Tensor-product connection `∇ ⊗ 1 + 1 ⊗ ∇'`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let potential = match (&self.potential, &other.potential) {
            (Some(a), Some(b)) => Some(a.tensor_sum(b)?),
            _ => None,
        };
        let curvature = if self.curvature.is_some() || other.curvature.is_some() || potential.is_none() {
            Some(curvature(self)?.tensor_sum(&curvature(other)?)?)
        } else {
            None
        };
        Ok(Self { rank: self.rank * other.rank, grid: self.grid.clone(), potential, curvature })
    }

    /// Abelian gauge shift `A + df · 1` by a scalar 0-form `f`.
    ///
    /// The analytic curvature, if any, is kept: it is gauge invariant.
    pub fn gauge_shift(&self, f: &MatrixForm) -> Result<Self> {
        if f.degree() != 0 || f.rank() != 1 {
            return Err(Error::InvalidParameter("gauge shift needs a scalar 0-form".into()));
        }
        let df = exterior_d(f)?.scalar_to_rank(self.rank)?;
        let a = self.potential()?.add(&df)?;
        Ok(Self { potential: Some(a), ..self.clone() })
    }

    /// Same connection with every form rebound to `grid`.
    pub fn rebind(&self, grid: Arc<ChartGrid>) -> Result<Self> {
        Ok(Self {
            rank: self.rank,
            potential: self.potential.as_ref().map(|a| a.rebind(grid.clone())).transpose()?,
            curvature: self.curvature.as_ref().map(|f| f.rebind(grid.clone())).transpose()?,
            grid,
        })
    }

    /// Applies `map` to every form of the connection (pullbacks, restrictions).
    pub fn map_forms(&self, mut map: impl FnMut(&MatrixForm) -> Result<MatrixForm>) -> Result<Self> {
        let potential = self.potential.as_ref().map(&mut map).transpose()?;
        let curvature = self.curvature.as_ref().map(&mut map).transpose()?;
        let grid = potential.as_ref().or(curvature.as_ref()).expect("one form present").grid().clone();
        Ok(Self { rank: self.rank, grid, potential, curvature })
    }
}

/// Max-norm distance restricted to nodes of positive quadrature weight.
fn weighted_distance(a: &MatrixForm, b: &MatrixForm) -> Result<f64> {
    let grid = a.grid();
    if grid.mask().is_none() {
        return a.distance(b);
    }
    let w = a.rank() * a.rank();
    let mut worst: f64 = 0.0;
    for &m in a.component_masks() {
        let (x, y) = (a.component(m).expect("own"), b.component(m).ok_or(Error::GridMismatch)?);
        for node in (0..grid.len()).filter(|&n| grid.quad_weight(n) > 0.0) {
            for e in 0..w {
                worst = worst.max((x[node * w + e] - y[node * w + e]).norm());
            }
        }
    }
    Ok(worst)
}

/// `dA + A ∧ A` computed on the grid.
pub fn structure_curvature(a: &MatrixForm) -> Result<MatrixForm> {
    exterior_d(a)?.add(&wedge(a, a)?)
}

/// Curvature 2-form: the analytic one when present, else `dA + A ∧ A`.
pub fn curvature(c: &Connection) -> Result<MatrixForm> {
    match &c.curvature {
        Some(f) => Ok(f.clone()),
        None => structure_curvature(c.potential()?),
    }
}

/// Max norm of the Bianchi residual `dR − (R ∧ A − A ∧ R)`.
pub fn bianchi_residual(c: &Connection) -> Result<f64> {
    let a = c.potential()?;
    let r = curvature(c)?;
    let rhs = wedge(&r, a)?.sub(&wedge(a, &r)?)?;
    exterior_d(&r)?.distance(&rhs)
}

/// Abelian potential `value · dx_axis` (rank 1, constant coefficient).
pub fn constant_abelian(grid: Arc<ChartGrid>, axis: usize, value: C64) -> Result<Connection> {
    let mask = 1u32 << axis;
    let a = MatrixForm::scalar_fn(grid, 1, |_, m| if m == mask { value } else { C64::new(0.0, 0.0) });
    let f = MatrixForm::zeros(a.grid().clone(), 2, 1);
    Connection::with_curvature(a, f)
}
