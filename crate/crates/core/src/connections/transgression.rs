use alloc::vec;
use alloc::vec::Vec;

use super::connection::{curvature, Connection};
use crate::forms::{exterior_d, trace, wedge, CycleBasis, MatrixForm};
use crate::quadrature::gauss_legendre_unit;
use crate::{Error, Result, C64, CURVATURE_NORMALIZATION};

const ONE: C64 = C64::new(1.0, 0.0);

/// A path of connections `A^t = (1−t) A⁰ + t A¹ + t(1−t) C` between two
/// endpoints with known potentials; `C = 0` is the straight line.
#[derive(Clone, Debug)]
pub struct ConnectionCurve {
    a0: MatrixForm,
    a1: MatrixForm,
    da0: MatrixForm,
    da1: MatrixForm,
    bend: Option<(MatrixForm, MatrixForm)>,
}

impl ConnectionCurve {
    pub fn linear(start: &Connection, end: &Connection) -> Result<Self> {
        if start.rank() != end.rank() {
            return Err(Error::RankMismatch { left: start.rank(), right: end.rank() });
        }
        if !start.grid().same_nodes(end.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            a0: start.potential()?.clone(),
            a1: end.potential()?.clone(),
            da0: start.d_potential()?,
            da1: end.d_potential()?,
            bend: None,
        })
    }

    /// Quadratic curve through the same endpoints, bent by the 1-form `c`.
    pub fn bent(start: &Connection, end: &Connection, c: MatrixForm) -> Result<Self> {
        let mut curve = Self::linear(start, end)?;
        if c.degree() != 1 || c.rank() != start.rank() {
            return Err(Error::InvalidParameter("bend must be a 1-form of the bundle rank".into()));
        }
        let dc = exterior_d(&c)?;
        curve.bend = Some((c, dc));
        Ok(curve)
    }

    pub fn rank(&self) -> usize {
        self.a0.rank()
    }

    pub fn dim(&self) -> usize {
        self.a0.grid().dim()
    }

    fn is_linear(&self) -> bool {
        self.bend.is_none()
    }

    pub fn potential_at(&self, t: f64) -> Result<MatrixForm> {
        let mut a = self.a0.combine(C64::new(1.0 - t, 0.0), &self.a1, C64::new(t, 0.0))?;
        if let Some((c, _)) = &self.bend {
            a.add_scaled(C64::new(t * (1.0 - t), 0.0), c)?;
        }
        Ok(a)
    }

    /// Velocity `B^t = dA^t / dt`.
    pub fn velocity_at(&self, t: f64) -> Result<MatrixForm> {
        let mut b = self.a1.sub(&self.a0)?;
        if let Some((c, _)) = &self.bend {
            b.add_scaled(C64::new(1.0 - 2.0 * t, 0.0), c)?;
        }
        Ok(b)
    }

    /// `R^t = dA^t + A^t ∧ A^t` with `dA^t` interpolated from the endpoints,
    /// so `R⁰` and `R¹` are the endpoint curvatures exactly.
    pub fn curvature_at(&self, t: f64) -> Result<MatrixForm> {
        let a = self.potential_at(t)?;
        let mut da = self.da0.combine(C64::new(1.0 - t, 0.0), &self.da1, C64::new(t, 0.0))?;
        if let Some((_, dc)) = &self.bend {
            da.add_scaled(C64::new(t * (1.0 - t), 0.0), dc)?;
        }
        da.add(&wedge(&a, &a)?)
    }
}

/// An invariant polynomial `P_{l1} ⋯ P_{lk}` in the trace powers
/// `P_l(M) = tr M^l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPolynomial {
    pub powers: Vec<usize>,
}

impl InvariantPolynomial {
    pub fn trace_power(l: usize) -> Self {
        Self { powers: vec![l] }
    }

    pub fn product(powers: &[usize]) -> Self {
        Self { powers: powers.to_vec() }
    }

    pub fn weight(&self) -> usize {
        self.powers.iter().sum()
    }

    /// `P(R, …, R)`, unnormalised.
    pub fn evaluate(&self, r: &MatrixForm) -> Result<MatrixForm> {
        let grid = r.grid().clone();
        let mut out = MatrixForm::constant(grid.clone(), ONE);
        for &l in &self.powers {
            out = wedge(&out, &trace_power_form(r, l)?)?;
        }
        Ok(out)
    }
}

fn matrix_power(r: &MatrixForm, k: usize) -> Result<MatrixForm> {
    if k == 0 {
        return Ok(MatrixForm::identity(r.grid().clone(), r.rank()));
    }
    let mut p = r.clone();
    for _ in 1..k {
        p = wedge(&p, r)?;
    }
    Ok(p)
}

fn trace_power_form(r: &MatrixForm, l: usize) -> Result<MatrixForm> {
    Ok(trace(&matrix_power(r, l)?))
}

/// Integrand of the transgression at one `t`:
/// `Σ_i l_i tr(B R^{l_i − 1}) ∧ Π_{j≠i} P_{l_j}(R)`.
fn transgression_integrand(b: &MatrixForm, r: &MatrixForm, poly: &InvariantPolynomial) -> Result<MatrixForm> {
    let grid = r.grid().clone();
    let degree = 2 * poly.weight() - 1;
    let mut out = MatrixForm::zeros(grid.clone(), degree, 1);
    if degree > grid.dim() {
        return Ok(out);
    }
    for (i, &li) in poly.powers.iter().enumerate() {
        let mut term = trace(&wedge(b, &matrix_power(r, li - 1)?)?);
        for (j, &lj) in poly.powers.iter().enumerate() {
            if j != i {
                term = wedge(&term, &trace_power_form(r, lj)?)?;
            }
        }
        out.add_scaled(C64::new(li as f64, 0.0), &term)?;
    }
    Ok(out)
}

/// Transgression form of a general invariant polynomial along `curve`,
/// unnormalised. Gauss–Legendre in `t` is sized so the `t`-integral of the
/// polynomial integrand is exact.
pub fn transgression_poly(curve: &ConnectionCurve, poly: &InvariantPolynomial) -> Result<MatrixForm> {
    let weight = poly.weight();
    assert!(weight >= 1, "polynomial of positive weight");
    let t_degree = if curve.is_linear() { 2 * weight - 1 } else { 4 * weight - 3 };
    let nodes = t_degree / 2 + 1;
    let grid = curve.a0.grid().clone();
    let mut out = MatrixForm::zeros(grid.clone(), 2 * weight - 1, 1);
    if 2 * weight - 1 > grid.dim() {
        return Ok(out);
    }
    for (t, w) in gauss_legendre_unit(nodes) {
        let b = curve.velocity_at(t)?;
        let r = curve.curvature_at(t)?;
        out.add_scaled(C64::new(w, 0.0), &transgression_integrand(&b, &r, poly)?)?;
    }
    Ok(out)
}

/// `TP_l = l ∫₀¹ tr(B^t ∧ (R^t)^{l−1}) dt`, unnormalised.
pub fn transgression(curve: &ConnectionCurve, l: usize) -> Result<MatrixForm> {
    transgression_poly(curve, &InvariantPolynomial::trace_power(l))
}

/// Max norm of `d TP − (P(R¹) − P(R⁰))`.
pub fn transgression_residual(curve: &ConnectionCurve, poly: &InvariantPolynomial) -> Result<f64> {
    let tp = transgression_poly(curve, poly)?;
    let lhs = exterior_d(&tp)?;
    let p1 = poly.evaluate(&curve.curvature_at(1.0)?)?;
    let p0 = poly.evaluate(&curve.curvature_at(0.0)?)?;
    lhs.distance(&p1.sub(&p0)?)
}

/// Largest period over `cycles` of
/// `T(P_{l1} P_{l2}) − T P_{l1} ∧ P_{l2}(R⁰) − T P_{l2} ∧ P_{l1}(R¹)`.
pub fn transgression_product_check(curve: &ConnectionCurve, l1: usize, l2: usize, cycles: &CycleBasis) -> Result<f64> {
    let lhs = transgression_poly(curve, &InvariantPolynomial::product(&[l1, l2]))?;
    let r0 = curve.curvature_at(0.0)?;
    let r1 = curve.curvature_at(1.0)?;
    let t1 = transgression(curve, l1)?;
    let t2 = transgression(curve, l2)?;
    let rhs = wedge(&t1, &trace_power_form(&r0, l2)?)?.add(&wedge(&t2, &trace_power_form(&r1, l1)?)?)?;
    cycles.max_period(&lhs.sub(&rhs)?)
}

/// Per-`l` outcome of a CS-equivalence test.
#[derive(Clone, Debug, PartialEq)]
pub struct CsLevel {
    pub l: usize,
    /// Max norm of `d TP_l − ΔP_l`, normalised by `(i/2π)^l`.
    pub closure_residual: f64,
    /// Largest `(i/2π)^l`-normalised period of `TP_l` over the cycle basis.
    pub max_period: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsReport {
    pub levels: Vec<CsLevel>,
    pub equivalent: bool,
}

/// Thresholds for [`cs_equivalent`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsTolerance {
    pub closure: f64,
    pub period: f64,
}

impl CsTolerance {
    /// `10 h²` for the closure residual and `1e-6` for periods.
    pub fn for_grid(h: f64) -> Self {
        Self { closure: 10.0 * h * h, period: 1e-6 }
    }
}

/// Decides CS equivalence by closedness of every `TP_l`, `l ≤ rank`, and
/// vanishing of its periods over `cycles`.
pub fn cs_equivalent(c0: &Connection, c1: &Connection, cycles: &CycleBasis, tol: CsTolerance) -> Result<CsReport> {
    let curve = ConnectionCurve::linear(c0, c1)?;
    let dim = c0.grid().dim();
    let mut levels = Vec::new();
    for l in 1..=c0.rank() {
        if 2 * l - 1 > dim {
            break;
        }
        let norm = CURVATURE_NORMALIZATION.powu(l as u32).norm();
        let poly = InvariantPolynomial::trace_power(l);
        let closure_residual = norm * transgression_residual(&curve, &poly)?;
        let tp = transgression(&curve, l)?.scale(CURVATURE_NORMALIZATION.powu(l as u32));
        let max_period = cycles.max_period(&tp)?;
        let passed = closure_residual < tol.closure && max_period < tol.period;
        levels.push(CsLevel { l, closure_residual, max_period, passed });
    }
    let equivalent = levels.iter().all(|lv| lv.passed);
    Ok(CsReport { levels, equivalent })
}

/// `P_l(R⁰) ∧ …` helper for callers that want the Chern–Weil form of a
/// connection for a polynomial.
pub fn chern_weil(c: &Connection, poly: &InvariantPolynomial) -> Result<MatrixForm> {
    poly.evaluate(&curvature(c)?)
}
