use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use super::angle::{integer_gap, AngleValue};
use super::pushforward::Character;
use crate::connections::{chern_character, curvature, todd_form, Connection};
use crate::forms::{exterior_d, MixedForm};
use crate::geometry::{oriented_holonomy, BoundaryComponent, GeometrySpec, Placement};
use crate::{Error, Result, C64};

/// Pointwise agreement demanded between a filling's restricted connection
/// and the boundary data.
const RESTRICTION_TOL: f64 = 1e-9;
/// Agreement demanded between boundary holonomies mod 1.
const HOLONOMY_TOL: f64 = 1e-8;

/// `∫_g [ch(bundle) ∧ Todd(tangent)]_top`, oriented.
pub fn char_integral(g: &GeometrySpec) -> Result<C64> {
    if !g.dim().is_multiple_of(2) {
        return Err(Error::DimensionParity(format!("`{}` has odd dimension {}", g.name, g.dim())));
    }
    let ch = chern_character(g.bundle()?)?;
    let td = todd_form(g.tangent()?)?;
    g.integrate(ch.wedge(&td)?.top())
}

/// A closed odd-dimensional cycle `Σ` with its bundle and tangent data, and a
/// filling `W` with `∂W = Σ` carrying extended connections.
#[derive(Clone, Debug, PartialEq)]
pub struct EnrichedCycle {
    pub sigma: GeometrySpec,
    pub filling: GeometrySpec,
}

impl EnrichedCycle {
    pub fn new(sigma: GeometrySpec, filling: GeometrySpec) -> Result<Self> {
        let ec = Self { sigma, filling };
        ec.validate()?;
        Ok(ec)
    }

    /// Uses the single boundary component of `filling` as `Σ`, with its
    /// induced orientation.
    pub fn from_filling(filling: GeometrySpec) -> Result<Self> {
        let comp = single_component(&filling)?;
        let mut sigma = comp.geometry.clone();
        sigma.orientation *= comp.orientation;
        Self::new(sigma, filling)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_closed() || self.sigma.dim().is_multiple_of(2) {
            return Err(Error::DimensionParity(format!("`{}` is not a closed odd-dimensional cycle", self.sigma.name)));
        }
        if self.filling.dim() != self.sigma.dim() + 1 {
            return Err(Error::DimensionParity(format!(
                "filling of dimension {} for a {}-cycle",
                self.filling.dim(),
                self.sigma.dim()
            )));
        }
        self.filling.validate()?;
        let comp = single_component(&self.filling)?;
        let gap = boundary_gap(&self.sigma, 1.0, &comp.geometry, comp.orientation)?;
        if gap > HOLONOMY_TOL {
            return Err(Error::BoundaryMismatch(format!(
                "`{}` does not bound `{}`: gap {gap:e}",
                self.filling.name, self.sigma.name
            )));
        }
        restriction_gap(&self.filling, comp)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    /// Same cycle with the trivial flat line added to the bundle on both `Σ`
    /// and `W`.
    pub fn stabilized(&self) -> Result<Self> {
        let mut out = self.clone();
        stabilize(&mut out.sigma)?;
        stabilize(&mut out.filling)?;
        if let Some(b) = &mut out.filling.boundary {
            for comp in &mut b.components {
                stabilize(&mut comp.geometry)?;
            }
        }
        Ok(out)
    }
}

fn stabilize(g: &mut GeometrySpec) -> Result<()> {
    let trivial = Connection::trivial(g.grid.clone(), 1);
    let sum = g.bundle()?.direct_sum(&trivial)?;
    g.set_connection("bundle", sum)
}

fn single_component(filling: &GeometrySpec) -> Result<&BoundaryComponent> {
    match filling.boundary.as_ref().map(|b| &b.components[..]) {
        Some([comp]) => Ok(comp),
        other => Err(Error::BoundaryMismatch(format!(
            "`{}` has {} boundary components, 1 expected",
            filling.name,
            other.map_or(0, <[_]>::len)
        ))),
    }
}

/// How far two oriented boundary data are from being gauge equivalent.
///
/// Circles with abelian data are compared by holonomy mod 1; anything else
/// must agree pointwise on the same nodes with the same orientation.
fn boundary_gap(a: &GeometrySpec, oa: f64, b: &GeometrySpec, ob: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Ok(f64::INFINITY);
    }
    let (ca, cb) = (a.bundle()?, b.bundle()?);
    if a.dim() == 1 && ca.rank() == 1 && cb.rank() == 1 {
        return Ok(integer_gap(oriented_holonomy(a, oa)? - oriented_holonomy(b, ob)?));
    }
    if oa * a.orientation != ob * b.orientation || !a.grid.same_nodes(&b.grid) || ca.rank() != cb.rank() {
        return Ok(f64::INFINITY);
    }
    connection_gap(ca, cb)
}

fn connection_gap(a: &Connection, b: &Connection) -> Result<f64> {
    let mut gap = curvature(a)?.distance(&curvature(b)?.rebind(a.grid().clone())?)?;
    if let (Ok(pa), Ok(pb)) = (a.potential(), b.potential()) {
        gap = gap.max(pa.distance(&pb.rebind(a.grid().clone())?)?);
    }
    Ok(gap)
}

/// Face components must see the filling's connections restricted exactly;
/// circle components carry their own analytic pullback and are skipped.
fn restriction_gap(filling: &GeometrySpec, comp: &BoundaryComponent) -> Result<()> {
    if !matches!(comp.placement, Placement::Face { .. }) {
        return Ok(());
    }
    let restricted = filling.restrict_connection("bundle", comp)?;
    let gap = connection_gap(&restricted, comp.geometry.bundle()?)?;
    if gap > RESTRICTION_TOL {
        return Err(Error::BoundaryMismatch(format!(
            "bundle of `{}` restricts to its boundary with gap {gap:e}",
            filling.name
        )));
    }
    Ok(())
}

/// The angle `∫_W ch(E_W) ∧ Todd(W)` reduced mod 1.
pub fn angle_pairing(ec: &EnrichedCycle) -> Result<AngleValue> {
    Ok(AngleValue::reduce(char_integral(&ec.filling)?))
}

/// Pairing with a disjoint union: the mod-1 sum of the pairings.
pub fn angle_pairing_disjoint(cycles: &[EnrichedCycle]) -> Result<AngleValue> {
    cycles.iter().try_fold(AngleValue::zero(), |acc, ec| Ok(acc + angle_pairing(ec)?))
}

/// Difference of the raw integrals of two fillings of the same cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegerResidual {
    pub difference: C64,
    pub nearest: i64,
    /// Distance of `difference` from `nearest`, imaginary part included.
    pub deviation: f64,
}

pub fn filling_independence(ec: &EnrichedCycle, alt: &EnrichedCycle) -> Result<IntegerResidual> {
    let gap = boundary_gap(&ec.sigma, 1.0, &alt.sigma, 1.0)?;
    if gap > HOLONOMY_TOL {
        return Err(Error::BoundaryMismatch(format!(
            "`{}` and `{}` carry different boundary data (gap {gap:e})",
            ec.sigma.name, alt.sigma.name
        )));
    }
    let difference = char_integral(&ec.filling)? - char_integral(&alt.filling)?;
    let nearest = difference.re.round();
    Ok(IntegerResidual {
        difference,
        nearest: nearest as i64,
        deviation: (difference.re - nearest).abs().max(difference.im.abs()),
    })
}

/// Largest `|d C_p|` over the parts of `C` below the top degree.
pub fn closure_defect(c: &MixedForm) -> Result<f64> {
    let dim = c.grid().dim();
    let mut worst: f64 = 0.0;
    for part in &c.parts()[..dim] {
        if part.max_norm() > 0.0 {
            worst = worst.max(exterior_d(part)?.max_norm());
        }
    }
    Ok(worst)
}

/// `|t(ec′) − t(ec) − ∫_B C ∧ Todd(B)|` in `C/Z` for a bordism `B` with
/// `∂B = Σ′ − Σ` and a closed variation form `C` pulled back to `B`.
pub fn variation_check<T: Character + ?Sized>(
    t: &T,
    ec: &EnrichedCycle,
    ec_prime: &EnrichedCycle,
    bordism: &GeometrySpec,
    c: &MixedForm,
) -> Result<f64> {
    check_bordism(ec, ec_prime, bordism)?;
    if !c.grid().same_nodes(&bordism.grid) {
        return Err(Error::GridMismatch);
    }
    let h = bordism.grid.max_spacing();
    let defect = closure_defect(c)?;
    if defect > 10.0 * h * h * c.max_norm().max(1.0) {
        return Err(Error::NotClosed(defect));
    }
    let td = todd_form(bordism.tangent()?)?;
    let flux = bordism.integrate(c.wedge(&td)?.top())?;
    let change = t.evaluate(ec_prime)?.raw - t.evaluate(ec)?.raw;
    let r = change - flux;
    Ok(integer_gap(r.re).max(r.im.abs()))
}

fn check_bordism(ec: &EnrichedCycle, ec_prime: &EnrichedCycle, bordism: &GeometrySpec) -> Result<()> {
    let comps = bordism.boundary.as_ref().map_or(&[][..], |b| &b.components[..]);
    let matches = |target: &GeometrySpec, sign: f64| -> Result<bool> {
        for comp in comps.iter().filter(|c| c.orientation == sign) {
            if boundary_gap(target, 1.0, &comp.geometry, 1.0)? <= HOLONOMY_TOL {
                return Ok(true);
            }
        }
        Ok(false)
    };
    if comps.len() == 2 && matches(&ec_prime.sigma, 1.0)? && matches(&ec.sigma, -1.0)? {
        Ok(())
    } else {
        Err(Error::BoundaryMismatch(format!(
            "boundary of `{}` is not {} − {}",
            bordism.name, ec_prime.sigma.name, ec.sigma.name
        )))
    }
}

/// A closed probe geometry with a form `C` already pulled back to it.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub geometry: GeometrySpec,
    pub form: MixedForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralityReport {
    pub member: bool,
    pub worst_deviation: f64,
    pub values: Vec<C64>,
}

/// Whether every `∫ C ∧ Todd(probe)` is an integer within `tol`.
pub fn integrality_membership(probes: &[Probe], tol: f64) -> Result<IntegralityReport> {
    let mut values = Vec::with_capacity(probes.len());
    let mut worst: f64 = 0.0;
    for p in probes {
        if !p.geometry.is_closed() {
            return Err(Error::InvalidParameter(format!("probe `{}` is not closed", p.geometry.name)));
        }
        let td = todd_form(p.geometry.tangent()?)?;
        let v = p.geometry.integrate(p.form.wedge(&td)?.top())?;
        worst = worst.max(integer_gap(v.re).max(v.im.abs()));
        values.push(v);
    }
    Ok(IntegralityReport { member: worst <= tol, worst_deviation: worst, values })
}
