use alloc::format;
use alloc::string::String;

use super::angle::AngleValue;
use super::pairing::{angle_pairing, EnrichedCycle};
use crate::connections::{chern_character, todd_form};
use crate::forms::{fiber_integrate, MixedForm};
use crate::geometry::{product, GeometrySpec};
use crate::{Error, Result, C64};

/// A mod-one character, known through its values on enriched cycles and its
/// variation form.
pub trait Character {
    fn name(&self) -> String;

    fn evaluate(&self, ec: &EnrichedCycle) -> Result<AngleValue>;

    /// The closed variation form `C(t)` pulled back to `g`.
    fn variation_form(&self, g: &GeometrySpec) -> Result<MixedForm>;
}

/// The character of the geometry's `bundle` connection; `C = ch`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BundleCharacter;

impl Character for BundleCharacter {
    fn name(&self) -> String {
        "bundle".into()
    }

    fn evaluate(&self, ec: &EnrichedCycle) -> Result<AngleValue> {
        angle_pairing(ec)
    }

    fn variation_form(&self, g: &GeometrySpec) -> Result<MixedForm> {
        chern_character(g.bundle()?)
    }
}

/// Wrong-way image `b` of a character `t` on the total space of the product
/// fibration `X × F → X`.
///
/// `b` is evaluated on the base as `∫_W Todd(W) ∧ C(b)` with
/// `C(b) = ∫_F Todd(vertical) ∧ C(t)`; [`Self::direct`] evaluates `t` on the
/// pulled-back cycle instead.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardCharacter<T> {
    pub t: T,
    pub fiber: GeometrySpec,
}

impl<T: Character> PushforwardCharacter<T> {
    /// `fibration` is the total space; its fibre must be closed and even
    /// dimensional with a tangent connection.
    pub fn new(t: T, fibration: &GeometrySpec) -> Result<Self> {
        let fib = fibration.fibration.as_ref().ok_or_else(|| Error::NoFibration(fibration.name.clone()))?;
        let fiber = fib.fiber.clone();
        if fiber.dim() % 2 != 0 {
            return Err(Error::OddFiber(fiber.dim()));
        }
        if !fiber.is_closed() {
            return Err(Error::InvalidParameter(format!("fibre `{}` is not closed", fiber.name)));
        }
        fiber.tangent()?;
        Ok(Self { t, fiber })
    }

    /// `Σ × F` filled by `W × F`, enriched by the direct-sum tangent
    /// connection.
    pub fn lift(&self, ec: &EnrichedCycle) -> Result<EnrichedCycle> {
        EnrichedCycle::new(product(&ec.sigma, &self.fiber)?, product(&ec.filling, &self.fiber)?)
    }

    /// `t` on the pulled-back cycle.
    pub fn direct(&self, ec: &EnrichedCycle) -> Result<AngleValue> {
        self.t.evaluate(&self.lift(ec)?)
    }
}

impl<T: Character> Character for PushforwardCharacter<T> {
    fn name(&self) -> String {
        format!("pushforward({}, {})", self.t.name(), self.fiber.name)
    }

    fn evaluate(&self, ec: &EnrichedCycle) -> Result<AngleValue> {
        let w = &ec.filling;
        let c = self.variation_form(w)?;
        let td = todd_form(w.tangent()?)?;
        Ok(AngleValue::reduce(w.integrate(td.wedge(&c)?.top())?))
    }

    fn variation_form(&self, g: &GeometrySpec) -> Result<MixedForm> {
        let total = product(g, &self.fiber)?;
        let vertical = todd_form(total.connection("fiber.tangent")?)?;
        let integrand = vertical.wedge(&self.t.variation_form(&total)?)?;
        let mut out = MixedForm::zeros(g.grid.clone(), 1);
        let sign = C64::new(self.fiber.orientation, 0.0);
        for part in &integrand.parts()[self.fiber.dim()..] {
            out.set_part(fiber_integrate(part, &g.grid, &self.fiber.grid)?.scale(sign))?;
        }
        Ok(out)
    }
}
