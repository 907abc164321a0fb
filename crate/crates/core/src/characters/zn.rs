use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use super::angle::AngleValue;
use super::pairing::char_integral;
use crate::geometry::{product, GeometrySpec, ZnCycleSpec};
use crate::{Error, Result, C64};

/// Gap above which a piece of `V` and the filling `Q` are taken not to close
/// up into the boundary of a ball carrying the bundle.
const GLUING_TOL: f64 = 1e-6;

/// `(Σ_j ∫_{V_j} ch Todd, ∫_Q ch Todd)`.
pub fn zn_raw_parts(z: &ZnCycleSpec) -> Result<(C64, C64)> {
    let count: usize = z.v.iter().map(|p| p.boundary.as_ref().map_or(0, |b| b.components.len())).sum();
    if count != z.n {
        return Err(Error::BoundaryMismatch(format!("V has {count} boundary components, {} expected", z.n)));
    }
    let mut v = C64::new(0.0, 0.0);
    for piece in &z.v {
        v += char_integral(piece)?;
    }
    Ok((v, char_integral(&z.q)?))
}

/// `(1/n) ∫_V ch Todd − ∫_Q ch Todd` reduced mod 1; an element of order `n`.
pub fn zn_pairing(z: &ZnCycleSpec) -> Result<AngleValue> {
    let (v, q) = zn_raw_parts(z)?;
    Ok(AngleValue::reduce(v / z.n as f64 - q))
}

/// `|zn_pairing|` for a Z/n-manifold that is a boundary.
///
/// The bounding data are read off the pieces: each piece of `V` must have a
/// single boundary circle and close up with `Q̄` into a surface whose bundle
/// has vanishing first Chern number, so that it bounds a ball over which the
/// bundle extends. A piece that fails this raises [`Error::GluingMismatch`].
pub fn zn_boundary_vanishing(z: &ZnCycleSpec) -> Result<f64> {
    let q = char_integral(&z.q)?;
    for piece in &z.v {
        if piece.boundary.as_ref().map_or(0, |b| b.components.len()) != 1 {
            return Err(Error::GluingMismatch(format!("`{}` does not close up with one copy of Q", piece.name)));
        }
        let closed = char_integral(piece)? - q;
        if closed.norm() > GLUING_TOL {
            return Err(Error::GluingMismatch(format!(
                "`{}` glued to Q̄ has Chern number {closed}, the bundle does not extend",
                piece.name
            )));
        }
    }
    let value = zn_pairing(z)?;
    Ok(value.distance(&AngleValue::zero()))
}

/// The Z/n-manifold `z × U` for a closed `U`, with the bundle pulled back
/// from `z` and the tangent bundle the direct sum.
pub fn zn_product(z: &ZnCycleSpec, u: &GeometrySpec) -> Result<ZnCycleSpec> {
    if !u.is_closed() {
        return Err(Error::InvalidParameter(format!("`{}` is not closed", u.name)));
    }
    let v = z.v.iter().map(|p| product(p, u)).collect::<Result<Vec<_>>>()?;
    Ok(ZnCycleSpec { n: z.n, v, beta_v: product(&z.beta_v, u)?, q: product(&z.q, u)? })
}
