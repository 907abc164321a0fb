//! Mod-one characters of bundles with connection.
//!
//! An enriched odd-dimensional cycle is paired with a bundle by filling it
//! and integrating `ch ∧ Todd` over the filling; the result is only defined
//! in `C/Z`. Z/n-manifolds give values of order `n`, and product fibrations
//! push characters forward to the base.

mod angle;
mod pairing;
mod pushforward;
mod zn;

pub use angle::{integer_gap, AngleValue};
pub use pairing::{
    angle_pairing, angle_pairing_disjoint, char_integral, closure_defect, filling_independence,
    integrality_membership, variation_check, EnrichedCycle, IntegerResidual, IntegralityReport, Probe,
};
pub use pushforward::{BundleCharacter, Character, PushforwardCharacter};
pub use zn::{zn_boundary_vanishing, zn_pairing, zn_product, zn_raw_parts};
