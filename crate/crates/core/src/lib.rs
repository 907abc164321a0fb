//! Chern–Weil and Chern–Simons calculus on single-chart grids.
//!
//! `diffk-core` evaluates characteristic forms of connections sampled on
//! tensor-product chart grids and builds the mod-one "angle" characters of
//! complex vector bundles with connection on top of them:
//!
//! * [`forms`]: matrix-valued differential forms, wedge, exterior derivative,
//!   trace, quadrature, periods and fibre integration.
//! * [`connections`]: curvature, trace powers, Chern character and Todd forms,
//!   transgression (Chern–Simons) forms and CS-equivalence tests.
//! * [`geometry`]: the catalog of closed-form example geometries with their
//!   cycle bases, fillings, collars and product fibrations.
//! * [`characters`]: angle pairings in C/Z, filling independence, variation
//!   forms, integrality probes, Z/n pairings and the wrong-way map.
//! * [`adiabatic`]: Riemannian submersions in constant-inner-product frames,
//!   the direct-sum and Levi-Civita connections, their difference tensor under
//!   base stretching, the adiabatic limit and its triviality certificate.
//! * [`spectral`]: Hurwitz zeta and the eta invariant of the circle Dirac
//!   operator twisted by a flat line.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the
//! command-line front end live in the companion `diffk` crate.
#![no_std]
#![warn(missing_debug_implementations)]
// `num_traits::Float` imports go unused when feature unification pulls in std.
#![allow(unused_imports)]

extern crate alloc;

pub mod adiabatic;
pub mod characters;
pub mod connections;
mod error;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};

/// Complex scalar used for every form coefficient.
pub type C64 = num_complex::Complex64;

/// `i / 2π`, the curvature normalisation used by every characteristic form.
pub const CURVATURE_NORMALIZATION: C64 = C64::new(0.0, 1.0 / (2.0 * core::f64::consts::PI));
