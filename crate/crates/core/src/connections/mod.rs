//! Connections, the Chern–Weil map and transgression forms.
//!
//! Every characteristic form is built on `Ω = (i/2π) R`. The Todd series is
//! `td(x) = x / (1 − e^{−x})`, the sign for which `∫_{CP¹} Todd(T CP¹) = 1`.

mod charclass;
mod connection;
mod random;
mod transgression;

pub use charclass::{
    char_power, chern_character, log_todd_coefficients, mixed_exp, todd_form, CharSeries, SeriesKind,
};
pub use connection::{bianchi_residual, constant_abelian, curvature, structure_curvature, Connection};
pub use random::{random_connection, RandomConnectionSpec};
pub use transgression::{
    chern_weil, cs_equivalent, transgression, transgression_poly, transgression_product_check,
    transgression_residual, ConnectionCurve, CsLevel, CsReport, CsTolerance, InvariantPolynomial,
};
