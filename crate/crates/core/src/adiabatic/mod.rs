//! Riemannian submersions in constant-inner-product frames.
//!
//! A [`SubmersionFrame`] lists vertical frame fields first and special
//! (basic) horizontal fields after them, together with the structure
//! functions `⟨[e_a, e_b], e_c⟩`. Connections are tables
//! `Γ(a, b, c) = ⟨∇_{e_a} e_b, e_c⟩` taken with the unstretched metric, so a
//! table is the connection matrix of the frame. Stretching the base by `λ`
//! multiplies horizontal inner products by `λ`.

mod certificate;
mod frame;
mod tensor;

pub use certificate::{
    cs_triviality_certificate, curve_certificate, frame_curvature, to_connection, CertificateReport, TraceLevel,
};
pub use frame::{hopf_frame, product_frame, FrameSample, SubmersionFrame};
pub use tensor::{
    adiabatic_limit, b_closed_form, b_tensor, direct_sum_connection, horizontal_connection, limit_difference,
    limit_extrapolation, riemannian_connection, scaling_check, vertical_connection, BClass, ClassScaling,
    ConnectionTensor, ExtrapolationReport, ScalingReport, TensorKind,
};
