use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use super::frame::SubmersionFrame;
use super::tensor::{direct_sum_connection, limit_difference, ConnectionTensor};
use crate::connections::{structure_curvature, Connection};
use crate::forms::{exterior_d, MatrixForm};
use crate::{Error, Result, C64};

/// Values of `t` at which the curve `∇^⊕ + t D` is sampled.
const T_SAMPLES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Residual below which the certificate passes.
pub const CERTIFICATE_TOL: f64 = 1e-10;

/// Frame-basis 1-form with values in `n × n` matrices: `[node][a][row][col]`.
#[derive(Clone, Debug, PartialEq)]
struct FrameOneForm {
    n: usize,
    values: Vec<f64>,
}

/// Frame-basis 2-form, stored for every ordered pair: `[node][a][b][row][col]`.
#[derive(Clone, Debug, PartialEq)]
struct FrameTwoForm {
    n: usize,
    values: Vec<f64>,
}

impl FrameOneForm {
    fn of(t: &ConnectionTensor) -> Self {
        let n = t.total_dim();
        let mut values = Vec::with_capacity(t.nodes() * n * n * n);
        for node in 0..t.nodes() {
            for a in 0..n {
                values.extend(t.matrix(node, a));
            }
        }
        Self { n, values }
    }

    fn at(&self, node: usize, a: usize) -> &[f64] {
        let n2 = self.n * self.n;
        let i = (node * self.n + a) * n2;
        &self.values[i..i + n2]
    }

    fn combine(&self, s: f64, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + s * y).collect();
        Self { n: self.n, values }
    }
}

impl FrameTwoForm {
    fn zeros(n: usize, nodes: usize) -> Self {
        Self { n, values: vec![0.0; nodes * n * n * n * n] }
    }

    fn index(&self, node: usize, a: usize, b: usize) -> usize {
        let n = self.n;
        ((node * n + a) * n + b) * n * n
    }

    fn at(&self, node: usize, a: usize, b: usize) -> &[f64] {
        let i = self.index(node, a, b);
        &self.values[i..i + self.n * self.n]
    }

    fn at_mut(&mut self, node: usize, a: usize, b: usize) -> &mut [f64] {
        let i = self.index(node, a, b);
        let n2 = self.n * self.n;
        &mut self.values[i..i + n2]
    }

    fn combine(&self, s: f64, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + s * y).collect();
        Self { n: self.n, values }
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn matmul(x: &[f64], y: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i * n + k];
            if xik != 0.0 {
                for j in 0..n {
                    out[i * n + j] += xik * y[k * n + j];
                }
            }
        }
    }
    out
}

fn commutator(x: &[f64], y: &[f64], n: usize) -> Vec<f64> {
    let (xy, yx) = (matmul(x, y, n), matmul(y, x, n));
    xy.iter().zip(&yx).map(|(p, q)| p - q).collect()
}

/// `e_a(ω_b)` for every `a, b`, entry-wise: `[node][a][b][row][col]`.
///
/// Constant frames give zero. Otherwise each matrix entry is differentiated
/// along the chart and contracted with the frame field.
fn frame_derivative(f: &SubmersionFrame, w: &FrameOneForm) -> Result<FrameTwoForm> {
    let n = f.total_dim();
    let mut out = FrameTwoForm::zeros(n, f.nodes());
    if f.is_constant() {
        return Ok(out);
    }
    let grid = f.grid().clone();
    for b in 0..n {
        let mut data = Vec::with_capacity(f.nodes() * n * n);
        for node in 0..f.nodes() {
            data.extend(w.at(node, b).iter().map(|&x| C64::new(x, 0.0)));
        }
        let d = exterior_d(&MatrixForm::from_data(grid.clone(), 0, n, data)?)?;
        for node in 0..f.nodes() {
            for a in 0..n {
                let e = f.frame_field(node, a).expect("sampled frame");
                let target = out.at_mut(node, a, b);
                for (i, &ei) in e.iter().enumerate() {
                    if ei == 0.0 {
                        continue;
                    }
                    for (t, v) in target.iter_mut().zip(d.coeff(node, 1 << i)) {
                        *t += ei * v.re;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `(d^ω β)(e_a, e_b) = e_a(β_b) − e_b(β_a) − Σ_c C_ab^c β_c + [ω_a, β_b] − [ω_b, β_a]`.
fn covariant_d(f: &SubmersionFrame, omega: &FrameOneForm, beta: &FrameOneForm) -> Result<FrameTwoForm> {
    let n = f.total_dim();
    let deriv = frame_derivative(f, beta)?;
    let mut out = FrameTwoForm::zeros(n, f.nodes());
    for node in 0..f.nodes() {
        for a in 0..n {
            for b in 0..n {
                let mut m: Vec<f64> = deriv.at(node, a, b).iter().zip(deriv.at(node, b, a)).map(|(x, y)| x - y).collect();
                for c in 0..n {
                    let cab = f.bracket(node, a, b, c);
                    if cab != 0.0 {
                        for (t, v) in m.iter_mut().zip(beta.at(node, c)) {
                            *t -= cab * v;
                        }
                    }
                }
                let p = commutator(omega.at(node, a), beta.at(node, b), n);
                let q = commutator(omega.at(node, b), beta.at(node, a), n);
                for ((t, x), y) in m.iter_mut().zip(&p).zip(&q) {
                    *t += x - y;
                }
                out.at_mut(node, a, b).copy_from_slice(&m);
            }
        }
    }
    Ok(out)
}

/// `[β, β](e_a, e_b) = [β_a, β_b]`.
fn self_bracket(beta: &FrameOneForm, nodes: usize) -> FrameTwoForm {
    let n = beta.n;
    let mut out = FrameTwoForm::zeros(n, nodes);
    for node in 0..nodes {
        for a in 0..n {
            for b in 0..n {
                let c = commutator(beta.at(node, a), beta.at(node, b), n);
                out.at_mut(node, a, b).copy_from_slice(&c);
            }
        }
    }
    out
}

/// Frame components `R(e_a, e_b)` of the curvature of a connection tensor:
/// `e_a(ω_b) − e_b(ω_a) − Σ_c C_ab^c ω_c + [ω_a, ω_b]`.
///
/// Returned as `[node][a][b]` row-major `n × n` matrices acting on frame
/// component columns.
pub fn frame_curvature(f: &SubmersionFrame, t: &ConnectionTensor) -> Result<Vec<f64>> {
    Ok(curvature_of(f, &FrameOneForm::of(t))?.values)
}

fn curvature_of(f: &SubmersionFrame, omega: &FrameOneForm) -> Result<FrameTwoForm> {
    let n = f.total_dim();
    let zero = FrameOneForm { n, values: vec![0.0; omega.values.len()] };
    // d^0 ω is the plain frame differential.
    let d = covariant_d(f, &zero, omega)?;
    Ok(d.combine(1.0, &self_bracket(omega, f.nodes())))
}

/// Coordinate connection of a tensor in the trivialisation by the frame:
/// `A_i = Σ_a Γ_a θ^a_i`.
pub fn to_connection(f: &SubmersionFrame, t: &ConnectionTensor) -> Result<Connection> {
    if f.is_constant() {
        return Err(Error::InvalidParameter(format!("frame `{}` has no chart to live on", f.name)));
    }
    let n = f.total_dim();
    let omega = FrameOneForm::of(t);
    let mut a = MatrixForm::zeros(f.grid().clone(), 1, n);
    for i in 0..n {
        let comp = a.component_mut(1 << i).expect("1-form component");
        for node in 0..f.nodes() {
            for k in 0..n {
                let theta = f.coframe_field(node, k).expect("sampled")[i];
                if theta == 0.0 {
                    continue;
                }
                for (e, v) in omega.at(node, k).iter().enumerate() {
                    comp[node * n * n + e] += C64::new(theta * v, 0.0);
                }
            }
        }
    }
    Connection::from_potential(a)
}

/// Per-`l` worst pointwise trace of `D_{s₁} R^t_{s₂ s₃} ⋯ R^t_{s_{2l−2} s_{2l−1}}`
/// over all frame arguments, nodes and sampled `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceLevel {
    pub l: usize,
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    /// `max |[D_a, D_b]|`.
    pub bracket_residual: f64,
    /// Largest entry of `d^⊕ D` that is not `H → V`.
    pub block_residual: f64,
    /// Curvature of `∇^⊕ + t D` against `R + t d^⊕ D + t² D ∧ D`, and for
    /// charted frames against the coordinate curvature of the bridged
    /// connection away from boundary closures, normalised by `max(1, |R|)`.
    pub curvature_residual: f64,
    /// Tolerance for `curvature_residual`: round-off for constant frames,
    /// `10 h²` on a chart.
    pub curvature_tol: f64,
    pub traces: Vec<TraceLevel>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn worst_trace(&self) -> f64 {
        self.traces.iter().fold(0.0f64, |m, t| m.max(t.worst))
    }
}

/// Certificate that `∇^⊕` and `∇̃^r = ∇^⊕ + B̃` are related by vanishing
/// transgression integrands up to degree `l_max`.
pub fn cs_triviality_certificate(f: &SubmersionFrame, l_max: usize) -> Result<CertificateReport> {
    curve_certificate(f, &limit_difference(f), l_max)
}

/// The same checks along `∇^⊕ + t D` for any difference tensor `D`.
///
/// Passing needs the bracket, block and trace residuals under
/// [`CERTIFICATE_TOL`] and the curvature residual under its tolerance.
pub fn curve_certificate(f: &SubmersionFrame, difference: &ConnectionTensor, l_max: usize) -> Result<CertificateReport> {
    if l_max == 0 {
        return Err(Error::InvalidParameter("certificate needs l_max ≥ 1".into()));
    }
    let n = f.total_dim();
    let nodes = f.nodes();
    let base = FrameOneForm::of(&direct_sum_connection(f));
    let d = FrameOneForm::of(difference);
    let r0 = curvature_of(f, &base)?;
    let dd = covariant_d(f, &base, &d)?;
    let dd_bracket = self_bracket(&d, nodes);
    let bracket_residual = dd_bracket.max_abs();

    let mut block_residual: f64 = 0.0;
    for node in 0..nodes {
        for a in 0..n {
            for b in 0..n {
                let m = dd.at(node, a, b);
                for row in 0..n {
                    for col in 0..n {
                        if f.is_vertical(col) || !f.is_vertical(row) {
                            block_residual = block_residual.max(m[row * n + col].abs());
                        }
                    }
                }
            }
        }
    }

    let scale = r0.max_abs().max(1.0);
    let mut curvature_residual: f64 = 0.0;
    let mut curves = Vec::with_capacity(T_SAMPLES.len());
    for &t in &T_SAMPLES {
        // (D ∧ D)(e_a, e_b) = [D_a, D_b].
        let rt = r0.combine(t, &dd).combine(t * t, &dd_bracket);
        let direct = curvature_of(f, &base.combine(t, &d))?;
        curvature_residual = curvature_residual.max(distance(&rt, &direct) / scale);
        if !f.is_constant() {
            let grid = structure_curvature(to_connection(f, &tensor_on_curve(f, difference, t)?)?.potential()?)?;
            curvature_residual = curvature_residual.max(chart_gap(f, &grid, &rt) / scale);
        }
        curves.push(rt);
    }
    let curvature_tol = if f.is_constant() {
        1e-12
    } else {
        let h = f.active_spacing();
        10.0 * h * h
    };

    let mut traces = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let mut worst: f64 = 0.0;
        for rt in &curves {
            for node in 0..nodes {
                worst = worst.max(worst_trace(&d, rt, node, l));
            }
        }
        traces.push(TraceLevel { l, worst });
    }
    let pass = bracket_residual < CERTIFICATE_TOL
        && block_residual < CERTIFICATE_TOL
        && curvature_residual < curvature_tol
        && traces.iter().all(|t| t.worst < CERTIFICATE_TOL);
    Ok(CertificateReport { bracket_residual, block_residual, curvature_residual, curvature_tol, traces, pass })
}

fn tensor_on_curve(f: &SubmersionFrame, d: &ConnectionTensor, t: f64) -> Result<ConnectionTensor> {
    direct_sum_connection(f).add_scaled(t, d)
}

fn distance(x: &FrameTwoForm, y: &FrameTwoForm) -> f64 {
    x.values.iter().zip(&y.values).fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

/// Frame components of a coordinate 2-form against a frame-basis one, over
/// nodes of positive weight where both sides use interior stencils. Closure
/// rows are only second order and both sides differentiate there.
fn chart_gap(f: &SubmersionFrame, grid_form: &MatrixForm, frame_form: &FrameTwoForm) -> f64 {
    let n = f.total_dim();
    let g = f.grid();
    let mut worst: f64 = 0.0;
    for node in (0..f.nodes()).filter(|&k| g.quad_weight(k) > 0.0 && g.is_stencil_interior(k)) {
        for a in 0..n {
            for b in (a + 1)..n {
                let (u, v) = (f.frame_field(node, a).expect("sampled"), f.frame_field(node, b).expect("sampled"));
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        let s = u[i] * v[j] - u[j] * v[i];
                        if s != 0.0 {
                            for (t, x) in m.iter_mut().zip(grid_form.coeff(node, (1 << i) | (1 << j))) {
                                *t += s * x.re;
                            }
                        }
                    }
                }
                for (x, y) in m.iter().zip(frame_form.at(node, a, b)) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    worst
}

/// `max |tr(D_{s₁} R_{s₂ s₃} ⋯)|` over all frame arguments at one node.
fn worst_trace(d: &FrameOneForm, r: &FrameTwoForm, node: usize, l: usize) -> f64 {
    let n = d.n;
    let mut worst: f64 = 0.0;
    let mut stack: Vec<Vec<f64>> = (0..n).map(|a| d.at(node, a).to_vec()).collect();
    for _ in 1..l {
        let mut next = Vec::with_capacity(stack.len() * n * n);
        for m in &stack {
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        next.push(matmul(m, r.at(node, a, b), n));
                    }
                }
            }
        }
        stack = next;
    }
    for m in &stack {
        worst = worst.max((0..n).map(|i| m[i * n + i]).sum::<f64>().abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::{b_tensor, hopf_frame, product_frame, SubmersionFrame};

    fn heisenberg() -> SubmersionFrame {
        // Vertical Z = 0, horizontals H = 1, I = 2 with [H, I] = Z.
        let mut t = vec![0.0; 27];
        t[(3 + 2) * 3] = 1.0;
        t[(2 * 3 + 1) * 3] = -1.0;
        SubmersionFrame::constant("heisenberg", 1, t).unwrap()
    }

    #[test]
    fn constant_frames_pass_and_their_control_fails() {
        let f = heisenberg();
        let r = cs_triviality_certificate(&f, 3).unwrap();
        assert!(r.pass, "{r:?}");
        let control = curve_certificate(&f, &b_tensor(&f, 1.0).unwrap(), 2).unwrap();
        assert!(!control.pass);
        assert!(control.traces[0].worst < 1e-14, "B is skew, so its trace vanishes");
        assert!(control.traces[1].worst > 1e-3, "{control:?}");
    }

    #[test]
    fn product_frames_certify_trivially() {
        let r = cs_triviality_certificate(&product_frame(12).unwrap(), 2).unwrap();
        assert!(r.pass && r.bracket_residual == 0.0 && r.block_residual == 0.0 && r.worst_trace() == 0.0, "{r:?}");
    }

    #[test]
    fn hopf_certificate_passes() {
        let f = hopf_frame(16).unwrap();
        let r = cs_triviality_certificate(&f, 2).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.curvature_residual < r.curvature_tol);
    }

    #[test]
    fn bridge_needs_a_chart() {
        let f = heisenberg();
        assert!(matches!(to_connection(&f, &direct_sum_connection(&f)), Err(Error::InvalidParameter(_))));
    }
}
