use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::forms::{exterior_d, Axis, ChartGrid, MatrixForm};
use crate::geometry::hopf_chart;
use crate::{Error, Result, C64};

/// Round-off allowance for identities that hold exactly in the tables.
const TABLE_TOL: f64 = 1e-12;

/// Frame data at one chart point, all `n × n` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSample {
    /// Row `a` holds the coordinate components of `e_a`.
    pub frame: Vec<f64>,
    /// Row `a` holds the coordinate components of the dual 1-form `θ^a`.
    pub coframe: Vec<f64>,
    /// Coordinate metric `g_ij`.
    pub metric: Vec<f64>,
    /// `⟨[e_a, e_b], e_c⟩` at index `(a n + b) n + c`.
    pub brackets: Vec<f64>,
    /// Structure functions of the base frame the horizontal fields lift,
    /// indexed from 0 over horizontal fields.
    pub base_brackets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
struct ChartFrame {
    frame: Vec<f64>,
    coframe: Vec<f64>,
}

/// Orthonormal frame of a Riemannian submersion: `fiber_dim` vertical fields
/// followed by special horizontal ones.
///
/// Tables are either constant (a Lie algebra; one sample) or sampled on a
/// chart grid together with the frame fields themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct SubmersionFrame {
    pub name: String,
    fiber_dim: usize,
    total_dim: usize,
    grid: Arc<ChartGrid>,
    chart: Option<ChartFrame>,
    brackets: Vec<f64>,
    base_brackets: Option<Vec<f64>>,
}

impl SubmersionFrame {
    /// Constant structure constants, e.g. a left-invariant frame.
    pub fn constant(name: impl Into<String>, fiber_dim: usize, brackets: Vec<f64>) -> Result<Self> {
        let n = cube_root(brackets.len())?;
        if fiber_dim == 0 || fiber_dim >= n {
            return Err(Error::InvalidParameter(format!("fibre dimension {fiber_dim} in a {n}-frame")));
        }
        let grid = Arc::new(ChartGrid::new((0..n).map(|_| Axis::periodic(1, 0.0, 2.0 * PI)).collect())?);
        let f = Self { name: name.into(), fiber_dim, total_dim: n, grid, chart: None, brackets, base_brackets: None };
        f.validate()?;
        f.check_jacobi()?;
        Ok(f)
    }

    /// Frame sampled on `grid`, whose dimension is the total dimension.
    pub fn sampled(
        name: impl Into<String>,
        grid: Arc<ChartGrid>,
        fiber_dim: usize,
        mut sample: impl FnMut(&[f64]) -> FrameSample,
    ) -> Result<Self> {
        let n = grid.dim();
        if fiber_dim == 0 || fiber_dim >= n {
            return Err(Error::InvalidParameter(format!("fibre dimension {fiber_dim} in a {n}-frame")));
        }
        let h = n - fiber_dim;
        let mut chart = ChartFrame { frame: Vec::new(), coframe: Vec::new() };
        let (mut brackets, mut base) = (Vec::new(), Vec::new());
        for node in 0..grid.len() {
            let s = sample(&grid.coords(node));
            let sizes = [s.frame.len(), s.coframe.len(), s.metric.len(), s.brackets.len(), s.base_brackets.len()];
            if sizes != [n * n, n * n, n * n, n * n * n, h * h * h] {
                return Err(Error::InvalidParameter(format!("frame sample shapes {sizes:?} for n = {n}")));
            }
            check_orthonormal(&s, n, node)?;
            chart.frame.extend_from_slice(&s.frame);
            chart.coframe.extend_from_slice(&s.coframe);
            brackets.extend_from_slice(&s.brackets);
            base.extend_from_slice(&s.base_brackets);
        }
        let f = Self {
            name: name.into(),
            fiber_dim,
            total_dim: n,
            grid,
            chart: Some(chart),
            brackets,
            base_brackets: Some(base),
        };
        f.validate()?;
        f.check_brackets_against_fields()?;
        Ok(f)
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn base_dim(&self) -> usize {
        self.total_dim - self.fiber_dim
    }

    /// Grid on which tables live; frame-basis forms use it as their carrier.
    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn is_constant(&self) -> bool {
        self.chart.is_none()
    }

    pub fn is_vertical(&self, a: usize) -> bool {
        a < self.fiber_dim
    }

    /// `⟨[e_a, e_b], e_c⟩` at `node`.
    pub fn bracket(&self, node: usize, a: usize, b: usize, c: usize) -> f64 {
        let n = self.total_dim;
        self.brackets[node * n * n * n + (a * n + b) * n + c]
    }

    /// Base structure function over horizontal indices `0..h`, if given.
    pub fn base_bracket(&self, node: usize, h: usize, a: usize, b: usize, c: usize) -> Option<f64> {
        self.base_brackets.as_ref().map(|t| t[node * h * h * h + (a * h + b) * h + c])
    }

    /// Coordinate components of `e_a` at `node`; `None` for constant frames.
    pub fn frame_field(&self, node: usize, a: usize) -> Option<&[f64]> {
        let n = self.total_dim;
        self.chart.as_ref().map(|c| &c.frame[(node * n + a) * n..(node * n + a + 1) * n])
    }

    pub fn coframe_field(&self, node: usize, a: usize) -> Option<&[f64]> {
        let n = self.total_dim;
        self.chart.as_ref().map(|c| &c.coframe[(node * n + a) * n..(node * n + a + 1) * n])
    }

    /// Checks the table invariants: antisymmetry, integrable fibres, that
    /// `[H, X]` is vertical for special horizontal `H`, and that the
    /// horizontal part of `[H, I]` is the lifted base bracket.
    pub fn validate(&self) -> Result<()> {
        let n = self.total_dim;
        let v = self.fiber_dim;
        for node in 0..self.nodes() {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let x = self.bracket(node, a, b, c);
                        if (x + self.bracket(node, b, a, c)).abs() > TABLE_TOL {
                            return Err(violation("brackets are antisymmetric", node, a, b, c, x));
                        }
                        let (va, vb, vc) = (a < v, b < v, c < v);
                        if va && vb && !vc && x.abs() > TABLE_TOL {
                            return Err(violation("fibres are integrable", node, a, b, c, x));
                        }
                        if va != vb && !vc && x.abs() > TABLE_TOL {
                            return Err(violation("[H, X] is vertical", node, a, b, c, x));
                        }
                        if let (false, false, false, Some(base)) = (va, vb, vc, &self.base_brackets) {
                            let h = n - v;
                            let y = base[node * h * h * h + ((a - v) * h + (b - v)) * h + (c - v)];
                            if (x - y).abs() > TABLE_TOL {
                                return Err(violation("horizontal bracket lifts the base bracket", node, a, b, c, x - y));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.total_dim;
        let c = |a: usize, b: usize, d: usize| self.bracket(0, a, b, d);
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        let s: f64 = (0..n)
                            .map(|m| c(a, b, m) * c(m, d, e) + c(b, d, m) * c(m, a, e) + c(d, a, m) * c(m, b, e))
                            .sum();
                        if s.abs() > 1e-10 {
                            return Err(violation("constant brackets satisfy Jacobi", 0, a, b, d, s));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `⟨[e_a, e_b], e_c⟩ = −dθ^c(e_a, e_b)` with `dθ^c` differentiated on
    /// the grid; agreement within `10 h² max(1, |C|)`, `h` the widest spacing
    /// along which the coframe varies.
    fn check_brackets_against_fields(&self) -> Result<()> {
        let n = self.total_dim;
        let scale = self.brackets.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let h = self.active_spacing();
        let tol = 10.0 * h * h * scale;
        let mut worst: f64 = 0.0;
        for c in 0..n {
            let theta = MatrixForm::scalar_fn(self.grid.clone(), 1, |_, _| C64::new(0.0, 0.0));
            let mut theta = theta;
            for i in 0..n {
                let comp = theta.component_mut(1 << i).expect("1-form component");
                for (node, v) in comp.iter_mut().enumerate() {
                    *v = C64::new(self.coframe_field(node, c).expect("sampled")[i], 0.0);
                }
            }
            let d_theta = exterior_d(&theta)?;
            for node in 0..self.nodes() {
                for a in 0..n {
                    for b in (a + 1)..n {
                        let value = -contract2(&d_theta, node, self.frame_field(node, a).unwrap(), self.frame_field(node, b).unwrap());
                        worst = worst.max((value - self.bracket(node, a, b, c)).abs());
                    }
                }
            }
        }
        if worst > tol {
            return Err(Error::InvariantViolation {
                check: "bracket table matches the frame fields",
                detail: format!("{}: residual {worst:e} exceeds {tol:e}", self.name),
            });
        }
        Ok(())
    }
}

impl SubmersionFrame {
    /// Largest grid spacing among axes along which the frame varies; the
    /// derivative along the others is exactly zero.
    pub fn active_spacing(&self) -> f64 {
        let Some(chart) = &self.chart else { return 0.0 };
        let n = self.total_dim;
        let g = &self.grid;
        let mut h: f64 = 0.0;
        for k in 0..g.dim() {
            let stride = g.stride(k);
            let varies = (0..g.len()).filter(|&node| g.index_along(node, k) > 0).any(|node| {
                let prev = node - stride;
                (0..n * n).any(|e| chart.coframe[node * n * n + e] != chart.coframe[prev * n * n + e])
            });
            if varies {
                h = h.max(g.spacing(k));
            }
        }
        h
    }
}

/// `ω(u, v)` for a scalar coordinate 2-form at `node`.
pub(crate) fn contract2(w: &MatrixForm, node: usize, u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let coeff = w.scalar(node, (1 << i) | (1 << j)).re;
            s += coeff * (u[i] * v[j] - u[j] * v[i]);
        }
    }
    s
}

fn violation(check: &'static str, node: usize, a: usize, b: usize, c: usize, x: f64) -> Error {
    Error::InvariantViolation { check, detail: format!("node {node}, indices ({a}, {b}, {c}): {x:e}") }
}

fn cube_root(len: usize) -> Result<usize> {
    (1..=16)
        .find(|n| n * n * n == len)
        .ok_or_else(|| Error::InvalidParameter(format!("{len} bracket entries is not a cube")))
}

/// Frame orthonormality in the sampled metric (inner products constant) and
/// duality of frame and coframe.
fn check_orthonormal(s: &FrameSample, n: usize, node: usize) -> Result<()> {
    for a in 0..n {
        for b in 0..n {
            let fa = &s.frame[a * n..(a + 1) * n];
            let fb = &s.frame[b * n..(b + 1) * n];
            let mut g = 0.0;
            for i in 0..n {
                for j in 0..n {
                    g += fa[i] * s.metric[i * n + j] * fb[j];
                }
            }
            let dual: f64 = (0..n).map(|i| s.coframe[a * n + i] * fb[i]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            if (g - target).abs() > 1e-12 {
                return Err(violation("frame inner products are constant", node, a, b, 0, g - target));
            }
            if (dual - target).abs() > 1e-12 {
                return Err(violation("coframe is dual to the frame", node, a, b, 0, dual - target));
            }
        }
    }
    Ok(())
}

/// Sets `t(a, b, c) = value` and `t(b, a, c) = −value`.
fn set_bracket(t: &mut [f64], n: usize, a: usize, b: usize, c: usize, value: f64) {
    t[(a * n + b) * n + c] = value;
    t[(b * n + a) * n + c] = -value;
}

/// Hopf submersion `S³ → S²(1/2)` on the chart of [`hopf_chart`].
///
/// Coordinates `(α, β, γ)`, metric `dα² + dβ² + dγ² + 2 cos 2β dα dγ`.
/// Frame: `X = ∂γ` vertical, `H = ∂β`, `I = (∂α − cos 2β ∂γ) / sin 2β`,
/// with `[H, I] = −2 cot 2β I + 2 X` and `X` commuting with both.
pub fn hopf_frame(n: usize) -> Result<SubmersionFrame> {
    let grid = hopf_chart(n)?.grid;
    SubmersionFrame::sampled("hopf_s3_over_s2", grid, 1, |x| hopf_sample(x[1]))
}

fn hopf_sample(b: f64) -> FrameSample {
    let (s, c) = ((2.0 * b).sin(), (2.0 * b).cos());
    let mut brackets = vec![0.0; 27];
    set_bracket(&mut brackets, 3, 1, 2, 2, -2.0 * c / s);
    set_bracket(&mut brackets, 3, 1, 2, 0, 2.0);
    let mut base_brackets = vec![0.0; 8];
    set_bracket(&mut base_brackets, 2, 0, 1, 1, -2.0 * c / s);
    FrameSample {
        frame: vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0 / s, 0.0, -c / s],
        coframe: vec![c, 0.0, 1.0, 0.0, 1.0, 0.0, s, 0.0, 0.0],
        metric: vec![1.0, 0.0, c, 0.0, 1.0, 0.0, c, 0.0, 1.0],
        brackets,
        base_brackets,
    }
}

/// Product of two round-sphere bands, `θ ∈ [π/8, 7π/8]`, fibred over the
/// first. Coordinates `(θ_b, φ_b, θ_f, φ_f)`; frame `X = ∂θ_f`,
/// `Y = ∂φ_f / sin θ_f`, `H = ∂θ_b`, `I = ∂φ_b / sin θ_b`.
pub fn product_frame(n: usize) -> Result<SubmersionFrame> {
    let band = || Axis::interval(n, PI / 8.0, 7.0 * PI / 8.0);
    let circle = || Axis::periodic(n, 0.0, 2.0 * PI);
    let grid = Arc::new(ChartGrid::new(vec![band(), circle(), band(), circle()])?);
    SubmersionFrame::sampled("product(sphere_band,sphere_band)", grid, 2, |x| {
        let (sb, cb, sf, cf) = (x[0].sin(), x[0].cos(), x[2].sin(), x[2].cos());
        let mut frame = vec![0.0; 16];
        let mut coframe = vec![0.0; 16];
        // (frame index, axis, frame coefficient)
        for (a, i, v) in [(0, 2, 1.0), (1, 3, 1.0 / sf), (2, 0, 1.0), (3, 1, 1.0 / sb)] {
            frame[a * 4 + i] = v;
            coframe[a * 4 + i] = 1.0 / v;
        }
        let mut metric = vec![0.0; 16];
        for (i, g) in [1.0, sb * sb, 1.0, sf * sf].into_iter().enumerate() {
            metric[i * 4 + i] = g;
        }
        let mut brackets = vec![0.0; 64];
        set_bracket(&mut brackets, 4, 0, 1, 1, -cf / sf);
        set_bracket(&mut brackets, 4, 2, 3, 3, -cb / sb);
        let mut base_brackets = vec![0.0; 8];
        set_bracket(&mut base_brackets, 2, 0, 1, 1, -cb / sb);
        FrameSample { frame, coframe, metric, brackets, base_brackets }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_frames_validate() {
        hopf_frame(16).unwrap();
        product_frame(8).unwrap();
    }

    #[test]
    fn left_invariant_hopf_horizontals_are_not_special() {
        // su(2): [e_i, e_j] = 2 ε_ijk e_k, vertical e_0.
        let mut t = vec![0.0; 27];
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            set_bracket(&mut t, 3, a, b, c, 2.0);
        }
        let err = SubmersionFrame::constant("su2", 1, t);
        assert!(matches!(err, Err(Error::InvariantViolation { check: "[H, X] is vertical", .. })));
    }

    #[test]
    fn non_orthonormal_samples_are_rejected() {
        let grid = hopf_chart(8).unwrap().grid;
        let err = SubmersionFrame::sampled("bad", grid, 1, |x| {
            let mut s = hopf_sample(x[1]);
            s.metric[4] = 1.0 + 0.1 * x[1];
            s
        });
        assert!(matches!(err, Err(Error::InvariantViolation { check: "frame inner products are constant", .. })));
    }

    #[test]
    fn wrong_bracket_tables_are_caught_by_the_fields() {
        let grid = hopf_chart(16).unwrap().grid;
        let err = SubmersionFrame::sampled("bad", grid, 1, |x| {
            let mut s = hopf_sample(x[1]);
            // Drops the vertical part of [H, I].
            s.brackets[(3 + 2) * 3] = 0.0;
            s.brackets[(2 * 3 + 1) * 3] = 0.0;
            s
        });
        assert!(matches!(err, Err(Error::InvariantViolation { check: "bracket table matches the frame fields", .. })));
    }
}
