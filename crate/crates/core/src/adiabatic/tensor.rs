use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use super::frame::SubmersionFrame;
use crate::{Error, Result};

/// Which connection, or difference of connections, a tensor holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    /// Fibre Levi-Civita connection extended over the total space.
    Vertical,
    /// Lift of the base Levi-Civita connection.
    Horizontal,
    /// `∇^V ⊕ ∇^H`.
    DirectSum,
    /// Levi-Civita connection of the base-stretched metric.
    Riemannian,
    /// `B^λ = ∇^{λr} − ∇^⊕`.
    Difference,
    /// `lim B^λ`.
    LimitDifference,
    /// `∇^⊕ + lim B^λ`.
    AdiabaticLimit,
}

/// Frame components `Γ(a, b, c)` with `∇_{e_a} e_b = Σ_c Γ(a, b, c) e_c`,
/// sampled on the frame's nodes. Pairing with `e_c` in the unstretched metric
/// gives the same numbers, since the frame is orthonormal there.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionTensor {
    pub kind: TensorKind,
    /// Stretch factor; `None` for the λ-independent tensors.
    pub lambda: Option<f64>,
    n: usize,
    fiber_dim: usize,
    values: Vec<f64>,
}

impl ConnectionTensor {
    fn from_fn(f: &SubmersionFrame, kind: TensorKind, lambda: Option<f64>, mut g: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let n = f.total_dim();
        let mut values = Vec::with_capacity(f.nodes() * n * n * n);
        for node in 0..f.nodes() {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        values.push(g(node, a, b, c));
                    }
                }
            }
        }
        Self { kind, lambda, n, fiber_dim: f.fiber_dim(), values }
    }

    pub fn total_dim(&self) -> usize {
        self.n
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn nodes(&self) -> usize {
        self.values.len() / (self.n * self.n * self.n)
    }

    pub fn get(&self, node: usize, a: usize, b: usize, c: usize) -> f64 {
        let n = self.n;
        self.values[node * n * n * n + (a * n + b) * n + c]
    }

    /// `Γ_a` as a row-major matrix acting on component columns:
    /// entry `[c][b] = Γ(a, b, c)`.
    pub fn matrix(&self, node: usize, a: usize) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for b in 0..n {
            for c in 0..n {
                m[c * n + b] = self.get(node, a, b, c);
            }
        }
        m
    }

    fn zip(&self, other: &Self, kind: TensorKind, lambda: Option<f64>, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if (self.n, self.fiber_dim, self.values.len()) != (other.n, other.fiber_dim, other.values.len()) {
            return Err(Error::InvalidParameter("connection tensors of different frames".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| op(*x, *y)).collect();
        Ok(Self { kind, lambda, n: self.n, fiber_dim: self.fiber_dim, values })
    }

    /// `self + s · other`, keeping the kind of `self`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        self.zip(other, self.kind, None, |x, y| x + s * y)
    }

    /// Max-norm distance between the tables.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.zip(other, self.kind, self.lambda, |x, y| x - y)?.max_abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |w_c Γ(a, b, c) + w_b Γ(a, c, b)|` with weights `1` on vertical and
    /// `λ` on horizontal indices: zero exactly for connections preserving the
    /// λ-stretched metric.
    pub fn metric_residual(&self, lambda: f64) -> f64 {
        let w = |i: usize| if i < self.fiber_dim { 1.0 } else { lambda };
        let n = self.n;
        let mut worst: f64 = 0.0;
        for node in 0..self.nodes() {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        worst = worst.max((w(c) * self.get(node, a, b, c) + w(b) * self.get(node, a, c, b)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Koszul formula in a frame whose pairwise inner products are constant,
/// with `⟨e_c, e_c⟩ = w_c`.
fn koszul(f: &SubmersionFrame, node: usize, w: &[f64], a: usize, b: usize, c: usize) -> f64 {
    let br = |x, y, z| f.bracket(node, x, y, z);
    0.5 * (w[c] * br(a, b, c) - w[a] * br(b, c, a) + w[b] * br(c, a, b)) / w[c]
}

fn weights(f: &SubmersionFrame, lambda: f64) -> Vec<f64> {
    (0..f.total_dim()).map(|i| if f.is_vertical(i) { 1.0 } else { lambda }).collect()
}

/// `∇^V`: fibre Levi-Civita along vertical directions, and along special
/// horizontal `H` the skew part of `Y ↦ [H, Y]^V`. Zero outside `V → V`.
pub fn vertical_connection(f: &SubmersionFrame) -> ConnectionTensor {
    let w = weights(f, 1.0);
    ConnectionTensor::from_fn(f, TensorKind::Vertical, None, |node, a, b, c| {
        if !(f.is_vertical(b) && f.is_vertical(c)) {
            0.0
        } else if f.is_vertical(a) {
            koszul(f, node, &w, a, b, c)
        } else {
            0.5 * (f.bracket(node, a, b, c) - f.bracket(node, a, c, b))
        }
    })
}

/// `∇^H`: lift of the base Levi-Civita connection, computed from the base
/// bracket table when one is given. Kills vertical directions.
pub fn horizontal_connection(f: &SubmersionFrame) -> ConnectionTensor {
    let v = f.fiber_dim();
    let h = f.base_dim();
    ConnectionTensor::from_fn(f, TensorKind::Horizontal, None, |node, a, b, c| {
        if f.is_vertical(a) || f.is_vertical(b) || f.is_vertical(c) {
            return 0.0;
        }
        let br = |x: usize, y: usize, z: usize| match f.base_bracket(node, h, x - v, y - v, z - v) {
            Some(value) => value,
            None => f.bracket(node, x, y, z),
        };
        0.5 * (br(a, b, c) - br(b, c, a) + br(c, a, b))
    })
}

pub fn direct_sum_connection(f: &SubmersionFrame) -> ConnectionTensor {
    let (v, h) = (vertical_connection(f), horizontal_connection(f));
    v.zip(&h, TensorKind::DirectSum, None, |x, y| x + y).expect("same frame")
}

/// Levi-Civita connection of the metric stretched by `lambda` on horizontals.
pub fn riemannian_connection(f: &SubmersionFrame, lambda: f64) -> Result<ConnectionTensor> {
    check_lambda(lambda)?;
    let w = weights(f, lambda);
    Ok(ConnectionTensor::from_fn(f, TensorKind::Riemannian, Some(lambda), |node, a, b, c| koszul(f, node, &w, a, b, c)))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::InvalidParameter(format!("stretch factor {lambda} must be finite and at least 1")));
    }
    Ok(())
}

/// `B^λ = ∇^{λr} − ∇^⊕`.
pub fn b_tensor(f: &SubmersionFrame, lambda: f64) -> Result<ConnectionTensor> {
    riemannian_connection(f, lambda)?.zip(&direct_sum_connection(f), TensorKind::Difference, Some(lambda), |x, y| x - y)
}

/// Component class of `⟨B_s u, v⟩`, named by the vertical (`V`/`v`) or
/// horizontal (`H`/`h`) type of `s`, `u`, `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BClass {
    Vvv,
    Hvv,
    Vvh,
    Hvh,
    Vhv,
    Hhv,
    Vhh,
    Hhh,
}

/// How a class of `B^λ` depends on the stretch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassScaling {
    Zero,
    InverseLambda,
    Constant,
}

impl BClass {
    pub const ALL: [BClass; 8] =
        [BClass::Vvv, BClass::Hvv, BClass::Vvh, BClass::Hvh, BClass::Vhv, BClass::Hhv, BClass::Vhh, BClass::Hhh];

    pub fn of(f: &SubmersionFrame, s: usize, u: usize, v: usize) -> Self {
        match (f.is_vertical(s), f.is_vertical(u), f.is_vertical(v)) {
            (true, true, true) => BClass::Vvv,
            (false, true, true) => BClass::Hvv,
            (true, true, false) => BClass::Vvh,
            (false, true, false) => BClass::Hvh,
            (true, false, true) => BClass::Vhv,
            (false, false, true) => BClass::Hhv,
            (true, false, false) => BClass::Vhh,
            (false, false, false) => BClass::Hhh,
        }
    }

    pub fn scaling(self) -> ClassScaling {
        match self {
            BClass::Vvv | BClass::Hvv | BClass::Hhh => ClassScaling::Zero,
            BClass::Vvh | BClass::Hvh | BClass::Vhh => ClassScaling::InverseLambda,
            BClass::Vhv | BClass::Hhv => ClassScaling::Constant,
        }
    }

    /// Factor multiplying the unstretched value at stretch `lambda`.
    pub fn factor(self, lambda: f64) -> f64 {
        match self.scaling() {
            ClassScaling::Zero => 0.0,
            ClassScaling::InverseLambda => 1.0 / lambda,
            ClassScaling::Constant => 1.0,
        }
    }
}

/// `⟨B^λ_s u, v⟩` straight from the bracket table, class by class:
///
/// | class | value at λ = 1 |
/// |---|---|
/// | `Vvh` | `½(⟨[H,X],Y⟩ + ⟨X,[H,Y]⟩)` |
/// | `Hvh` | `−½⟨[H,I],Y⟩` |
/// | `Vhv` | `−½(⟨[I,X],Z⟩ + ⟨X,[I,Z]⟩)` |
/// | `Hhv` | `½⟨[H,I],Z⟩` |
/// | `Vhh` | `−½⟨[I,J],X⟩` |
///
/// and zero on the other three, each scaled by [`BClass::factor`].
pub fn b_closed_form(f: &SubmersionFrame, lambda: f64) -> Result<ConnectionTensor> {
    check_lambda(lambda)?;
    Ok(ConnectionTensor::from_fn(f, TensorKind::Difference, Some(lambda), |node, s, u, v| {
        let br = |x, y, z| f.bracket(node, x, y, z);
        let class = BClass::of(f, s, u, v);
        let unit = match class {
            BClass::Vvh => 0.5 * (br(v, s, u) + br(v, u, s)),
            BClass::Hvh => -0.5 * br(s, v, u),
            BClass::Vhv => -0.5 * (br(u, s, v) + br(u, v, s)),
            BClass::Hhv => 0.5 * br(s, u, v),
            BClass::Vhh => -0.5 * br(u, v, s),
            BClass::Vvv | BClass::Hvv | BClass::Hhh => 0.0,
        };
        class.factor(lambda) * unit
    }))
}

/// `B̃ = lim B^λ`: the λ-independent classes, mapping `H → V` and `V → 0`.
pub fn limit_difference(f: &SubmersionFrame) -> ConnectionTensor {
    let b = b_tensor(f, 1.0).expect("λ = 1 is valid");
    ConnectionTensor::from_fn(f, TensorKind::LimitDifference, None, |node, s, u, v| {
        if BClass::of(f, s, u, v).scaling() == ClassScaling::Constant {
            b.get(node, s, u, v)
        } else {
            0.0
        }
    })
}

/// `∇̃^r = ∇^⊕ + B̃`.
pub fn adiabatic_limit(f: &SubmersionFrame) -> ConnectionTensor {
    direct_sum_connection(f)
        .zip(&limit_difference(f), TensorKind::AdiabaticLimit, None, |x, y| x + y)
        .expect("same frame")
}

/// Worst deviation per class of `B^λ` from `factor(λ) · B^1` over a λ grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub lambdas: Vec<f64>,
    /// `(class, worst |B^λ − factor(λ) B^1|, worst |B^1|)`.
    pub classes: Vec<(BClass, f64, f64)>,
    /// Worst deviation of `B^λ` from the closed form, all classes and λ.
    pub closed_form_residual: f64,
}

impl ScalingReport {
    pub fn worst(&self) -> f64 {
        self.classes.iter().fold(0.0f64, |m, c| m.max(c.1))
    }
}

pub fn scaling_check(f: &SubmersionFrame, lambdas: &[f64]) -> Result<ScalingReport> {
    let unit = b_tensor(f, 1.0)?;
    let n = f.total_dim();
    let mut classes: Vec<(BClass, f64, f64)> = BClass::ALL.iter().map(|&c| (c, 0.0, 0.0)).collect();
    let mut closed_form_residual: f64 = 0.0;
    for &lambda in lambdas {
        let b = b_tensor(f, lambda)?;
        closed_form_residual = closed_form_residual.max(b.distance(&b_closed_form(f, lambda)?)?);
        for node in 0..f.nodes() {
            for s in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        let class = BClass::of(f, s, u, v);
                        let slot = &mut classes[BClass::ALL.iter().position(|&c| c == class).expect("listed")];
                        let one = unit.get(node, s, u, v);
                        slot.1 = slot.1.max((b.get(node, s, u, v) - class.factor(lambda) * one).abs());
                        slot.2 = slot.2.max(one.abs());
                    }
                }
            }
        }
    }
    Ok(ScalingReport { lambdas: lambdas.to_vec(), classes, closed_form_residual })
}

/// Two-point look at `B^λ → B̃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtrapolationReport {
    pub lambdas: (f64, f64),
    /// `max |B^λ − B̃|` at each λ.
    pub errors: (f64, f64),
    /// `errors.0 / errors.1`, to compare with `λ₂ / λ₁` for a `1/λ` rate.
    pub ratio: f64,
    /// Richardson value `(λ₂ B^{λ₂} − λ₁ B^{λ₁}) / (λ₂ − λ₁)` against `B̃`.
    pub richardson_residual: f64,
}

impl ExtrapolationReport {
    /// Rate within a factor `slack` of `1/λ`.
    pub fn is_inverse_rate(&self, slack: f64) -> bool {
        let expected = self.lambdas.1 / self.lambdas.0;
        self.errors.1 == 0.0 && self.errors.0 == 0.0 || (self.ratio / expected > 1.0 / slack && self.ratio / expected < slack)
    }
}

pub fn limit_extrapolation(f: &SubmersionFrame, l1: f64, l2: f64) -> Result<ExtrapolationReport> {
    if l2 <= l1 {
        return Err(Error::InvalidParameter(format!("extrapolation needs λ₁ < λ₂, got {l1}, {l2}")));
    }
    let limit = limit_difference(f);
    let (b1, b2) = (b_tensor(f, l1)?, b_tensor(f, l2)?);
    let errors = (b1.distance(&limit)?, b2.distance(&limit)?);
    let rich = b2.zip(&b1, TensorKind::Difference, None, |y, x| (l2 * y - l1 * x) / (l2 - l1))?;
    Ok(ExtrapolationReport {
        lambdas: (l1, l2),
        errors,
        ratio: errors.0 / errors.1,
        richardson_residual: rich.distance(&limit)?,
    })
}
