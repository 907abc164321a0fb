//! One-dimensional quadrature and difference rules.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
///
/// Exact for polynomials of degree `2 * count - 1`.
pub fn gauss_legendre_unit(count: usize) -> Vec<(f64, f64)> {
    assert!(count >= 1, "at least one Gauss node");
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Boundary closure of the diagonal-norm SBP(4,2) first-derivative operator.
const SBP42_CLOSURE: [[f64; 6]; 4] = [
    [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
    [-0.5, 0.0, 0.5, 0.0, 0.0, 0.0],
    [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
    [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
];
const SBP42_NORM: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];
const CENTRAL4: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

/// A banded first-derivative operator on a non-periodic uniform axis.
///
/// `rows[i]` holds `(first_column, coefficients)` with spacing already
/// divided out. The operator and [`Self::norm`] satisfy summation by parts:
/// `Σ_i norm[i] (D f)_i = f[n-1] - f[0]` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SbpOperator {
    rows: Vec<(usize, Vec<f64>)>,
    norm: Vec<f64>,
}

impl SbpOperator {
    /// Builds the operator for `nodes` points with spacing `h`.
    ///
    /// Eight or more nodes give the SBP(4,2) pair; three to seven nodes fall
    /// back to SBP(2,1) (central interior, first-order closure, trapezoid).
    pub fn new(nodes: usize, h: f64) -> Self {
        assert!(nodes >= 2);
        if nodes >= 8 {
            let mut rows = Vec::with_capacity(nodes);
            for i in 0..nodes {
                let row = if i < 4 {
                    (0, SBP42_CLOSURE[i].iter().map(|c| c / h).collect())
                } else if i >= nodes - 4 {
                    let mirror = nodes - 1 - i;
                    let coeffs: Vec<f64> = SBP42_CLOSURE[mirror].iter().rev().map(|c| -c / h).collect();
                    (nodes - 6, coeffs)
                } else {
                    (i - 2, CENTRAL4.iter().map(|c| c / h).collect())
                };
                rows.push(row);
            }
            let mut norm = vec![h; nodes];
            for k in 0..4 {
                norm[k] = SBP42_NORM[k] * h;
                norm[nodes - 1 - k] = SBP42_NORM[k] * h;
            }
            Self { rows, norm }
        } else {
            let mut rows = Vec::with_capacity(nodes);
            for i in 0..nodes {
                let row = if i == 0 {
                    (0, vec![-1.0 / h, 1.0 / h])
                } else if i == nodes - 1 {
                    (nodes - 2, vec![-1.0 / h, 1.0 / h])
                } else {
                    (i - 1, vec![-0.5 / h, 0.0, 0.5 / h])
                };
                rows.push(row);
            }
            let mut norm = vec![h; nodes];
            norm[0] = 0.5 * h;
            norm[nodes - 1] = 0.5 * h;
            Self { rows, norm }
        }
    }

    /// Rows at each end that use a boundary closure instead of the interior
    /// stencil.
    pub fn closure_rows(nodes: usize) -> usize {
        if nodes >= 8 {
            4
        } else {
            1
        }
    }

    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        let (start, ref c) = self.rows[i];
        (start, c)
    }

    /// Diagonal norm, used as the axis quadrature weights.
    pub fn norm(&self) -> &[f64] {
        &self.norm
    }
}

/// Bernoulli numbers `B_0 ..= B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n + 1];
    b[0] = 1.0;
    for m in 1..=n {
        let mut acc = 0.0;
        let mut binom = 1.0; // C(m+1, k)
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += binom * bk;
            binom = binom * (m + 1 - k) as f64 / (k + 1) as f64;
        }
        b[m] = -acc / (m as f64 + 1.0);
    }
    b
}
