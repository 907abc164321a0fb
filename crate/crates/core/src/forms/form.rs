use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::grid::{AxisKind, ChartGrid};
use crate::linalg;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Index sets of size `degree` in `0..dim`, as bitmasks in increasing order.
pub fn component_masks(dim: usize, degree: usize) -> Vec<u32> {
    if degree > dim {
        return Vec::new();
    }
    (0u32..(1 << dim)).filter(|m| m.count_ones() as usize == degree).collect()
}

/// Sign of `dx_I ∧ dx_J` relative to `dx_{I ∪ J}`, or `None` if they overlap.
pub fn wedge_sign(i: u32, j: u32) -> Option<f64> {
    if i & j != 0 {
        return None;
    }
    let mut inversions = 0;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inversions += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

pub fn mask_of(indices: &[usize]) -> u32 {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

/// A degree-`p` differential form with `rank × rank` complex matrix
/// coefficients, sampled on every node of a chart grid.
///
/// Only increasing index tuples are stored. Layout is
/// `data[(component * nodes + node) * rank² + entry]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixForm {
    grid: Arc<ChartGrid>,
    degree: usize,
    rank: usize,
    comps: Vec<u32>,
    data: Vec<C64>,
}

impl MatrixForm {
    pub fn zeros(grid: Arc<ChartGrid>, degree: usize, rank: usize) -> Self {
        assert!(rank >= 1, "rank must be positive");
        let comps = component_masks(grid.dim(), degree);
        let data = vec![ZERO; comps.len() * grid.len() * rank * rank];
        Self { grid, degree, rank, comps, data }
    }

    /// Builds a form from `fill(coords, component, out)`, which writes the
    /// row-major coefficient matrix of `component` at the node with `coords`.
    pub fn from_fn(
        grid: Arc<ChartGrid>,
        degree: usize,
        rank: usize,
        mut fill: impl FnMut(&[f64], u32, &mut [C64]),
    ) -> Self {
        let mut out = Self::zeros(grid, degree, rank);
        let w = rank * rank;
        let n = out.grid.len();
        let mut coords = vec![0.0; out.grid.dim()];
        for (c, &mask) in out.comps.iter().enumerate() {
            for node in 0..n {
                for (k, x) in coords.iter_mut().enumerate() {
                    *x = out.grid.coord(node, k);
                }
                let start = (c * n + node) * w;
                fill(&coords, mask, &mut out.data[start..start + w]);
            }
        }
        out
    }

    /// Scalar form from `f(coords, component)`.
    pub fn scalar_fn(grid: Arc<ChartGrid>, degree: usize, mut f: impl FnMut(&[f64], u32) -> C64) -> Self {
        Self::from_fn(grid, degree, 1, |x, m, out| out[0] = f(x, m))
    }

    pub fn constant(grid: Arc<ChartGrid>, value: C64) -> Self {
        Self::scalar_fn(grid, 0, |_, _| value)
    }

    /// The constant `rank × rank` identity 0-form.
    pub fn identity(grid: Arc<ChartGrid>, rank: usize) -> Self {
        let id = linalg::identity(rank);
        Self::from_fn(grid, 0, rank, |_, _, out| out.copy_from_slice(&id))
    }

    /// The constant scalar form `dx_{i1} ∧ … ∧ dx_{ip}` for increasing `axes`.
    pub fn coordinate(grid: Arc<ChartGrid>, axes: &[usize]) -> Self {
        let mask = mask_of(axes);
        Self::scalar_fn(grid, axes.len(), |_, m| if m == mask { C64::new(1.0, 0.0) } else { ZERO })
    }

    /// Raw constructor from already laid out data.
    pub fn from_data(grid: Arc<ChartGrid>, degree: usize, rank: usize, data: Vec<C64>) -> Result<Self> {
        let comps = component_masks(grid.dim(), degree);
        let expected = comps.len() * grid.len() * rank * rank;
        if data.len() != expected {
            return Err(Error::InvalidParameter(alloc::format!(
                "form data has {} entries, {expected} expected",
                data.len()
            )));
        }
        Ok(Self { grid, degree, rank, comps, data })
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn component_masks(&self) -> &[u32] {
        &self.comps
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    fn width(&self) -> usize {
        self.rank * self.rank
    }

    pub fn component_index(&self, mask: u32) -> Option<usize> {
        self.comps.binary_search(&mask).ok()
    }

    /// Coefficient field of one component: `nodes × rank²` entries.
    pub fn component(&self, mask: u32) -> Option<&[C64]> {
        let c = self.component_index(mask)?;
        let span = self.grid.len() * self.width();
        Some(&self.data[c * span..(c + 1) * span])
    }

    pub fn component_mut(&mut self, mask: u32) -> Option<&mut [C64]> {
        let c = self.component_index(mask)?;
        let span = self.grid.len() * self.width();
        Some(&mut self.data[c * span..(c + 1) * span])
    }

    /// Coefficient matrix at `node` for `mask`; zero-length if absent.
    pub fn coeff(&self, node: usize, mask: u32) -> &[C64] {
        match self.component_index(mask) {
            Some(c) => {
                let w = self.width();
                let start = (c * self.grid.len() + node) * w;
                &self.data[start..start + w]
            }
            None => &[],
        }
    }

    /// Scalar coefficient at `node` for `mask` (entry (0,0)); zero if absent.
    pub fn scalar(&self, node: usize, mask: u32) -> C64 {
        self.coeff(node, mask).first().copied().unwrap_or(ZERO)
    }

    pub fn is_scalar(&self) -> bool {
        self.rank == 1
    }

    pub fn max_norm(&self) -> f64 {
        linalg::max_abs(&self.data)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (o, y) in out.data.iter_mut().zip(&other.data) {
            *o = a * *o + b * y;
        }
        Ok(out)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: C64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (o, y) in self.data.iter_mut().zip(&other.data) {
            *o += s * y;
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Max-norm distance to `other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    }

    /// Same form on an equal grid held by another `Arc`.
    pub fn rebind(&self, grid: Arc<ChartGrid>) -> Result<Self> {
        if !grid.same_nodes(&self.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, ..self.clone() })
    }

    /// Embeds a scalar form as `value · identity` of the given rank.
    pub fn scalar_to_rank(&self, rank: usize) -> Result<Self> {
        if self.rank != 1 {
            return Err(Error::RankMismatch { left: self.rank, right: 1 });
        }
        let mut out = Self::zeros(self.grid.clone(), self.degree, rank);
        let w = rank * rank;
        for (idx, z) in self.data.iter().enumerate() {
            for i in 0..rank {
                out.data[idx * w + i * rank + i] = *z;
            }
        }
        Ok(out)
    }

    /// Block-diagonal direct sum of two forms of equal degree.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let (n, m) = (self.rank, other.rank);
        let s = n + m;
        let mut out = Self::zeros(self.grid.clone(), self.degree, s);
        let slots = self.comps.len() * self.grid.len();
        for idx in 0..slots {
            let block = linalg::direct_sum(
                &self.data[idx * n * n..(idx + 1) * n * n],
                n,
                &other.data[idx * m * m..(idx + 1) * m * m],
                m,
            );
            out.data[idx * s * s..(idx + 1) * s * s].copy_from_slice(&block);
        }
        Ok(out)
    }

    /// `self ⊗ 1 + 1 ⊗ other` for two 1-forms: the tensor-product connection
    /// potential. Degree must agree.
    pub fn tensor_sum(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let (n, m) = (self.rank, other.rank);
        let s = n * m;
        let id_n = linalg::identity(n);
        let id_m = linalg::identity(m);
        let mut out = Self::zeros(self.grid.clone(), self.degree, s);
        let slots = self.comps.len() * self.grid.len();
        for idx in 0..slots {
            let a = linalg::kron(&self.data[idx * n * n..(idx + 1) * n * n], n, &id_m, m);
            let b = linalg::kron(&id_n, n, &other.data[idx * m * m..(idx + 1) * m * m], m);
            for (k, o) in out.data[idx * s * s..(idx + 1) * s * s].iter_mut().enumerate() {
                *o = a[k] + b[k];
            }
        }
        Ok(out)
    }
}

/// Wedge product with matrix multiplication of coefficients.
///
/// A rank-1 factor acts as a central scalar.
pub fn wedge(a: &MatrixForm, b: &MatrixForm) -> Result<MatrixForm> {
    if !Arc::ptr_eq(&a.grid, &b.grid) && !a.grid.same_nodes(&b.grid) {
        return Err(Error::GridMismatch);
    }
    let rank = match (a.rank, b.rank) {
        (x, y) if x == y => x,
        (1, y) => y,
        (x, 1) => x,
        (x, y) => return Err(Error::RankMismatch { left: x, right: y }),
    };
    let dim = a.grid.dim();
    let mut out = MatrixForm::zeros(a.grid.clone(), a.degree + b.degree, rank);
    if a.degree + b.degree > dim {
        return Ok(out);
    }
    let n = a.grid.len();
    let (wa, wb, w) = (a.width(), b.width(), rank * rank);
    for (ci, &mi) in a.comps.iter().enumerate() {
        for (cj, &mj) in b.comps.iter().enumerate() {
            let Some(sign) = wedge_sign(mi, mj) else { continue };
            let co = out.component_index(mi | mj).expect("union has the output degree");
            let s = C64::new(sign, 0.0);
            for node in 0..n {
                let x = &a.data[(ci * n + node) * wa..(ci * n + node + 1) * wa];
                let y = &b.data[(cj * n + node) * wb..(cj * n + node + 1) * wb];
                let o = &mut out.data[(co * n + node) * w..(co * n + node + 1) * w];
                match (a.rank == rank, b.rank == rank) {
                    (true, true) => linalg::mul_acc(o, x, y, rank, s),
                    (false, _) => {
                        let f = s * x[0];
                        o.iter_mut().zip(y).for_each(|(o, y)| *o += f * y);
                    }
                    (_, false) => {
                        let f = s * y[0];
                        o.iter_mut().zip(x).for_each(|(o, x)| *o += f * x);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Graded commutator `a ∧ b − (−1)^{pq} b ∧ a`.
pub fn graded_commutator(a: &MatrixForm, b: &MatrixForm) -> Result<MatrixForm> {
    let ab = wedge(a, b)?;
    let ba = wedge(b, a)?;
    let sign = if (a.degree * b.degree).is_multiple_of(2) { -1.0 } else { 1.0 };
    ab.combine(C64::new(1.0, 0.0), &ba, C64::new(sign, 0.0))
}

/// Accumulates `scale · ∂_k field` into `out`; `width` entries per node.
fn add_derivative(grid: &ChartGrid, k: usize, field: &[C64], width: usize, scale: f64, out: &mut [C64]) {
    let axis = grid.axis(k);
    let stride = grid.stride(k);
    let n = axis.nodes;
    match axis.kind {
        AxisKind::Periodic => {
            let c = scale / (2.0 * axis.spacing());
            for node in 0..grid.len() {
                let i = grid.index_along(node, k);
                let base = node - i * stride;
                let ip = base + ((i + 1) % n) * stride;
                let im = base + ((i + n - 1) % n) * stride;
                for e in 0..width {
                    out[node * width + e] += c * (field[ip * width + e] - field[im * width + e]);
                }
            }
        }
        AxisKind::Interval => {
            let op = grid.operator(k).expect("interval axes carry an operator");
            for node in 0..grid.len() {
                let i = grid.index_along(node, k);
                let base = node - i * stride;
                let (start, coeffs) = op.row(i);
                for (j, cj) in coeffs.iter().enumerate() {
                    if *cj == 0.0 {
                        continue;
                    }
                    let src = base + (start + j) * stride;
                    let f = cj * scale;
                    for e in 0..width {
                        out[node * width + e] += f * field[src * width + e];
                    }
                }
            }
        }
    }
}

/// Exterior derivative `d(f dx_I) = Σ_k ∂_k f dx_k ∧ dx_I`.
///
/// Periodic axes use second-order central differences; interval axes use the
/// summation-by-parts operator of [`crate::quadrature::SbpOperator`]. Top-degree
/// input gives the zero form of degree `dim + 1`.
pub fn exterior_d(a: &MatrixForm) -> Result<MatrixForm> {
    let grid = a.grid.clone();
    let mut out = MatrixForm::zeros(grid.clone(), a.degree + 1, a.rank);
    if a.degree >= grid.dim() {
        return Ok(out);
    }
    for k in 0..grid.dim() {
        let nodes = grid.axis(k).nodes;
        if nodes < 3 {
            return Err(Error::TooFewNodes { axis: k, nodes, required: 3 });
        }
    }
    let w = a.width();
    for &mi in &a.comps {
        let field = a.component(mi).expect("own component");
        for k in 0..grid.dim() {
            if mi & (1 << k) != 0 {
                continue;
            }
            let below = (mi & ((1 << k) - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            let target = out.component_mut(mi | (1 << k)).expect("degree p+1 component");
            add_derivative(&grid, k, field, w, sign, target);
        }
    }
    Ok(out)
}

/// Coefficient-wise matrix trace; the result is scalar.
pub fn trace(a: &MatrixForm) -> MatrixForm {
    let r = a.rank;
    let mut out = MatrixForm::zeros(a.grid.clone(), a.degree, 1);
    for (o, m) in out.data.iter_mut().zip(a.data.chunks_exact(r * r)) {
        *o = linalg::trace(m, r);
    }
    out
}

/// Quadrature of a scalar top-degree form over the whole chart.
pub fn integrate(a: &MatrixForm) -> Result<C64> {
    let dim = a.grid.dim();
    if a.degree != dim {
        return Err(Error::DegreeMismatch { expected: dim, found: a.degree });
    }
    if a.rank != 1 {
        return Err(Error::RankMismatch { left: a.rank, right: 1 });
    }
    Ok((0..a.grid.len()).map(|node| a.data[node] * a.grid.quad_weight(node)).sum())
}

/// Forms of mixed degree `0..=dim` sharing one grid and rank.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedForm {
    parts: Vec<MatrixForm>,
}

impl MixedForm {
    pub fn zeros(grid: Arc<ChartGrid>, rank: usize) -> Self {
        let parts = (0..=grid.dim()).map(|p| MatrixForm::zeros(grid.clone(), p, rank)).collect();
        Self { parts }
    }

    /// Mixed form with a single homogeneous part.
    pub fn from_part(part: MatrixForm) -> Self {
        let mut out = Self::zeros(part.grid.clone(), part.rank);
        if part.degree < out.parts.len() {
            let p = part.degree;
            out.parts[p] = part;
        }
        out
    }

    pub fn grid(&self) -> &Arc<ChartGrid> {
        self.parts[0].grid()
    }

    pub fn rank(&self) -> usize {
        self.parts[0].rank
    }

    pub fn part(&self, p: usize) -> &MatrixForm {
        &self.parts[p]
    }

    pub fn parts(&self) -> &[MatrixForm] {
        &self.parts
    }

    pub fn set_part(&mut self, part: MatrixForm) -> Result<()> {
        let p = part.degree;
        if p >= self.parts.len() {
            return Ok(());
        }
        self.parts[p].check_same(&part)?;
        self.parts[p] = part;
        Ok(())
    }

    /// Top-degree part.
    pub fn top(&self) -> &MatrixForm {
        self.parts.last().expect("degree 0 always present")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let parts = self.parts.iter().zip(&other.parts).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Self { parts })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { parts: self.parts.iter().map(|p| p.scale(s)).collect() }
    }

    /// Wedge product truncated at the grid dimension.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let rank = match (self.rank(), other.rank()) {
            (x, y) if x == y => x,
            (1, y) => y,
            (x, 1) => x,
            (x, y) => return Err(Error::RankMismatch { left: x, right: y }),
        };
        let mut out = Self::zeros(self.grid().clone(), rank);
        let dim = self.parts.len() - 1;
        for (p, a) in self.parts.iter().enumerate() {
            if a.max_norm() == 0.0 {
                continue;
            }
            for (q, b) in other.parts.iter().enumerate() {
                if p + q > dim || b.max_norm() == 0.0 {
                    continue;
                }
                let ab = wedge(a, b)?;
                out.parts[p + q].add_scaled(C64::new(1.0, 0.0), &ab)?;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Self {
        Self { parts: self.parts.iter().map(trace).collect() }
    }

    pub fn max_norm(&self) -> f64 {
        self.parts.iter().map(MatrixForm::max_norm).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        let mut d: f64 = 0.0;
        for (a, b) in self.parts.iter().zip(&other.parts) {
            d = d.max(a.distance(b)?);
        }
        Ok(d)
    }
}
