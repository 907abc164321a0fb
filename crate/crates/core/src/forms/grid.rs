use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::quadrature::SbpOperator;
use crate::{Error, Result};

/// Boundary behaviour of one chart axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisKind {
    /// `[lo, hi)` with `hi` identified with `lo`; nodes exclude `hi`.
    Periodic,
    /// `[lo, hi]` with nodes on both endpoints.
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub nodes: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Axis {
    pub fn periodic(nodes: usize, lo: f64, hi: f64) -> Self {
        Self { kind: AxisKind::Periodic, nodes, lo, hi }
    }

    pub fn interval(nodes: usize, lo: f64, hi: f64) -> Self {
        Self { kind: AxisKind::Interval, nodes, lo, hi }
    }

    pub fn is_periodic(&self) -> bool {
        self.kind == AxisKind::Periodic
    }

    pub fn spacing(&self) -> f64 {
        match self.kind {
            AxisKind::Periodic => (self.hi - self.lo) / self.nodes as f64,
            AxisKind::Interval => (self.hi - self.lo) / (self.nodes - 1) as f64,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    fn validate(&self, index: usize) -> Result<()> {
        let ok_extent = self.hi.is_finite() && self.lo.is_finite() && self.hi > self.lo;
        if !ok_extent {
            return Err(Error::InvalidGrid(format!("axis {index}: extent [{}, {}] is empty", self.lo, self.hi)));
        }
        let min = match self.kind {
            AxisKind::Periodic => 1,
            AxisKind::Interval => 2,
        };
        if self.nodes < min {
            return Err(Error::InvalidGrid(format!("axis {index}: {} nodes", self.nodes)));
        }
        Ok(())
    }
}

/// Tensor-product grid over a single chart.
///
/// Nodes are stored row-major with axis 0 slowest. Quadrature weights are the
/// product of per-axis weights (trapezoid on periodic axes, the SBP norm on
/// interval axes) times an optional per-node mask in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartGrid {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    len: usize,
    axis_weights: Vec<Vec<f64>>,
    operators: Vec<Option<SbpOperator>>,
    mask: Option<Vec<f64>>,
}

impl ChartGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one axis".into()));
        }
        if axes.len() > 16 {
            return Err(Error::InvalidGrid(format!("{} axes exceed the supported 16", axes.len())));
        }
        for (i, a) in axes.iter().enumerate() {
            a.validate(i)?;
        }
        let mut strides = vec![1; axes.len()];
        for k in (0..axes.len() - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].nodes;
        }
        let len = strides[0] * axes[0].nodes;
        let mut axis_weights = Vec::with_capacity(axes.len());
        let mut operators = Vec::with_capacity(axes.len());
        for a in &axes {
            match a.kind {
                AxisKind::Periodic => {
                    axis_weights.push(vec![a.spacing(); a.nodes]);
                    operators.push(None);
                }
                AxisKind::Interval => {
                    let op = SbpOperator::new(a.nodes, a.spacing());
                    axis_weights.push(op.norm().to_vec());
                    operators.push(Some(op));
                }
            }
        }
        Ok(Self { axes, strides, len, axis_weights, operators, mask: None })
    }

    /// Multiplies the quadrature weights by `mask` (one entry per node).
    pub fn with_mask(mut self, mask: Vec<f64>) -> Result<Self> {
        if mask.len() != self.len {
            return Err(Error::InvalidGrid(format!("mask has {} entries for {} nodes", mask.len(), self.len)));
        }
        self.mask = Some(mask);
        self.validate_weights()?;
        Ok(self)
    }

    /// Checks that all weights are finite and non-negative with positive sum.
    pub fn validate_weights(&self) -> Result<()> {
        let mut total = 0.0;
        for node in 0..self.len {
            let w = self.quad_weight(node);
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvariantViolation {
                    check: "quadrature weights non-negative",
                    detail: format!("node {node} has weight {w}"),
                });
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::InvariantViolation {
                check: "quadrature weights non-negative",
                detail: "weights sum to zero".into(),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn resolution(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.nodes).collect()
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.axes[k].spacing()
    }

    /// Largest spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(0.0, f64::max)
    }

    pub fn axis_weights(&self, k: usize) -> &[f64] {
        &self.axis_weights[k]
    }

    pub(crate) fn operator(&self, k: usize) -> Option<&SbpOperator> {
        self.operators[k].as_ref()
    }

    pub fn mask(&self) -> Option<&[f64]> {
        self.mask.as_deref()
    }

    pub fn index_along(&self, node: usize, k: usize) -> usize {
        (node / self.strides[k]) % self.axes[k].nodes
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        (0..self.dim()).map(|k| self.index_along(node, k)).collect()
    }

    pub fn node_of(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        (0..self.dim()).map(|k| self.axes[k].coord(self.index_along(node, k))).collect()
    }

    pub fn coord(&self, node: usize, k: usize) -> f64 {
        self.axes[k].coord(self.index_along(node, k))
    }

    /// Product of the per-axis weights, before masking.
    pub fn base_weight(&self, node: usize) -> f64 {
        (0..self.dim()).map(|k| self.axis_weights[k][self.index_along(node, k)]).product()
    }

    pub fn quad_weight(&self, node: usize) -> f64 {
        let w = self.base_weight(node);
        match &self.mask {
            Some(m) => w * m[node],
            None => w,
        }
    }

    /// True when every interval axis differentiates at `node` with its
    /// interior stencil rather than a boundary closure.
    pub fn is_stencil_interior(&self, node: usize) -> bool {
        self.axes.iter().enumerate().all(|(k, axis)| {
            let i = self.index_along(node, k);
            let rows = SbpOperator::closure_rows(axis.nodes);
            axis.is_periodic() || (i >= rows && i + rows < axis.nodes)
        })
    }

    /// Sum of the weights of all nodes: the coordinate volume of the chart.
    pub fn total_weight(&self) -> f64 {
        (0..self.len).map(|n| self.quad_weight(n)).sum()
    }

    /// True when the two grids sample the same chart at the same nodes.
    pub fn same_nodes(&self, other: &Self) -> bool {
        self.axes == other.axes
    }

    /// Grid of the product chart, `self` axes first.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut axes = self.axes.clone();
        axes.extend_from_slice(&other.axes);
        let grid = Self::new(axes)?;
        match (&self.mask, &other.mask) {
            (None, None) => Ok(grid),
            _ => {
                let n2 = other.len;
                let mask = (0..grid.len)
                    .map(|node| {
                        let m1 = self.mask.as_ref().map_or(1.0, |m| m[node / n2]);
                        let m2 = other.mask.as_ref().map_or(1.0, |m| m[node % n2]);
                        m1 * m2
                    })
                    .collect();
                grid.with_mask(mask)
            }
        }
    }

    /// Grid with axis `k` removed.
    pub fn without_axis(&self, k: usize) -> Result<Self> {
        let mut axes = self.axes.clone();
        axes.remove(k);
        Self::new(axes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn periodic_weights_sum_to_the_length() {
        let g = ChartGrid::new(vec![Axis::periodic(10, 0.0, 1.0), Axis::periodic(7, 0.0, 2.0)]).unwrap();
        assert_relative_eq!(g.total_weight(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn interval_weights_sum_to_the_length() {
        for n in [3usize, 5, 8, 33] {
            let g = ChartGrid::new(vec![Axis::interval(n, 0.5, 2.0)]).unwrap();
            assert_relative_eq!(g.total_weight(), 1.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn node_indexing_round_trips() {
        let g = ChartGrid::new(vec![Axis::periodic(3, 0.0, 1.0), Axis::interval(4, 0.0, 1.0), Axis::periodic(5, 0.0, 1.0)])
            .unwrap();
        for node in 0..g.len() {
            assert_eq!(g.node_of(&g.multi_index(node)), node);
        }
        assert_eq!(g.stride(0), 20);
    }

    #[test]
    fn negative_mask_is_rejected() {
        let g = ChartGrid::new(vec![Axis::periodic(4, 0.0, 1.0)]).unwrap();
        let err = g.with_mask(vec![1.0, -1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { .. }));
    }
}
