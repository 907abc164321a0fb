use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::form::MatrixForm;
use super::grid::ChartGrid;
use crate::{Error, Result, C64};

/// One weighted sample of a discrete cycle: the coefficient of component
/// `mask` at `node` enters the period with factor `weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleEntry {
    pub node: usize,
    pub mask: u32,
    pub weight: f64,
}

/// Discrete representative of a homology class of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    pub name: String,
    pub dim: usize,
    pub entries: Vec<CycleEntry>,
}

impl Cycle {
    /// The whole chart with its quadrature weights.
    pub fn fundamental(grid: &ChartGrid, orientation: f64) -> Self {
        let mask = (1u32 << grid.dim()) - 1;
        let entries = (0..grid.len())
            .map(|node| CycleEntry { node, mask, weight: orientation * grid.quad_weight(node) })
            .collect();
        Self { name: "fundamental".into(), dim: grid.dim(), entries }
    }

    /// The coordinate sub-torus through the node with `index` spanned by the
    /// `free` axes (increasing), weighted by the unmasked axis weights.
    pub fn coordinate_slice(grid: &ChartGrid, index: &[usize], free: &[usize], orientation: f64) -> Self {
        let mask = super::form::mask_of(free);
        let mut entries = Vec::new();
        let count: usize = free.iter().map(|&k| grid.axis(k).nodes).product();
        let mut idx = index.to_vec();
        for flat in 0..count {
            let mut rest = flat;
            let mut w = orientation;
            for &k in free.iter().rev() {
                let n = grid.axis(k).nodes;
                idx[k] = rest % n;
                rest /= n;
                w *= grid.axis_weights(k)[idx[k]];
            }
            entries.push(CycleEntry { node: grid.node_of(&idx), mask, weight: w });
        }
        let name = format!("slice{free:?}@{index:?}");
        Self { name, dim: free.len(), entries }
    }

    /// The 0-cycle at one node.
    pub fn point(node: usize) -> Self {
        Self { name: format!("point@{node}"), dim: 0, entries: alloc::vec![CycleEntry { node, mask: 0, weight: 1.0 }] }
    }

    /// Cross product of cycles on the two factors of a product chart.
    pub fn cross(a: &Self, first_dim: usize, b: &Self, second_len: usize) -> Self {
        let mut entries = Vec::with_capacity(a.entries.len() * b.entries.len());
        for x in &a.entries {
            for y in &b.entries {
                entries.push(CycleEntry {
                    node: x.node * second_len + y.node,
                    mask: x.mask | (y.mask << first_dim),
                    weight: x.weight * y.weight,
                });
            }
        }
        Self { name: format!("{}x{}", a.name, b.name), dim: a.dim + b.dim, entries }
    }

    /// `∫_cycle form` for a scalar form of matching degree.
    pub fn period(&self, form: &MatrixForm) -> Result<C64> {
        if form.degree() != self.dim {
            return Err(Error::DegreeMismatch { expected: self.dim, found: form.degree() });
        }
        if form.rank() != 1 {
            return Err(Error::RankMismatch { left: form.rank(), right: 1 });
        }
        Ok(self.entries.iter().map(|e| form.scalar(e.node, e.mask) * e.weight).sum())
    }
}

/// Generators of the homology of a catalog chart, all degrees mixed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CycleBasis {
    pub cycles: Vec<Cycle>,
}

impl CycleBasis {
    pub fn new(cycles: Vec<Cycle>) -> Self {
        Self { cycles }
    }

    pub fn of_dim(&self, dim: usize) -> impl Iterator<Item = &Cycle> {
        self.cycles.iter().filter(move |c| c.dim == dim)
    }

    /// Periods of `form` over every cycle of its degree, in basis order.
    pub fn periods(&self, form: &MatrixForm) -> Result<Vec<C64>> {
        self.of_dim(form.degree()).map(|c| c.period(form)).collect()
    }

    /// Largest absolute period of `form`.
    pub fn max_period(&self, form: &MatrixForm) -> Result<f64> {
        Ok(self.periods(form)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{exterior_d, Axis};
    use alloc::sync::Arc;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn slice_periods_of_coordinate_forms() {
        let g = Arc::new(
            ChartGrid::new(vec![Axis::periodic(8, 0.0, 1.0), Axis::periodic(6, 0.0, 2.0), Axis::periodic(5, 0.0, 3.0)])
                .unwrap(),
        );
        let c = Cycle::coordinate_slice(&g, &[3, 0, 2], &[0, 2], 1.0);
        let f = MatrixForm::coordinate(g.clone(), &[0, 2]);
        assert_relative_eq!(c.period(&f).unwrap().re, 3.0, epsilon = 1e-13);
        let other = MatrixForm::coordinate(g, &[0, 1]);
        assert_eq!(c.period(&other).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn exact_forms_have_zero_periods() {
        let g = Arc::new(ChartGrid::new(vec![Axis::periodic(12, 0.0, 1.0), Axis::periodic(12, 0.0, 1.0)]).unwrap());
        let f = MatrixForm::scalar_fn(g.clone(), 0, |x, _| C64::new((6.3 * x[0]).sin() * x[1].cos(), 0.0));
        let df = exterior_d(&f).unwrap();
        let basis = CycleBasis::new(vec![
            Cycle::coordinate_slice(&g, &[0, 4], &[0], 1.0),
            Cycle::coordinate_slice(&g, &[7, 0], &[1], 1.0),
        ]);
        assert!(basis.max_period(&df).unwrap() < 1e-14);
    }
}
