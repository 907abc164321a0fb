use alloc::sync::Arc;

use super::form::MatrixForm;
use super::grid::ChartGrid;
use crate::{Error, Result};

fn check_product(product: &ChartGrid, first: &ChartGrid, second: &ChartGrid) -> Result<()> {
    let d1 = first.dim();
    let ok = product.dim() == d1 + second.dim()
        && product.axes()[..d1] == *first.axes()
        && product.axes()[d1..] == *second.axes();
    if ok {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Pullback along the projection of `first × second` onto `first`.
pub fn pullback_first(a: &MatrixForm, product: &Arc<ChartGrid>, second: &ChartGrid) -> Result<MatrixForm> {
    check_product(product, a.grid(), second)?;
    let len2 = second.len();
    let w = a.rank() * a.rank();
    let mut out = MatrixForm::zeros(product.clone(), a.degree(), a.rank());
    for &m in a.component_masks() {
        let src = a.component(m).expect("own component");
        let dst = out.component_mut(m).expect("same mask on the product");
        for (node, chunk) in dst.chunks_exact_mut(w).enumerate() {
            let n1 = node / len2;
            chunk.copy_from_slice(&src[n1 * w..(n1 + 1) * w]);
        }
    }
    Ok(out)
}

/// Pullback along the projection of `first × second` onto `second`.
pub fn pullback_second(a: &MatrixForm, product: &Arc<ChartGrid>, first: &ChartGrid) -> Result<MatrixForm> {
    check_product(product, first, a.grid())?;
    let (d1, len2) = (first.dim(), a.grid().len());
    let w = a.rank() * a.rank();
    let mut out = MatrixForm::zeros(product.clone(), a.degree(), a.rank());
    for &m in a.component_masks() {
        let src = a.component(m).expect("own component");
        let dst = out.component_mut(m << d1).expect("shifted mask on the product");
        for (node, chunk) in dst.chunks_exact_mut(w).enumerate() {
            let n2 = node % len2;
            chunk.copy_from_slice(&src[n2 * w..(n2 + 1) * w]);
        }
    }
    Ok(out)
}

/// Integration over the fibre of `base × fiber → base`.
///
/// Only components containing every vertical axis survive; since vertical
/// axes come last, `α ∧ dv` integrates to `α ∫ v` with no sign, so
/// `I(π*α ∧ β) = α ∧ I(β)` holds exactly at the discrete level.
pub fn fiber_integrate(a: &MatrixForm, base: &Arc<ChartGrid>, fiber: &ChartGrid) -> Result<MatrixForm> {
    check_product(a.grid(), base, fiber)?;
    if a.rank() != 1 {
        return Err(Error::RankMismatch { left: a.rank(), right: 1 });
    }
    let (db, df) = (base.dim(), fiber.dim());
    let vertical = ((1u32 << df) - 1) << db;
    if a.degree() < df {
        return Ok(MatrixForm::zeros(base.clone(), 0, 1));
    }
    let mut out = MatrixForm::zeros(base.clone(), a.degree() - df, 1);
    let len_f = fiber.len();
    for &m in a.component_masks() {
        if m & vertical != vertical {
            continue;
        }
        let src = a.component(m).expect("own component");
        let dst = out.component_mut(m & !vertical).expect("base component");
        for (nb, o) in dst.iter_mut().enumerate() {
            *o = (0..len_f).map(|nf| src[nb * len_f + nf] * fiber.quad_weight(nf)).sum();
        }
    }
    Ok(out)
}

/// Which end of an interval axis a face sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// Restriction to the face `axis = lo` or `axis = hi` of an interval axis.
///
/// Components containing `d axis` vanish on the face and are dropped.
pub fn restrict_to_face(a: &MatrixForm, face_grid: &Arc<ChartGrid>, axis: usize, side: Side) -> Result<MatrixForm> {
    let g = a.grid();
    if axis >= g.dim() || g.axis(axis).is_periodic() {
        return Err(Error::InvalidParameter(alloc::format!("axis {axis} has no face")));
    }
    let expected = g.without_axis(axis)?;
    if !expected.same_nodes(face_grid) {
        return Err(Error::GridMismatch);
    }
    let fixed = match side {
        Side::Lo => 0,
        Side::Hi => g.axis(axis).nodes - 1,
    };
    let w = a.rank() * a.rank();
    let mut out = MatrixForm::zeros(face_grid.clone(), a.degree(), a.rank());
    let low = (1u32 << axis) - 1;
    for &m in a.component_masks() {
        if m & (1 << axis) != 0 {
            continue;
        }
        let fm = (m & low) | ((m >> 1) & !low);
        let src = a.component(m).expect("own component");
        let dst = out.component_mut(fm).expect("face component");
        for (fnode, chunk) in dst.chunks_exact_mut(w).enumerate() {
            let mut idx = face_grid.multi_index(fnode);
            idx.insert(axis, fixed);
            let node = g.node_of(&idx);
            chunk.copy_from_slice(&src[node * w..(node + 1) * w]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{wedge, Axis};
    use crate::C64;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn projection_formula_is_exact() {
        let base = Arc::new(ChartGrid::new(vec![Axis::periodic(6, 0.0, 1.0)]).unwrap());
        let fiber = Arc::new(ChartGrid::new(vec![Axis::interval(9, 0.0, 2.0), Axis::periodic(5, 0.0, 1.0)]).unwrap());
        let total = Arc::new(base.product(&fiber).unwrap());
        let alpha = MatrixForm::scalar_fn(base.clone(), 1, |x, _| C64::new((6.0 * x[0]).cos(), 0.0));
        let beta = MatrixForm::scalar_fn(total.clone(), 2, |x, m| C64::new(x[0] + x[1] * x[2] + m as f64, 0.5));
        let lhs = fiber_integrate(&wedge(&pullback_first(&alpha, &total, &fiber).unwrap(), &beta).unwrap(), &base, &fiber)
            .unwrap();
        let rhs = wedge(&alpha, &fiber_integrate(&beta, &base, &fiber).unwrap()).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-13);
    }

    #[test]
    fn fiber_volume() {
        let base = Arc::new(ChartGrid::new(vec![Axis::periodic(4, 0.0, 1.0)]).unwrap());
        let fiber = Arc::new(ChartGrid::new(vec![Axis::periodic(7, 0.0, 3.0)]).unwrap());
        let total = Arc::new(base.product(&fiber).unwrap());
        let dv = MatrixForm::coordinate(total, &[1]);
        let i = fiber_integrate(&dv, &base, &fiber).unwrap();
        assert_relative_eq!(i.scalar(2, 0).re, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn face_restriction_drops_normal_components() {
        let g = Arc::new(ChartGrid::new(vec![Axis::interval(5, 0.0, 1.0), Axis::periodic(4, 0.0, 1.0)]).unwrap());
        let face = Arc::new(g.without_axis(0).unwrap());
        let a = MatrixForm::scalar_fn(g.clone(), 1, |x, m| C64::new(if m == 0b10 { x[0] } else { 7.0 }, 0.0));
        let r = restrict_to_face(&a, &face, 0, Side::Hi).unwrap();
        assert_eq!(r.scalar(1, 0b1), C64::new(1.0, 0.0));
        assert!(restrict_to_face(&a, &face, 1, Side::Lo).is_err());
    }
}
