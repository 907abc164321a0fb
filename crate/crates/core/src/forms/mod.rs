//! Matrix-valued differential forms on single-chart tensor grids.

mod cycles;
mod form;
mod grid;
mod maps;

pub use cycles::{Cycle, CycleBasis, CycleEntry};
pub use form::{
    component_masks, exterior_d, graded_commutator, integrate, mask_of, trace, wedge, wedge_sign, MatrixForm,
    MixedForm,
};
pub use grid::{Axis, AxisKind, ChartGrid};
pub use maps::{fiber_integrate, pullback_first, pullback_second, restrict_to_face, Side};
