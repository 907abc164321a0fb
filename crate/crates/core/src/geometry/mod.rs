//! Catalog of example geometries with cycles, fillings and fibrations.

mod catalog;
pub mod profile;
mod spec;
mod zn;

pub use catalog::{
    catalog, circle, cp1_tangent, cylinder, default_resolution, disk, disk2_flat, hopf_chart, sphere2_monopole,
    sphere_line, torus, CatalogName, DiskProfile,
};
pub use spec::{product, Boundary, BoundaryComponent, Fibration, GeometrySpec, Placement};
pub use zn::{oriented_holonomy, zn_bounding, zn_mirror_double, zn_pair, zn_pair_deformed, ZnCycleSpec};
