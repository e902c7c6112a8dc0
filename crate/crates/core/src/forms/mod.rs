//! Exterior calculus on regular grids: k-form fields with scalar,
//! frame-vector or `so(n)` values, and the operators acting on them.

pub mod basis;
mod field;
pub mod integrate;
pub mod io;
mod ops;

pub use field::{antisym_slot, matrix_entry, Coframe, ConnectionField, FormField, ValueType, VectorField};
pub use integrate::{
    integrate_over_box, integrate_over_loop, integrate_over_surface, AxisBox, Circle, Curve, Disk,
    Interpolator, Parallelogram, Segment, Surface,
};
pub use ops::{
    covariant_derivative, curvature_of, exterior_derivative, hodge_star, interior_product,
    partial_derivative, wedge, Pairing,
};
