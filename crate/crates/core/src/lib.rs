//! Numerical Cartan geometry for crystal defects.
//!
//! Dislocations are carried by the torsion `T = De` of a coframe and
//! disclinations by the curvature `R = Dw` of a spin connection. The crate
//! samples the canonical screw, edge and wedge configurations onto regular
//! grids, extracts their Burgers and Frank charges, evaluates field-equation
//! and Bianchi residuals, moves dislocation lines under the curvature-induced
//! transverse force and keeps the Burgers bookkeeping of reconnections.

pub mod error;
pub mod field_theory;
pub mod forms;
pub mod defects;
pub mod dynamics;
pub mod grid;
pub mod network;

pub use error::{Error, Result};
pub use grid::GridSpec;
