//! Numerical verification of curvature identities, estimates and
//! existence/nonexistence phenomena for quasi-Einstein metrics
//! `Ric + ∇²f − (1/m) df⊗df = λg`.

pub mod chart;
pub mod cohomogeneity;
pub mod conformal;
pub mod curvature;
pub mod error;
pub mod estimate;
pub mod integrator;
pub mod models;
pub mod tensor;
pub mod warped;
pub mod weight;

pub use error::{Error, Result};
pub use weight::Weight;
