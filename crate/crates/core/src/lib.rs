pub mod error;
pub mod kinematics;
pub mod spin;

pub use error::{Error, Result};
pub mod special;
pub mod quadrature;
pub mod dual;
pub mod fourier;
pub mod operators;
pub mod amplitudes;
pub mod poincare;
pub mod position;
pub mod covariant;
pub mod causality;
