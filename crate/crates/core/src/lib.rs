//! Regularised Cauchy transforms of power-bounded measures on the real line,
//! with numerical Abelian and Tauberian checks linking the growth of a
//! measure's distribution functions to the growth of its transform.

pub mod asymptotics;
pub mod error;
pub mod inversion;
pub mod measures;
pub mod numerics;
pub mod regvar;
pub mod registry;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
