//! Numerical laboratory for spherical means of complex order.

pub mod analysis;
pub mod bessel;
pub mod error;
pub mod extremals;
pub mod fields;
pub mod multiplier;
pub mod operators;
pub mod quadrature;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Order = bessel::ComplexOrder<f64>;
