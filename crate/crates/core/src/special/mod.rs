//! Special functions, quadrature rules, interpolation and fast trigonometric transforms.

pub mod bessel;
pub mod quadrature;
pub mod transforms;

pub use bessel::{bessel_j, bessel_j_orders, bessel_jy0, bessel_y, bessel_y_orders, bessel_zeros};
