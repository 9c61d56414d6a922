//! Series-expansion inversions: Norton's Fourier–Hankel method on a circle,
//! Dirichlet sine-series methods on squares and cubes, and the eigenfunction
//! expansion for a variable sound speed.

mod boxes;
mod eigen;
mod norton;

pub use boxes::{cubic_series, series_coefficients, square_series_2d, BoxBasis, SeriesCoefficients, SeriesConfig};
pub use eigen::{eigen_expand_variable_speed, DiscreteEigenBasis, EigenConfig};
pub use norton::{norton2d, norton_coefficients, NortonConfig, RadialModes};

pub use crate::special::bessel::{bessel_j, bessel_j_orders, bessel_jy0, bessel_y, bessel_y_orders, bessel_zeros, radial_j, radial_y};

use crate::error::Result;
use crate::scalar::Real;

/// Bessel functions of integer order together with tabulated positive zeros
/// `j_{m,q}` of `J_m` for `m <= m_max`, `q = 1..=count`.
#[derive(Debug, Clone)]
pub struct BesselTable<T> {
    zeros: Vec<Vec<T>>,
}

impl<T: Real> BesselTable<T> {
    pub fn new(m_max: usize, count: usize) -> Self {
        BesselTable { zeros: (0..=m_max).map(|m| bessel_zeros(m, count)).collect() }
    }

    pub fn m_max(&self) -> usize {
        self.zeros.len() - 1
    }

    /// Zeros of `J_m`, ascending.
    pub fn zeros(&self, m: usize) -> &[T] {
        &self.zeros[m]
    }

    pub fn j(&self, m: usize, t: T) -> T {
        bessel_j(m, t)
    }

    pub fn y(&self, m: usize, t: T) -> Result<T> {
        bessel_y(m, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_zeros_are_roots() {
        let table = BesselTable::<f64>::new(16, 10);
        for m in 0..=16 {
            for &z in table.zeros(m) {
                assert!(table.j(m, z).abs() <= 1e-10, "m={m} z={z}");
            }
        }
        assert!((table.zeros(0)[0] - 2.404825557695773).abs() < 1e-12);
    }
}
