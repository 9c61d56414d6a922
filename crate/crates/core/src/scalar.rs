//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is implemented for
//! `f32` and `f64`. The two heavy external kernels (FFT and the dense
//! symmetric eigensolver) are reached through trait methods so that the
//! generic code never needs the backends' own trait bounds.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable by the reconstruction code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// In-place complex FFT (unnormalized in both directions).
    fn fft(buf: &mut [Complex<Self>], inverse: bool);

    /// Eigen-decomposition of a dense symmetric `n × n` matrix stored
    /// column-major. Returns eigenvalues ascending and the matching
    /// eigenvectors as columns (column-major), or `None` on failure.
    fn symmetric_eigen(n: usize, matrix: Vec<Self>) -> Option<(Vec<Self>, Vec<Self>)>;
}

macro_rules! impl_real {
    ($t:ty, $cache:ident) => {
        thread_local! {
            static $cache: RefCell<HashMap<(usize, bool), Arc<dyn rustfft::Fft<$t>>>> =
                RefCell::new(HashMap::new());
        }

        impl Real for $t {
            fn fft(buf: &mut [Complex<Self>], inverse: bool) {
                let n = buf.len();
                if n <= 1 {
                    return;
                }
                let plan = $cache.with(|cache| {
                    cache
                        .borrow_mut()
                        .entry((n, inverse))
                        .or_insert_with(|| {
                            let mut planner = rustfft::FftPlanner::<$t>::new();
                            if inverse {
                                planner.plan_fft_inverse(n)
                            } else {
                                planner.plan_fft_forward(n)
                            }
                        })
                        .clone()
                });
                plan.process(buf);
            }

            fn symmetric_eigen(n: usize, matrix: Vec<Self>) -> Option<(Vec<Self>, Vec<Self>)> {
                if matrix.len() != n * n {
                    return None;
                }
                let m = nalgebra::DMatrix::<$t>::from_vec(n, n, matrix);
                let eig = nalgebra::SymmetricEigen::try_new(m, <$t>::EPSILON, 0)?;
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
                let mut vectors = Vec::with_capacity(n * n);
                for &i in &order {
                    vectors.extend(eig.eigenvectors.column(i).iter().copied());
                }
                Some((values, vectors))
            }
        }
    };
}

impl_real!(f32, FFT_CACHE_F32);
impl_real!(f64, FFT_CACHE_F64);

/// Converts an `f64` literal into `T`.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

/// Converts a count or index into `T`.
#[inline(always)]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).unwrap()
}

#[inline(always)]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap()
}

/// Angle reduced to `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Real>(x: T) -> T {
    let r = x - T::TAU() * (x / T::TAU()).floor();
    if r >= T::TAU() {
        T::zero()
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_roundtrip_f32_and_f64() {
        let mut a: Vec<Complex<f64>> = (0..12).map(|i| Complex::new(i as f64, 0.5)).collect();
        let orig = a.clone();
        f64::fft(&mut a, false);
        f64::fft(&mut a, true);
        for (x, y) in a.iter().zip(&orig) {
            assert!((x / 12.0 - y).norm() < 1e-12);
        }
        let mut b: Vec<Complex<f32>> = (0..8).map(|i| Complex::new(i as f32, 0.0)).collect();
        f32::fft(&mut b, false);
        assert!((b[0].re - 28.0).abs() < 1e-4);
    }

    #[test]
    fn eigen_sorted_ascending() {
        let m = vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        let (vals, vecs) = f64::symmetric_eigen(3, m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!((vals[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let norm: f64 = vecs[..3].iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
