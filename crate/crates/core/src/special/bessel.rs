//! Bessel functions of the first and second kind for integer order, their
//! positive zeros, and the half-integer kernels used by the 3D filters.
//!
//! Small arguments use Miller's backward recurrence for `J_n` (normalised by
//! `J_0 + 2 sum J_2k = 1`) and Neumann series for `Y_0`, `Y_1`. Arguments
//! `x >= 25` use the Hankel asymptotic expansion. Higher orders of `Y` come
//! from upward recurrence, which is stable for the second kind.

use crate::error::{Result, TatError};
use crate::scalar::{from_usize, lit, Real};

const ASYMPTOTIC_FROM: f64 = 25.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `J_0(x) .. J_nmax(x)` for real `x`.
pub fn bessel_j_orders<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let ax = x.abs();
    let mut out = if ax == T::zero() {
        let mut v = vec![T::zero(); n_max + 1];
        v[0] = T::one();
        v
    } else if ax >= lit(ASYMPTOTIC_FROM) && ax > from_usize(n_max) {
        let (j0, _) = hankel_asymptotic(0, ax);
        let (j1, _) = hankel_asymptotic(1, ax);
        upward_j(n_max, ax, j0, j1)
    } else {
        let mut all = miller(n_max, ax);
        all.truncate(n_max + 1);
        all
    };
    if x < T::zero() {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(x)` for integer `n >= 0`.
pub fn bessel_j<T: Real>(n: usize, x: T) -> T {
    let ax = x.abs();
    let v = if ax >= lit(ASYMPTOTIC_FROM) && n <= 1 {
        hankel_asymptotic(n, ax).0
    } else {
        bessel_j_orders(n, ax)[n]
    };
    if x < T::zero() && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `Y_0(x) .. Y_nmax(x)` for `x > 0`.
pub fn bessel_y_orders<T: Real>(n_max: usize, x: T) -> Result<Vec<T>> {
    if !(x > T::zero()) {
        return Err(TatError::InvalidArgument(format!("bessel_y: argument must be positive, got {x}")));
    }
    let (y0, y1) = if x >= lit(ASYMPTOTIC_FROM) {
        (hankel_asymptotic(0, x).1, hankel_asymptotic(1, x).1)
    } else {
        neumann_y01(x)
    };
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(y0);
    if n_max >= 1 {
        out.push(y1);
    }
    for n in 1..n_max {
        let next = lit::<T>(2.0) * from_usize::<T>(n) / x * out[n] - out[n - 1];
        out.push(next);
    }
    Ok(out)
}

/// `Y_n(x)` for integer `n >= 0` and `x > 0`.
pub fn bessel_y<T: Real>(n: usize, x: T) -> Result<T> {
    Ok(bessel_y_orders(n, x)?[n])
}

/// `(J_0(x), Y_0(x))` for `x > 0`; the pair needed by most kernels.
pub fn bessel_jy0<T: Real>(x: T) -> (T, T) {
    if x >= lit(ASYMPTOTIC_FROM) {
        hankel_asymptotic(0, x)
    } else {
        let all = miller(0, x);
        (all[0], neumann_y0_from(&all, x))
    }
}

/// First `count` positive zeros of `J_n`.
///
/// Zeros are located by scanning for sign changes with a step well below the
/// zero spacing (which always exceeds `pi`) and then bisected to full precision.
pub fn bessel_zeros<T: Real>(n: usize, count: usize) -> Vec<T> {
    let mut zeros = Vec::with_capacity(count);
    let step = lit::<T>(0.25);
    // every zero of J_n exceeds n
    let mut a = from_usize::<T>(n).max(lit(0.5));
    let mut fa = bessel_j(n, a);
    while zeros.len() < count {
        let b = a + step;
        let fb = bessel_j(n, b);
        if fa == T::zero() {
            zeros.push(a);
        } else if fa * fb < T::zero() {
            zeros.push(bisect(n, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    zeros
}

/// McMahon's large-zero expansion of the `q`-th zero of `J_n` (1-based).
pub fn mcmahon_zero<T: Real>(n: usize, q: usize) -> T {
    let mu = lit::<T>(4.0 * (n * n) as f64);
    let beta = (from_usize::<T>(q) + from_usize::<T>(n) / lit(2.0) - lit(0.25)) * T::PI();
    let e = lit::<T>(8.0) * beta;
    beta - (mu - T::one()) / e - lit::<T>(4.0) * (mu - T::one()) * (lit::<T>(7.0) * mu - lit(31.0)) / (lit::<T>(3.0) * e.powi(3))
}

fn bisect<T: Real>(n: usize, mut a: T, mut b: T, mut fa: T) -> T {
    for _ in 0..200 {
        let m = (a + b) / lit(2.0);
        if m == a || m == b {
            break;
        }
        let fm = bessel_j(n, m);
        if fm == T::zero() {
            return m;
        }
        if fa * fm < T::zero() {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    (a + b) / lit(2.0)
}

/// Kernel `J_{d/2-1}(t) / t^{d/2-1}` for `d` = 2 or 3.
pub fn radial_j<T: Real>(dim: usize, t: T) -> T {
    match dim {
        2 => bessel_j(0, t),
        _ => {
            // J_{1/2}(t)/t^{1/2} = sqrt(2/pi) sin(t)/t
            let c = (lit::<T>(2.0) / T::PI()).sqrt();
            if t.abs() < lit(1e-8) {
                c
            } else {
                c * t.sin() / t
            }
        }
    }
}

/// Kernel `Y_{d/2-1}(t) / t^{d/2-1}` for `d` = 2 or 3, `t > 0`.
pub fn radial_y<T: Real>(dim: usize, t: T) -> T {
    match dim {
        2 => bessel_jy0(t).1,
        _ => {
            // Y_{1/2}(t)/t^{1/2} = -sqrt(2/pi) cos(t)/t
            let c = (lit::<T>(2.0) / T::PI()).sqrt();
            -c * t.cos() / t
        }
    }
}

fn upward_j<T: Real>(n_max: usize, x: T, j0: T, j1: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(j0);
    if n_max >= 1 {
        out.push(j1);
    }
    for n in 1..n_max {
        let next = lit::<T>(2.0) * from_usize::<T>(n) / x * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

/// Normalised backward recurrence. Returns `J_0 .. J_start` where `start`
/// is chosen high enough for both `n_keep` and the Neumann series at `x`.
fn miller<T: Real>(n_keep: usize, x: T) -> Vec<T> {
    let xf = x.to_f64().unwrap();
    let top = (n_keep as f64).max(xf);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()).ceil() as usize;
    start += start % 2;
    let big = T::max_value().sqrt().sqrt();
    let mut vals = vec![T::zero(); start + 2];
    let two_over_x = lit::<T>(2.0) / x;
    vals[start + 1] = T::zero();
    vals[start] = T::min_positive_value().sqrt().sqrt();
    for k in (1..=start).rev() {
        let prev = from_usize::<T>(k) * two_over_x * vals[k] - vals[k + 1];
        vals[k - 1] = prev;
        if prev.abs() > big {
            let s = T::one() / big;
            for v in vals[k - 1..].iter_mut() {
                *v = *v * s;
            }
        }
    }
    let mut norm = vals[0];
    let mut k = 2;
    while k <= start {
        norm = norm + lit::<T>(2.0) * vals[k];
        k += 2;
    }
    vals.truncate(start + 1);
    for v in vals.iter_mut() {
        *v = *v / norm;
    }
    vals
}

fn neumann_y0_from<T: Real>(j: &[T], x: T) -> T {
    let two_pi = lit::<T>(2.0) / T::PI();
    let log_term = (x / lit(2.0)).ln() + lit(EULER_GAMMA);
    let mut s = T::zero();
    let mut k = 1;
    while 2 * k < j.len() {
        let term = j[2 * k] / from_usize::<T>(k);
        s = if k % 2 == 0 { s + term } else { s - term };
        k += 1;
    }
    two_pi * log_term * j[0] - lit::<T>(2.0) * two_pi * s
}

fn neumann_y01<T: Real>(x: T) -> (T, T) {
    let j = miller(1, x);
    let y0 = neumann_y0_from(&j, x);
    let two_pi = lit::<T>(2.0) / T::PI();
    let log_term = (x / lit(2.0)).ln() + lit(EULER_GAMMA);
    let mut s = T::zero();
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let term = (j[2 * k - 1] - j[2 * k + 1]) / from_usize::<T>(k);
        s = if k % 2 == 0 { s + term } else { s - term };
        k += 1;
    }
    let y1 = -two_pi / x * j[0] + two_pi * log_term * j[1] + two_pi * s;
    (y0, y1)
}

/// Hankel asymptotic expansion for `J_n`, `Y_n` at large `x`.
fn hankel_asymptotic<T: Real>(n: usize, x: T) -> (T, T) {
    let mu = lit::<T>(4.0 * (n * n) as f64);
    let eight_x = lit::<T>(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let tiny = T::epsilon() * lit(1e-3);
    let mut last = T::infinity();
    for k in 1..200 {
        let odd = lit::<T>((2 * k - 1) as f64);
        term = term * (mu - odd * odd) / (from_usize::<T>(k) * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // terms alternate P: +a0 - a2 + a4 ..., Q: +a1 - a3 + ...
        match k % 4 {
            1 => q = q + term,
            2 => p = p - term,
            3 => q = q - term,
            _ => p = p + term,
        }
        if mag < tiny {
            break;
        }
    }
    let chi = x - (from_usize::<T>(n) / lit(2.0) + lit(0.25)) * T::PI();
    let amp = (lit::<T>(2.0) / (T::PI() * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}
