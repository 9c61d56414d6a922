use crate::scalar::{from_usize, lit, Real};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton in f64
        let mut x = ((std::f64::consts::PI * (i as f64 + 0.75)) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = lit(-x);
        nodes[n - 1 - i] = lit(x);
        weights[i] = lit(w);
        weights[n - 1 - i] = lit(w);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Trapezoid weights (in units of the spacing) for `n` samples.
pub fn trapezoid_weights<T: Real>(n: usize) -> Vec<T> {
    let mut w = vec![T::one(); n];
    if n >= 2 {
        w[0] = lit(0.5);
        w[n - 1] = lit(0.5);
    }
    w
}

/// Barycentric Lagrange interpolation on the equispaced nodes `0..order`
/// (in units of the spacing) evaluated at fractional position `s`.
pub fn lagrange_equispaced<T: Real>(values: &[T], s: T) -> T {
    let n = values.len();
    // w_j = (-1)^j C(n-1, j)
    let mut num = T::zero();
    let mut den = T::zero();
    let mut binom = T::one();
    for (j, &v) in values.iter().enumerate() {
        let d = s - from_usize::<T>(j);
        if d == T::zero() {
            return v;
        }
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        let w = sign * binom / d;
        num = num + w * v;
        den = den + w;
        if j + 1 < n {
            binom = binom * from_usize::<T>(n - 1 - j) / from_usize::<T>(j + 1);
        }
    }
    num / den
}

/// First index of an `order`-point stencil centred on fractional mesh
/// position `s`, clamped to `[lo, n - order]`.
pub fn centered_stencil_start(s: f64, order: usize, lo: usize, n: usize) -> Option<usize> {
    if n < lo + order {
        return None;
    }
    let start = (s - (order as f64 - 1.0) / 2.0).round();
    let start = if start < lo as f64 { lo } else { start as usize };
    Some(start.min(n - order))
}

/// Piecewise-linear interpolation of uniformly spaced samples `y_j = f(j*h)`;
/// zero outside `[0, (n-1)h]`.
#[inline]
pub fn linear_uniform<T: Real>(samples: &[T], inv_h: T, t: T) -> T {
    let s = t * inv_h;
    if !(s >= T::zero()) {
        return T::zero();
    }
    let i = match s.to_usize() {
        Some(i) => i,
        None => return T::zero(),
    };
    if i + 1 >= samples.len() {
        return if i + 1 == samples.len() && s == from_usize(i) { samples[i] } else { T::zero() };
    }
    let f = s - from_usize::<T>(i);
    samples[i] + f * (samples[i + 1] - samples[i])
}
