//! Type-I discrete cosine and sine transforms computed through complex FFTs.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// DCT-I: `y_k = x_0 + (-1)^k x_N + 2 sum_{j=1}^{N-1} x_j cos(pi j k / N)`,
/// for input `x_0 .. x_N` (`N + 1` samples).
pub fn dct1<T: Real>(x: &[T]) -> Vec<T> {
    let np1 = x.len();
    if np1 < 2 {
        return x.to_vec();
    }
    let n = np1 - 1;
    let mut buf = Vec::with_capacity(2 * n);
    buf.extend(x.iter().map(|&v| Complex::new(v, T::zero())));
    buf.extend(x[1..n].iter().rev().map(|&v| Complex::new(v, T::zero())));
    T::fft(&mut buf, false);
    buf[..np1].iter().map(|c| c.re).collect()
}

/// DST-I: `y_k = sum_{j=1}^{M} x_j sin(pi j k / (M+1))` for `k = 1..M`;
/// input and output are indexed from 0 (`x[0]` is `x_1`).
pub fn dst1<T: Real>(x: &[T]) -> Vec<T> {
    let mut out = x.to_vec();
    let mut scratch = Vec::new();
    dst1_in_place(&mut out, &mut scratch);
    out
}

fn dst1_in_place<T: Real>(x: &mut [T], buf: &mut Vec<Complex<T>>) {
    let m = x.len();
    if m == 0 {
        return;
    }
    let len = 2 * (m + 1);
    buf.clear();
    buf.resize(len, Complex::new(T::zero(), T::zero()));
    for j in 0..m {
        buf[j + 1].re = x[j];
        buf[len - 1 - j].re = -x[j];
    }
    T::fft(buf, false);
    let half = lit::<T>(-0.5);
    for k in 0..m {
        x[k] = buf[k + 1].im * half;
    }
}

/// DST-I along every axis of a row-major array with the given shape.
pub fn dst1_nd<T: Real>(data: &mut [T], shape: &[usize]) {
    for axis in 0..shape.len() {
        transform_axis(data, shape, axis, |line, buf| dst1_in_place(line, buf));
    }
}

/// Applies `f` to every 1D line of `data` along `axis`.
pub fn transform_axis<T: Real>(
    data: &mut [T],
    shape: &[usize],
    axis: usize,
    mut f: impl FnMut(&mut [T], &mut Vec<Complex<T>>),
) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![T::zero(); n];
    let mut buf = Vec::new();
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[base + i * stride];
            }
            f(&mut line, &mut buf);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
}
