//! Spherical means and integrals of phantoms over spheres centred on the
//! detectors, boundary pressure in 3D, analytic oracles, and the `Q_k`
//! moment polynomials.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{DataKind, TatData};
use crate::error::{invalid, Result, TatError};
use crate::geometry::{DetectorGeometry, Surface};
use crate::grid::ScalarField;
use crate::phantom::{PhantomSpec, Shape, Source};
use crate::scalar::{from_usize, lit, Real};
use crate::special::quadrature::gauss_legendre;

/// Angular quadrature on the integration spheres.
///
/// Whether values come from the analytic phantom or from multilinear
/// interpolation of a sampled field is decided by the [`Source`] passed to
/// [`spherical_forward`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    /// Uniform angles on each circle (2D).
    pub n_circle: usize,
    /// Gauss–Legendre nodes in `cos(polar angle)` (3D).
    pub n_lat: usize,
    /// Uniform longitudes (3D).
    pub n_lon: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n_circle: 512, n_lat: 64, n_lon: 128 }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.n_circle < 8 || self.n_lat < 8 || self.n_lon < 8 {
            return Err(invalid("quadrature point counts must be at least 8"));
        }
        Ok(())
    }
}

/// Measure of the unit sphere `S^{d-1}` times `r^{d-1}`.
#[inline]
pub fn sphere_measure<T: Real>(dim: usize, r: T) -> T {
    if dim == 2 {
        T::TAU() * r
    } else {
        lit::<T>(4.0) * T::PI() * r * r
    }
}

/// Unit directions and normalised weights (summing to one).
fn directions<T: Real>(dim: usize, quad: &QuadratureSpec, offset: T) -> (Vec<[T; 3]>, Vec<T>) {
    let z = T::zero();
    if dim == 2 {
        let n = quad.n_circle;
        let w = T::one() / from_usize::<T>(n);
        // directions k and n - k are exact mirror images in the offset frame
        let (so, co) = offset.sin_cos();
        let dirs = (0..n)
            .map(|k| {
                let (mut s, c) = (T::TAU() * from_usize::<T>(k.min(n - k)) / from_usize::<T>(n)).sin_cos();
                if 2 * k > n {
                    s = -s;
                }
                [c * co - s * so, c * so + s * co, z]
            })
            .collect();
        (dirs, vec![w; n])
    } else {
        let (cz, wz) = gauss_legendre::<T>(quad.n_lat);
        let mut dirs = Vec::with_capacity(quad.n_lat * quad.n_lon);
        let mut weights = Vec::with_capacity(quad.n_lat * quad.n_lon);
        for j in 0..quad.n_lat {
            let st = (T::one() - cz[j] * cz[j]).sqrt();
            for l in 0..quad.n_lon {
                let (s, c) = (offset + T::TAU() * from_usize::<T>(l) / from_usize::<T>(quad.n_lon)).sin_cos();
                dirs.push([st * c, st * s, cz[j]]);
                weights.push(wz[j] / from_usize::<T>(2 * quad.n_lon));
            }
        }
        (dirs, weights)
    }
}

/// Distance range `[min, max]` from `y` to the points of a box.
fn box_distance_range<T: Real>(y: &[T; 3], lo: &[T; 3], hi: &[T; 3], dim: usize) -> (T, T) {
    let mut dmin = T::zero();
    let mut dmax = T::zero();
    for a in 0..dim {
        let below = (lo[a] - y[a]).max(T::zero());
        let above = (y[a] - hi[a]).max(T::zero());
        let near = below.max(above);
        let far = (y[a] - lo[a]).abs().max((y[a] - hi[a]).abs());
        dmin = dmin + near * near;
        dmax = dmax + far * far;
    }
    (dmin.sqrt(), dmax.sqrt())
}

/// Spherical means or integrals of `src` on spheres of radius `j * dt`
/// centred at every detector.
///
/// Segment geometries rotate the angular lattice to start at the segment's
/// direction, which makes the quadrature symmetric under reflection in the
/// detector line.
pub fn spherical_forward<T: Real, S: Source<T> + ?Sized>(
    src: &S,
    geom: &DetectorGeometry<T>,
    n_samples: usize,
    dt: T,
    kind: DataKind,
    quad: &QuadratureSpec,
) -> Result<TatData<T>> {
    if kind == DataKind::Pressure {
        return Err(invalid("spherical_forward produces mean or integral data, not pressure"));
    }
    if !(dt > T::zero()) {
        return Err(invalid("sample spacing must be positive"));
    }
    quad.validate()?;
    let dim = geom.dim();
    let offset = match geom.surface() {
        Surface::Line { a, b } => (b[1] - a[1]).atan2(b[0] - a[0]),
        _ => T::zero(),
    };
    let (dirs, weights) = directions(dim, quad, offset);
    let support = src.support_box();
    let rows: Vec<Vec<T>> = geom
        .positions()
        .par_iter()
        .map(|y| {
            let (rmin, rmax) = match &support {
                Some((lo, hi)) => box_distance_range(y, lo, hi, dim),
                None => (T::zero(), T::infinity()),
            };
            let mut row = vec![T::zero(); n_samples];
            let mut x = [T::zero(); 3];
            for (j, out) in row.iter_mut().enumerate() {
                let r = from_usize::<T>(j) * dt;
                let mean = if j == 0 {
                    src.eval(&y[..dim])
                } else if r < rmin || r > rmax {
                    T::zero()
                } else {
                    let mut acc = T::zero();
                    for (d, &w) in dirs.iter().zip(&weights) {
                        for a in 0..dim {
                            x[a] = y[a] + r * d[a];
                        }
                        acc += w * src.eval(&x[..dim]);
                    }
                    acc
                };
                *out = match kind {
                    DataKind::Integral => mean * sphere_measure(dim, r),
                    _ => mean,
                };
            }
            row
        })
        .collect();
    TatData::new(geom.clone(), kind, n_samples, dt, rows.concat())
}

/// Exact 3D spherical means/integrals of a phantom made of balls and bumps.
///
/// For a radial profile `f(|x - c|)` the mean over the sphere `|x - y| = r`,
/// `d = |y - c|`, is `(1 / 2rd) * integral_{|r-d|}^{r+d} f(s) s ds`; both
/// profiles have elementary antiderivatives of `s f(s)`.
pub fn exact_radial_forward<T: Real>(
    spec: &PhantomSpec<T>,
    geom: &DetectorGeometry<T>,
    n_samples: usize,
    dt: T,
    kind: DataKind,
) -> Result<TatData<T>> {
    if geom.dim() != 3 {
        return Err(TatError::DimensionMismatch("exact radial data are implemented in 3D only".into()));
    }
    if kind == DataKind::Pressure {
        return Err(invalid("exact_radial_forward produces mean or integral data"));
    }
    if !(dt > T::zero()) {
        return Err(invalid("sample spacing must be positive"));
    }
    for p in &spec.primitives {
        if p.dim != 3 || matches!(p.shape, Shape::Block { .. }) {
            return Err(TatError::UnsupportedGeometry("exact data need 3D balls or bumps".into()));
        }
    }
    let rows: Vec<Vec<T>> = geom
        .positions()
        .par_iter()
        .map(|y| {
            (0..n_samples)
                .map(|j| {
                    let r = from_usize::<T>(j) * dt;
                    if j == 0 {
                        return match kind {
                            DataKind::Integral => T::zero(),
                            _ => spec.eval(y),
                        };
                    }
                    let mean: T = spec.primitives.iter().map(|p| radial_mean_3d(p.shape, p.amp, &p.center, y, r)).sum();
                    match kind {
                        DataKind::Integral => mean * sphere_measure(3, r),
                        _ => mean,
                    }
                })
                .collect()
        })
        .collect();
    TatData::new(geom.clone(), kind, n_samples, dt, rows.concat())
}

fn radial_mean_3d<T: Real>(shape: Shape<T>, amp: T, c: &[T; 3], y: &[T; 3], r: T) -> T {
    let rho = match shape {
        Shape::Sphere { r } | Shape::Bump { r } => r,
        Shape::Block { .. } => unreachable!(),
    };
    let profile = |s: T| -> T {
        match shape {
            Shape::Bump { .. } if s < rho => {
                let u = T::one() - (s / rho) * (s / rho);
                amp * u * u * u
            }
            Shape::Sphere { .. } if s <= rho => amp,
            _ => T::zero(),
        }
    };
    // antiderivative of s f(s), constant beyond rho
    let anti = |s: T| -> T {
        let s = s.min(rho);
        match shape {
            Shape::Bump { .. } => {
                let u = T::one() - (s / rho) * (s / rho);
                -amp * rho * rho / lit(8.0) * u * u * u * u
            }
            _ => amp * s * s / lit(2.0),
        }
    };
    let d = (0..3).map(|a| (y[a] - c[a]) * (y[a] - c[a])).sum::<T>().sqrt();
    if d <= T::epsilon() * rho {
        return profile(r);
    }
    let lo = (r - d).abs();
    if lo >= rho {
        return T::zero();
    }
    (anti(r + d) - anti(lo)) / (lit::<T>(2.0) * r * d)
}

/// Spherical integral of the indicator of a ball (disk in 2D) of radius
/// `rho`, amplitude `amp`, over the sphere of radius `r` centred at `y`:
/// arc length (2D) or cap area (3D) inside the ball, times `amp`.
pub fn analytic_ball_data<T: Real>(dim: usize, center: &[T], rho: T, amp: T, y: &[T], r: T) -> T {
    let d = (0..dim).map(|a| (y[a] - center[a]) * (y[a] - center[a])).sum::<T>().sqrt();
    if r <= T::zero() {
        return T::zero();
    }
    if d + r <= rho {
        return amp * sphere_measure(dim, r);
    }
    if r >= rho + d || r <= d - rho {
        return T::zero();
    }
    let cos_a = ((d * d + r * r - rho * rho) / (lit::<T>(2.0) * d * r)).max(-T::one()).min(T::one());
    if dim == 2 {
        amp * lit::<T>(2.0) * r * cos_a.acos()
    } else {
        amp * T::TAU() * r * r * (T::one() - cos_a)
    }
}

/// Converts between spherical means and spherical integrals.
///
/// The mean at `r = 0` is recovered by quadratic extrapolation from the three
/// nearest positive radii.
pub fn convert_kind<T: Real>(data: &TatData<T>, target: DataKind) -> Result<TatData<T>> {
    if data.kind() == DataKind::Pressure || target == DataKind::Pressure {
        return Err(TatError::UnsupportedConversion("pressure data cannot be converted to/from spherical means".into()));
    }
    if data.kind() == target {
        return Ok(data.clone());
    }
    let dim = data.dim();
    let ns = data.n_samples();
    let mut out = Vec::with_capacity(data.values().len());
    for row in data.traces() {
        let start = out.len();
        for (j, &v) in row.iter().enumerate() {
            let s = sphere_measure(dim, data.time(j));
            out.push(match (target, j) {
                (DataKind::Integral, 0) => T::zero(),
                (DataKind::Integral, _) => v * s,
                (_, 0) => T::zero(),
                _ => v / s,
            });
        }
        if target == DataKind::Mean {
            let m = &mut out[start..];
            m[0] = if ns >= 4 { lit::<T>(3.0) * (m[1] - m[2]) + m[3] } else { m[1] };
        }
    }
    data.with_values(target, out)
}

/// Boundary pressure `p(y, t) = d/dt [t M(y, t)]` from 3D spherical means
/// (Poisson–Kirchhoff with unit sound speed and unit normalisation).
pub fn pressure_from_means<T: Real>(data: &TatData<T>) -> Result<TatData<T>> {
    if data.dim() != 3 {
        return Err(TatError::UnsupportedConversion("the Poisson-Kirchhoff relation is three-dimensional".into()));
    }
    if data.kind() != DataKind::Mean {
        return Err(TatError::UnsupportedConversion("pressure_from_means needs spherical means".into()));
    }
    let ns = data.n_samples();
    if ns < 3 {
        return Err(invalid("need at least three samples"));
    }
    let inv = T::one() / (lit::<T>(2.0) * data.dt());
    let mut out = Vec::with_capacity(data.values().len());
    let mut q = vec![T::zero(); ns];
    for row in data.traces() {
        for (j, v) in row.iter().enumerate() {
            q[j] = data.time(j) * *v;
        }
        out.extend(differentiate(&q, inv));
    }
    data.with_values(DataKind::Pressure, out)
}

/// Second-order first derivative of uniform samples; `inv = 1 / (2 dt)`.
pub(crate) fn differentiate<T: Real>(q: &[T], inv: T) -> Vec<T> {
    let n = q.len();
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    (0..n)
        .map(|j| {
            if j == 0 {
                (-three * q[0] + four * q[1] - q[2]) * inv
            } else if j + 1 == n {
                (three * q[n - 1] - four * q[n - 2] + q[n - 3]) * inv
            } else {
                (q[j + 1] - q[j - 1]) * inv
            }
        })
        .collect()
}

/// Polynomial in up to three variables, stored as exponent → coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    dim: usize,
    terms: BTreeMap<[u8; 3], T>,
}

impl<T: Real> Polynomial<T> {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<[u8; 3], T> {
        &self.terms
    }

    pub fn coefficient(&self, e: [u8; 3]) -> T {
        self.terms.get(&e).copied().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, e: [u8; 3], c: T) {
        let slot = self.terms.entry(e).or_insert_with(T::zero);
        *slot += c;
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().filter(|(_, c)| **c != T::zero()).map(|(e, _)| e.iter().map(|&k| k as usize).sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms
            .iter()
            .map(|(e, &c)| (0..self.dim).fold(c, |acc, a| acc * x[a].powi(e[a] as i32)))
            .sum()
    }

    /// Exact Laplacian of the polynomial.
    pub fn laplacian(&self) -> Self {
        let mut out = Polynomial::zero(self.dim);
        for (e, &c) in &self.terms {
            for a in 0..self.dim {
                if e[a] >= 2 {
                    let mut f = *e;
                    f[a] -= 2;
                    out.add_term(f, c * from_usize::<T>(e[a] as usize * (e[a] as usize - 1)));
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        Polynomial { dim: self.dim, terms: self.terms.iter().map(|(e, &c)| (*e, c * s)).collect() }
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let mut keys: Vec<&[u8; 3]> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().fold(T::zero(), |m, e| m.max((self.coefficient(*e) - other.coefficient(*e)).abs()))
    }

    pub fn max_coeff(&self) -> T {
        self.terms.values().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

/// Largest `k` accepted by [`qk_polynomial`]; beyond it the expansion
/// coefficients grow faster than the moments can be resolved.
pub const QK_MAX: usize = 4;

/// `Q_k(x) = integral |x - y|^{2k} f(y) dy` as an explicit polynomial, using
/// trapezoid-rule moments of the sampled `f`.
pub fn qk_polynomial<T: Real>(f: &ScalarField<T>, k: usize) -> Result<Polynomial<T>> {
    if k > QK_MAX {
        return Err(invalid(format!("k = {k} exceeds the supported maximum {QK_MAX}")));
    }
    let dim = f.grid().dim();
    // |x - y|^2 as a polynomial in (x, y): exponents [x0 x1 x2 y0 y1 y2]
    let mut base: BTreeMap<[u8; 6], i64> = BTreeMap::new();
    for a in 0..dim {
        let mut e = [0u8; 6];
        e[a] = 2;
        *base.entry(e).or_default() += 1;
        let mut e = [0u8; 6];
        e[a] = 1;
        e[3 + a] = 1;
        *base.entry(e).or_default() -= 2;
        let mut e = [0u8; 6];
        e[3 + a] = 2;
        *base.entry(e).or_default() += 1;
    }
    let mut pow: BTreeMap<[u8; 6], i64> = BTreeMap::from([([0u8; 6], 1)]);
    for _ in 0..k {
        let mut next: BTreeMap<[u8; 6], i64> = BTreeMap::new();
        for (e1, c1) in &pow {
            for (e2, c2) in &base {
                let mut e = *e1;
                for i in 0..6 {
                    e[i] += e2[i];
                }
                *next.entry(e).or_default() += c1 * c2;
            }
        }
        next.retain(|_, c| *c != 0);
        pow = next;
    }
    let mut moments: BTreeMap<[u8; 3], T> = BTreeMap::new();
    let grid = f.grid();
    let vol = grid.cell_volume();
    let mut out = Polynomial::zero(dim);
    for (e, &c) in &pow {
        let beta = [e[3], e[4], e[5]];
        let m = *moments.entry(beta).or_insert_with(|| {
            f.values()
                .par_iter()
                .enumerate()
                .map(|(idx, &v)| {
                    if v == T::zero() {
                        return T::zero();
                    }
                    let x = grid.node_at(idx);
                    (0..dim).fold(v, |acc, a| acc * x[a].powi(beta[a] as i32))
                })
                .sum::<T>()
                * vol
        });
        out.add_term([e[0], e[1], e[2]], lit::<T>(c as f64) * m);
    }
    Ok(out)
}

/// Constant `c_k = 2k(2k + d - 2)` in `Delta Q_k = c_k Q_{k-1}`.
pub fn qk_constant(k: usize, dim: usize) -> usize {
    2 * k * (2 * k + dim - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::phantom::Primitive;

    #[test]
    fn zero_phantom_zero_data() {
        let g = DetectorGeometry::circle([0.0, 0.0], 1.0, 16).unwrap();
        let d = spherical_forward(&PhantomSpec::<f64>::empty(), &g, 20, 0.1, DataKind::Integral, &QuadratureSpec::default()).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn concentric_disk_means() {
        let g = DetectorGeometry::circle([0.0, 0.0], 1.0, 8).unwrap();
        let y = g.positions()[3];
        let spec = PhantomSpec::new(vec![Primitive::disk(y[0], y[1], 0.5, 1.0)]).unwrap();
        let d = spherical_forward(&spec, &g, 21, 0.05, DataKind::Mean, &QuadratureSpec::default()).unwrap();
        let tr = d.trace(3);
        for (j, &v) in tr.iter().enumerate() {
            let r = j as f64 * 0.05;
            if r < 0.5 - 1e-9 {
                assert_eq!(v, 1.0);
            } else if r > 0.5 + 1e-9 {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn ball_oracle_vs_brute_force() {
        // d = 1, rho = 0.5, r = 1 in 2D; 10^6 midpoint samples on the circle
        let n = 1_000_000;
        let mut inside = 0usize;
        for k in 0..n {
            let th = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
            let (x, y) = (th.cos(), th.sin());
            if (x - 1.0).powi(2) + y * y <= 0.25 {
                inside += 1;
            }
        }
        let brute = std::f64::consts::TAU * inside as f64 / n as f64;
        let exact = analytic_ball_data(2, &[1.0, 0.0], 0.5, 1.0, &[0.0, 0.0], 1.0);
        assert!((brute - exact).abs() <= 1e-5, "{brute} vs {exact}");
        // concentric and disjoint branches
        assert!((analytic_ball_data(2, &[0.0, 0.0], 1.0, 1.0, &[0.0, 0.0], 0.5) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(analytic_ball_data(3, &[0.0; 3], 0.2, 1.0, &[1.0, 0.0, 0.0], 1.3), 0.0);
    }

    #[test]
    fn ball_oracle_3d_matches_radial_formula() {
        let c: [f64; 3] = [0.1, -0.2, 0.05];
        let y = [0.9, 0.3, -0.1];
        for &r in &[0.3, 0.7, 0.95, 1.2] {
            let cap = analytic_ball_data(3, &c, 0.6, 2.0, &y, r);
            let mean = radial_mean_3d(Shape::Sphere { r: 0.6 }, 2.0, &c, &y, r);
            assert!((cap - mean * sphere_measure(3, r)).abs() < 1e-12);
        }
    }

    #[test]
    fn off_center_disk_matches_oracle() {
        let g = DetectorGeometry::circle([0.0, 0.0], 1.0, 4).unwrap();
        let spec = PhantomSpec::new(vec![Primitive::disk(0.3, 0.2, 0.4, 1.0)]).unwrap();
        let quad = QuadratureSpec { n_circle: 4096, ..Default::default() };
        let d = spherical_forward(&spec, &g, 41, 0.05, DataKind::Integral, &quad).unwrap();
        for i in 0..4 {
            let y = g.positions()[i];
            for j in 1..41 {
                let r = j as f64 * 0.05;
                let want = analytic_ball_data(2, &[0.3, 0.2], 0.4, 1.0, &y, r);
                let got = d.trace(i)[j];
                // indicator: error bounded by the angular cell at each boundary crossing
                assert!((got - want).abs() <= 1e-3 * sphere_measure(2, r), "{got} {want}");
            }
        }
    }

    #[test]
    fn single_sphere_relative_accuracy() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 1).unwrap();
        let spec = PhantomSpec::new(vec![Primitive::disk(0.3, 0.2, 0.4, 1.0)]).unwrap();
        let quad = QuadratureSpec { n_circle: 16384, ..Default::default() };
        let d = spherical_forward(&spec, &g, 15, 0.05, DataKind::Integral, &quad).unwrap();
        let want = analytic_ball_data(2, &[0.3, 0.2], 0.4, 1.0, &[1.0, 0.0], 0.7);
        assert!((d.trace(0)[14] - want).abs() <= 1e-3 * want);
    }

    #[test]
    fn kind_conversion_roundtrip() {
        let g = DetectorGeometry::<f64>::sphere([0.0; 3], 1.0, 3).unwrap();
        let spec = PhantomSpec::new(vec![Primitive::bump3([0.1, 0.0, 0.2], 0.5, 1.0)]).unwrap();
        let mean = exact_radial_forward(&spec, &g, 30, 0.07, DataKind::Mean).unwrap();
        let integral = convert_kind(&mean, DataKind::Integral).unwrap();
        let back = convert_kind(&integral, DataKind::Mean).unwrap();
        for (a, b) in mean.traces().zip(back.traces()) {
            for j in 1..a.len() {
                assert!((a[j] - b[j]).abs() <= 1e-12 * (1.0 + a[j].abs()));
            }
        }
        assert!(matches!(
            convert_kind(&integral.with_values(DataKind::Pressure, integral.values().to_vec()).unwrap(), DataKind::Mean),
            Err(TatError::UnsupportedConversion(_))
        ));
    }

    #[test]
    fn exact_radial_matches_quadrature() {
        let g = DetectorGeometry::<f64>::sphere([0.0; 3], 1.0, 2).unwrap();
        let spec = PhantomSpec::new(vec![
            Primitive::bump3([0.2, -0.1, 0.1], 0.4, 1.5),
            Primitive::bump3([-0.3, 0.2, 0.0], 0.3, -0.7),
        ])
        .unwrap();
        let exact = exact_radial_forward(&spec, &g, 40, 0.05, DataKind::Mean).unwrap();
        let quad = spherical_forward(&spec, &g, 40, 0.05, DataKind::Mean, &QuadratureSpec::default()).unwrap();
        let diff = exact.values().iter().zip(quad.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-4 * exact.max_abs(), "{diff} {}", exact.max_abs());
    }

    #[test]
    fn constant_mean_gives_unit_pressure() {
        let g = DetectorGeometry::<f64>::sphere([0.0; 3], 1.0, 1).unwrap();
        let d = TatData::new(g, DataKind::Mean, 10, 0.1, vec![1.0; 20]).unwrap();
        let p = pressure_from_means(&d).unwrap();
        assert!(p.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let g2 = DetectorGeometry::circle([0.0; 2], 1.0, 2).unwrap();
        let d2 = TatData::new(g2, DataKind::Mean, 10, 0.1, vec![1.0; 20]).unwrap();
        assert!(pressure_from_means(&d2).is_err());
    }

    #[test]
    fn qk_point_mass_and_harmonicity() {
        let grid = Grid::<f64>::cube(2, 41, -1.0, 1.0).unwrap();
        let mut v = vec![0.0; grid.len()];
        v[grid.index([20, 20, 0])] = 1.0;
        let f = ScalarField::new(grid, v).unwrap();
        let q0 = qk_polynomial(&f, 0).unwrap();
        let m = grid.cell_volume();
        assert!((q0.coefficient([0, 0, 0]) - m).abs() < 1e-15);
        let q1 = qk_polynomial(&f, 1).unwrap();
        assert!((q1.eval(&[0.3, -0.4]) - m * 0.25).abs() < 1e-14);
        assert!(qk_polynomial(&f, 5).is_err());

        let spec = PhantomSpec::new(vec![Primitive::bump2(0.2, -0.1, 0.5, 1.0), Primitive::disk(-0.3, 0.3, 0.2, 0.5)]).unwrap();
        let f = spec.rasterize(&grid).unwrap();
        for k in 1..=2 {
            let lhs = qk_polynomial(&f, k).unwrap().laplacian();
            let rhs = qk_polynomial(&f, k - 1).unwrap().scaled(qk_constant(k, 2) as f64);
            assert!(lhs.max_coeff_diff(&rhs) <= 1e-10 * rhs.max_coeff());
        }
    }
}
