//! Sine-series inversion on a square or cube `Ω = [a, a + L]^d`.
//!
//! The Dirichlet eigenfunctions `u_m = (2/L)^{d/2} prod sin(π m_i ξ_i / L)`
//! satisfy `Δu_m + λ_m² u_m = 0` with `λ_m = π|m|/L`, so Green's formula with
//! a real fundamental solution `Φ_λ` of `Δ + λ²` gives
//! `α_m = ∫_Ω f u_m = ∫_∂Ω I(y, λ_m) ∂_n u_m(y) ds(y)`, where
//! `I(y, λ) = ∫ g(y, t) Φ_λ(t) dt` and `g` is the spherical integral. Sources
//! outside `Ω` do not contribute. `I` is computed on a uniform λ-mesh and
//! interpolated to `λ_m`; the face integrals are discrete sine transforms.

use rayon::prelude::*;

use crate::data::{DataKind, TatData};
use crate::error::{invalid, Result, TatError};
use crate::forward::convert_kind;
use crate::geometry::{face_axis, other_axes, DetectorGeometry, Surface};
use crate::grid::{Grid, ScalarField};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special::bessel::bessel_jy0;
use crate::special::quadrature::{centered_stencil_start, lagrange_equispaced, trapezoid_weights};
use crate::special::transforms::{dct1, dst1_nd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesConfig {
    /// Highest mode per axis; default (and maximum) the detectors per side.
    pub m_max: Option<usize>,
    /// Number of λ-mesh nodes in the Lagrange interpolation.
    pub interp_order: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { m_max: None, interp_order: 8 }
    }
}

/// Dirichlet sine basis of an axis-aligned square or cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxBasis<T> {
    dim: usize,
    lower: [T; 3],
    side: T,
}

impl<T: Real> BoxBasis<T> {
    pub fn new(dim: usize, lower: [T; 3], side: T) -> Result<Self> {
        if !(2..=3).contains(&dim) || !(side > T::zero()) {
            return Err(invalid("box basis needs dimension 2 or 3 and a positive side"));
        }
        Ok(BoxBasis { dim, lower, side })
    }

    pub fn from_geometry(geom: &DetectorGeometry<T>) -> Result<Self> {
        match *geom.surface() {
            Surface::Square { center, half, .. } => Self::new(2, [center[0] - half, center[1] - half, T::zero()], lit::<T>(2.0) * half),
            Surface::Cube { center, half, .. } => {
                Self::new(3, [center[0] - half, center[1] - half, center[2] - half], lit::<T>(2.0) * half)
            }
            _ => Err(TatError::UnsupportedGeometry(format!("sine series need a square or cube, got {:?}", geom.kind()))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> T {
        self.side
    }

    fn norm(&self) -> T {
        (lit::<T>(2.0) / self.side).powi(self.dim as i32).sqrt()
    }

    /// Wavenumber `λ_m = π |m| / L`.
    pub fn lambda(&self, m: &[usize]) -> T {
        let s: T = m.iter().map(|&k| from_usize::<T>(k * k)).sum();
        T::PI() * s.sqrt() / self.side
    }

    pub fn eval(&self, m: &[usize], x: &[T]) -> T {
        let k = T::PI() / self.side;
        (0..self.dim).map(|a| (k * from_usize::<T>(m[a]) * (x[a] - self.lower[a])).sin()).fold(self.norm(), |p, s| p * s)
    }

    /// Outward normal derivative of `u_m` at a point `x` of face `face`
    /// (faces ordered `-x, +x, -y, +y, -z, +z`).
    pub fn normal_derivative(&self, m: &[usize], face: usize, x: &[T]) -> T {
        let (axis, sign) = face_axis::<T>(face);
        let k = T::PI() / self.side;
        let mut v = self.norm() * sign * k * from_usize::<T>(m[axis]) * (k * from_usize::<T>(m[axis]) * (x[axis] - self.lower[axis])).cos();
        for a in (0..self.dim).filter(|&a| a != axis) {
            v = v * (k * from_usize::<T>(m[a]) * (x[a] - self.lower[a])).sin();
        }
        v
    }

    /// Interior nodes `a + j L / (n + 1)`, `j = 1..=n`, on every axis.
    pub fn node_grid(&self, n: usize) -> Result<Grid<T>> {
        let h = self.side / from_usize::<T>(n + 1);
        let origin: Vec<T> = (0..self.dim).map(|a| self.lower[a] + h).collect();
        Grid::new(&vec![n; self.dim], &origin, &vec![h; self.dim])
    }
}

/// Expansion coefficients `α_m`, `m ∈ [1, m_max]^d`, stored row-major with
/// index `m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients<T> {
    pub basis: BoxBasis<T>,
    pub m_max: usize,
    pub values: Vec<T>,
}

impl<T: Real> SeriesCoefficients<T> {
    pub fn get(&self, m: &[usize]) -> T {
        let idx = m.iter().fold(0, |acc, &k| acc * self.m_max + (k - 1));
        self.values[idx]
    }

    /// `sum_m α_m u_m` at the `n^d` interior nodes, `n >= m_max`.
    pub fn synthesize(&self, n: usize) -> Result<ScalarField<T>> {
        if n < self.m_max {
            return Err(invalid(format!("synthesis grid of {n} nodes cannot hold modes up to {}", self.m_max)));
        }
        let dim = self.basis.dim;
        let shape = vec![n; dim];
        let mut arr = vec![T::zero(); n.pow(dim as u32)];
        for (idx, &a) in self.values.iter().enumerate() {
            let mut rest = idx;
            let mut digits = [0usize; 3];
            for d in (0..dim).rev() {
                digits[d] = rest % self.m_max;
                rest /= self.m_max;
            }
            arr[digits[..dim].iter().fold(0, |acc, &k| acc * n + k)] = a;
        }
        dst1_nd(&mut arr, &shape);
        let norm = self.basis.norm();
        arr.iter_mut().for_each(|v| *v = *v * norm);
        ScalarField::new(self.basis.node_grid(n)?, arr)
    }
}

/// Coefficients of the sine series from spherical integrals on a square or
/// cube boundary. In 3D `Φ_λ = cos(λt)/(4πt)` and the t-integral is a DCT-I;
/// in 2D `Φ_λ = -Y_0(λt)/4` is integrated against tabulated Bessel values.
pub fn series_coefficients<T: Real>(data: &TatData<T>, cfg: &SeriesConfig) -> Result<SeriesCoefficients<T>> {
    let geom = data.geometry();
    let basis = BoxBasis::from_geometry(geom)?;
    let dim = basis.dim;
    let per_side = match *geom.surface() {
        Surface::Square { per_side, .. } | Surface::Cube { per_side, .. } => per_side,
        _ => unreachable!(),
    };
    let m_max = cfg.m_max.unwrap_or(per_side);
    if m_max == 0 || m_max > per_side {
        return Err(invalid(format!("m_max must lie in 1..={per_side} (detectors per side)")));
    }
    let order = cfg.interp_order;
    if order < 2 {
        return Err(invalid("interpolation order must be at least 2"));
    }
    let g = convert_kind(data, DataKind::Integral)?;
    let n = g.n_samples();
    let dt = g.dt();
    if n < 3 {
        return Err(invalid("need at least three radial samples"));
    }
    let side = basis.side;
    let dl = T::PI() / (lit::<T>(2.0) * from_usize::<T>(n - 1) * dt);
    let lambda_need = T::PI() * from_usize::<T>(dim).sqrt() * from_usize::<T>(m_max) / side;
    let lo = if dim == 2 { 1 } else { 0 };
    let n_k = (lambda_need / dl).ceil().to_usize().unwrap_or(usize::MAX).saturating_add(order / 2 + 2);
    let k_avail = 2 * (n - 1);
    if n_k > k_avail + 1 {
        let need = to_f64(lambda_need) + (order / 2 + 2) as f64 * to_f64(dl);
        return Err(invalid(format!(
            "the λ-mesh must reach λ_max = {need:.4} but the data resolve only π/Δt = {:.4}; use Δt <= {:.4e}",
            to_f64(T::PI() / dt),
            std::f64::consts::PI / need
        )));
    }
    if n_k < lo + order {
        return Err(invalid("λ-mesh too short for the interpolation stencil"));
    }

    // channels[c][det * n_k + k]: I in 3D; S = I + ln(λ) A / 2π and A in 2D
    let n_det = g.n_detectors();
    let channels: Vec<Vec<T>> = if dim == 3 {
        let four_pi = lit::<T>(4.0) * T::PI();
        let half_dt = dt / lit::<T>(2.0);
        let rows: Vec<Vec<T>> = g
            .traces()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|tr| {
                let mut h = vec![T::zero(); k_avail + 1];
                for j in 1..n {
                    h[j] = tr[j] / (four_pi * from_usize::<T>(j) * dt);
                }
                let y = dct1(&h);
                y[..n_k].iter().map(|&v| v * half_dt).collect()
            })
            .collect();
        vec![rows.concat()]
    } else {
        let step = dl * dt;
        let table: Vec<(T, T)> = (0..(n_k - 1) * (n - 1) + 1)
            .into_par_iter()
            .map(|p| if p == 0 { (T::one(), T::zero()) } else { bessel_jy0(from_usize::<T>(p) * step) })
            .collect();
        let w = trapezoid_weights::<T>(n);
        let quarter = lit::<T>(0.25);
        let inv_2pi = T::one() / T::TAU();
        let rows: Vec<(Vec<T>, Vec<T>)> = g
            .traces()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|tr| {
                let mut s = vec![T::zero(); n_k];
                let mut a = vec![T::zero(); n_k];
                for k in 1..n_k {
                    let (mut sj, mut sy) = (T::zero(), T::zero());
                    for j in 1..n {
                        let (j0, y0) = table[k * j];
                        let gw = w[j] * tr[j];
                        sj += j0 * gw;
                        sy += y0 * gw;
                    }
                    let lam = from_usize::<T>(k) * dl;
                    a[k] = sj * dt;
                    s[k] = -quarter * sy * dt + inv_2pi * lam.ln() * a[k];
                }
                (s, a)
            })
            .collect();
        let (s, a): (Vec<Vec<T>>, Vec<Vec<T>>) = rows.into_iter().unzip();
        vec![s.concat(), a.concat()]
    };

    // face sine transforms: faces[c][face][k * mf + idx]
    let n_faces = 2 * dim;
    let mf = per_side.pow(dim as u32 - 1);
    let h = side / from_usize::<T>(per_side + 1);
    let hd = h.powi(dim as i32 - 1);
    let face_shape = vec![per_side; dim - 1];
    let faces: Vec<Vec<Vec<T>>> = channels
        .iter()
        .map(|ch| {
            (0..n_faces)
                .into_par_iter()
                .map(|f| {
                    let mut out = vec![T::zero(); n_k * mf];
                    let mut arr = vec![T::zero(); mf];
                    for k in 0..n_k {
                        for (i, v) in arr.iter_mut().enumerate() {
                            *v = ch[(f * mf + i) * n_k + k];
                        }
                        dst1_nd(&mut arr, &face_shape);
                        for (i, v) in arr.iter().enumerate() {
                            out[k * mf + i] = *v * hd;
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    debug_assert_eq!(n_det, n_faces * mf);

    let norm = basis.norm();
    let kpi = T::PI() / side;
    let count = m_max.pow(dim as u32);
    let values: Vec<T> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut m = [0usize; 3];
            let mut rest = idx;
            for a in (0..dim).rev() {
                m[a] = rest % m_max + 1;
                rest /= m_max;
            }
            let lam = basis.lambda(&m[..dim]);
            let s = lam / dl;
            let start = centered_stencil_start(to_f64(s), order, lo, n_k).unwrap();
            let mut interp = [T::zero(); 2];
            for (c, ch_faces) in faces.iter().enumerate() {
                let mut vals = vec![T::zero(); order];
                for f in 0..n_faces {
                    let (axis, _) = face_axis::<T>(f);
                    let ma = m[axis];
                    let sign = if f % 2 == 0 {
                        -T::one()
                    } else if ma % 2 == 0 {
                        T::one()
                    } else {
                        -T::one()
                    };
                    let coef = sign * norm * kpi * from_usize::<T>(ma);
                    let fidx = if dim == 2 {
                        m[1 - axis] - 1
                    } else {
                        let (b, cc) = other_axes(axis);
                        (m[b] - 1) * per_side + (m[cc] - 1)
                    };
                    for (o, v) in vals.iter_mut().enumerate() {
                        *v += coef * ch_faces[f][(start + o) * mf + fidx];
                    }
                }
                interp[c] = lagrange_equispaced(&vals, s - from_usize::<T>(start));
            }
            if dim == 2 {
                interp[0] - lam.ln() / T::TAU() * interp[1]
            } else {
                interp[0]
            }
        })
        .collect();
    Ok(SeriesCoefficients { basis, m_max, values })
}

fn box_series<T: Real>(data: &TatData<T>, cfg: &SeriesConfig, dim: usize) -> Result<ScalarField<T>> {
    if data.dim() != dim {
        return Err(TatError::DimensionMismatch(format!("{dim}D series method given {}D data", data.dim())));
    }
    let coeffs = series_coefficients(data, cfg)?;
    let per_side = match *data.geometry().surface() {
        Surface::Square { per_side, .. } | Surface::Cube { per_side, .. } => per_side,
        _ => unreachable!(),
    };
    coeffs
        .synthesize(per_side)
        .map_err(|_| TatError::Numeric("series synthesis produced non-finite values".into()))
}

/// Sine-series reconstruction from spherical integrals on the boundary of a
/// cube, on the cube's interior detector-aligned nodes.
pub fn cubic_series<T: Real>(data: &TatData<T>, cfg: &SeriesConfig) -> Result<ScalarField<T>> {
    box_series(data, cfg, 3)
}

/// Two-dimensional analogue of [`cubic_series`] on a square.
pub fn square_series_2d<T: Real>(data: &TatData<T>, cfg: &SeriesConfig) -> Result<ScalarField<T>> {
    box_series(data, cfg, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_zero_field() {
        let g = DetectorGeometry::<f64>::square([0.0, 0.0], 0.5, 16).unwrap();
        let d = TatData::zeros(g, DataKind::Integral, 128, 1.5 / 127.0).unwrap();
        let f = square_series_2d(&d, &SeriesConfig::default()).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
        assert_eq!(f.grid().shape(), &[16, 16]);
    }

    #[test]
    fn coarse_time_step_is_reported() {
        let g = DetectorGeometry::<f64>::cube([0.0; 3], 0.5, 16).unwrap();
        let d = TatData::zeros(g, DataKind::Integral, 20, 1.8 / 19.0).unwrap();
        let err = cubic_series(&d, &SeriesConfig::default()).unwrap_err().to_string();
        assert!(err.contains("λ_max"), "{err}");
    }

    #[test]
    fn basis_derivative_matches_difference() {
        let b = BoxBasis::<f64>::new(3, [-0.5; 3], 1.0).unwrap();
        let m = [2, 3, 1];
        let x = [0.5, 0.1, -0.2];
        let e = 1e-6;
        let fd = (b.eval(&m, &[x[0] - e, x[1], x[2]]) - b.eval(&m, &[x[0] - 2.0 * e, x[1], x[2]])) / e;
        assert!((b.normal_derivative(&m, 1, &x) - fd).abs() < 1e-3 * fd.abs().max(1.0));
        assert!(b.eval(&m, &x).abs() < 1e-12);
    }

    #[test]
    fn synthesis_reproduces_single_mode() {
        let b = BoxBasis::<f64>::new(2, [0.0; 3], 2.0).unwrap();
        let mut values = vec![0.0; 9];
        values[1 * 3 + 2] = 1.0; // m = (2, 3)
        let c = SeriesCoefficients { basis: b, m_max: 3, values };
        let f = c.synthesize(7).unwrap();
        for idx in 0..f.grid().len() {
            let x = f.grid().node_at(idx);
            assert!((f.values()[idx] - b.eval(&[2, 3], &x)).abs() < 1e-12);
        }
    }
}
