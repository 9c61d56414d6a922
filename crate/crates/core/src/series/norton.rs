use num_complex::Complex;
use rayon::prelude::*;

use crate::data::{DataKind, TatData};
use crate::error::{invalid, Result, TatError};
use crate::forward::convert_kind;
use crate::geometry::SurfaceKind;
use crate::grid::{Grid, ScalarField};
use crate::scalar::{from_usize, lit, Real};
use crate::special::bessel::{bessel_j_orders, bessel_jy0, bessel_y_orders};
use crate::special::quadrature::trapezoid_weights;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NortonConfig<T> {
    /// Divide by `H_m = J_m + i Y_m` instead of `J_m`.
    pub use_hankel: bool,
    /// Highest angular order; default `N/2 - 1` for `N` detectors.
    pub m_max: Option<usize>,
    /// Truncation of the λ integrals; default `π / Δt`.
    pub lambda_max: Option<T>,
    /// Relative level below which `|J_m(λR)|` is treated as a zero and the
    /// frequency dropped (`J` division only).
    pub mask: T,
}

impl<T: Real> Default for NortonConfig<T> {
    fn default() -> Self {
        NortonConfig { use_hankel: true, m_max: None, lambda_max: None, mask: lit(0.05) }
    }
}

/// Angular Fourier coefficients `f_m(ρ)` of a reconstruction on the radial
/// grid `ρ_l = l Δρ`, for `m = -m_max..=m_max`.
#[derive(Debug, Clone)]
pub struct RadialModes<T> {
    pub m_max: usize,
    pub drho: T,
    modes: Vec<Vec<Complex<T>>>,
}

impl<T: Real> RadialModes<T> {
    pub fn mode(&self, m: i64) -> &[Complex<T>] {
        &self.modes[(m + self.m_max as i64) as usize]
    }

    /// Discrete L2 norm of `f_m` over the radial grid.
    pub fn norm(&self, m: i64) -> T {
        self.mode(m).iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    fn at(&self, idx: usize, rho: T) -> Complex<T> {
        let s = rho / self.drho;
        let v = &self.modes[idx];
        let l = s.floor().to_usize().unwrap_or(0).min(v.len() - 2);
        let f = s - from_usize::<T>(l);
        v[l] * (T::one() - f) + v[l + 1] * f
    }
}

/// Fourier–Hankel inversion of circular data up to radius `rho_max`.
pub fn norton_coefficients<T: Real>(data: &TatData<T>, rho_max: T, cfg: &NortonConfig<T>) -> Result<RadialModes<T>> {
    let geom = data.geometry();
    if geom.kind() != SurfaceKind::Circle {
        return Err(TatError::UnsupportedGeometry(format!("Norton's method needs a full circle of detectors, got {:?}", geom.kind())));
    }
    let (_, radius) = geom.require_round()?;
    let n_det = data.n_detectors();
    let m_max = cfg.m_max.unwrap_or((n_det / 2).saturating_sub(1));
    if 2 * m_max >= n_det {
        return Err(invalid(format!("m_max = {m_max} reaches the Nyquist limit of {n_det} detectors (must be < {})", n_det / 2)));
    }
    let dt = data.dt();
    let two_r = lit::<T>(2.0) * radius;
    if data.t_max() < lit::<T>(2.0 - 1e-9) * radius {
        return Err(invalid(format!("data reach radius {} but Norton's method needs 2R = {two_r}", data.t_max())));
    }
    if data.n_samples() < 3 {
        return Err(invalid("need at least three radial samples"));
    }
    let g = convert_kind(data, DataKind::Integral)?;
    let n_int = ((two_r / dt).floor().to_usize().unwrap_or(0) + 1).min(g.n_samples());
    let n_modes = 2 * m_max + 1;
    let mode_index = |mi: usize| -> usize {
        let m = mi as i64 - m_max as i64;
        if m >= 0 {
            m as usize
        } else {
            (n_det as i64 + m) as usize
        }
    };

    // g_m(r_j) = (1/N) sum_i g(θ_i, r_j) e^{-i m θ_i}
    let inv_n = T::one() / from_usize::<T>(n_det);
    let columns: Vec<Vec<Complex<T>>> = (0..n_int)
        .into_par_iter()
        .map(|j| {
            let mut buf: Vec<Complex<T>> = (0..n_det).map(|i| Complex::new(g.trace(i)[j], T::zero())).collect();
            T::fft(&mut buf, false);
            (0..n_modes).map(|mi| buf[mode_index(mi)] * inv_n).collect()
        })
        .collect();

    // λ_k t_j = k j Δλ Δt with Δλ = π / (2 (n_int - 1) Δt)
    let dl = T::PI() / (lit::<T>(2.0) * from_usize::<T>(n_int - 1) * dt);
    let l_max = cfg.lambda_max.unwrap_or(T::PI() / dt);
    let n_l = (l_max / dl).floor().to_usize().unwrap_or(0);
    if n_l < 2 {
        return Err(invalid("lambda_max leaves fewer than two frequencies"));
    }
    let step = dl * dt;
    let table: Vec<(T, T)> = (0..=n_l * (n_int - 1))
        .into_par_iter()
        .map(|p| if p == 0 { (T::one(), T::zero()) } else { bessel_jy0(from_usize::<T>(p) * step) })
        .collect();
    let wt = trapezoid_weights::<T>(n_int);

    // F_m(λ_k) = ĝ_m(λ_k) / (2π D_m(λ_k R)) with D = H_m or J_m
    let two_pi = T::TAU();
    let dens: Vec<(Vec<T>, Vec<T>)> = (1..=n_l)
        .into_par_iter()
        .map(|k| {
            let x = from_usize::<T>(k) * dl * radius;
            let j = bessel_j_orders(m_max, x);
            let y = if cfg.use_hankel { bessel_y_orders(m_max, x).unwrap_or_else(|_| vec![T::neg_infinity(); m_max + 1]) } else { Vec::new() };
            (j, y)
        })
        .collect();
    let j_peak: Vec<T> = (0..=m_max)
        .map(|m| dens.iter().map(|(j, _)| j[m].abs()).fold(T::zero(), T::max))
        .collect();
    let wl = trapezoid_weights::<T>(n_l + 1);
    // coef[mi][k-1] = w_k λ_k Δλ F_m(λ_k)
    let coef: Vec<Vec<Complex<T>>> = (0..n_modes)
        .into_par_iter()
        .map(|mi| {
            let am = (mi as i64 - m_max as i64).unsigned_abs() as usize;
            let gm = &columns;
            (1..=n_l)
                .map(|k| {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for j in 1..n_int {
                        let (j0, y0) = table[k * j];
                        let w = wt[j] * dt;
                        let c = gm[j][mi];
                        acc += if cfg.use_hankel { c * Complex::new(j0 * w, y0 * w) } else { c * (j0 * w) };
                    }
                    let (jm, ym) = (&dens[k - 1].0, &dens[k - 1].1);
                    let f = if cfg.use_hankel {
                        let h = Complex::new(jm[am], ym[am]);
                        if h.re.is_finite() && h.im.is_finite() {
                            acc / (h * two_pi)
                        } else {
                            Complex::new(T::zero(), T::zero())
                        }
                    } else if jm[am].abs() < cfg.mask * j_peak[am] {
                        Complex::new(T::zero(), T::zero())
                    } else {
                        acc / (jm[am] * two_pi)
                    };
                    let lam = from_usize::<T>(k) * dl;
                    f * (wl[k] * lam * dl)
                })
                .collect()
        })
        .collect();

    // f_m(ρ_l) = sum_k coef_m(k) J_|m|(λ_k ρ_l)
    let drho = dt;
    let n_rho = (rho_max / drho).ceil().to_usize().unwrap_or(0) + 2;
    let rows: Vec<Vec<Complex<T>>> = (0..n_rho)
        .into_par_iter()
        .map(|l| {
            let rho = from_usize::<T>(l) * drho;
            let mut acc = vec![Complex::new(T::zero(), T::zero()); n_modes];
            for k in 1..=n_l {
                let js = bessel_j_orders(m_max, from_usize::<T>(k) * dl * rho);
                for (mi, a) in acc.iter_mut().enumerate() {
                    let am = (mi as i64 - m_max as i64).unsigned_abs() as usize;
                    *a += coef[mi][k - 1] * js[am];
                }
            }
            acc
        })
        .collect();
    let modes = (0..n_modes).map(|mi| rows.iter().map(|r| r[mi]).collect()).collect();
    Ok(RadialModes { m_max, drho, modes })
}

/// Norton's reconstruction: angular Fourier series of the data, a Hankel
/// transform of each order divided by `2π H_m(λR)` (or `J_m(λR)`), an
/// inverse Hankel transform, and angular synthesis at the grid nodes.
pub fn norton2d<T: Real>(data: &TatData<T>, grid: &Grid<T>, cfg: &NortonConfig<T>) -> Result<ScalarField<T>> {
    if grid.dim() != 2 || data.dim() != 2 {
        return Err(TatError::DimensionMismatch("Norton's method is two-dimensional".into()));
    }
    let c = data.geometry().center();
    let polar = |idx: usize| {
        let x = grid.node_at(idx);
        let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
        (dx.hypot(dy), dy.atan2(dx))
    };
    let rho_max = (0..grid.len()).map(|i| polar(i).0).fold(T::zero(), T::max);
    let modes = norton_coefficients(data, rho_max, cfg)?;
    let m_max = modes.m_max;
    let values: Vec<T> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (rho, phi) = polar(idx);
            let step = Complex::from_polar(T::one(), phi);
            let mut e = Complex::from_polar(T::one(), -from_usize::<T>(m_max) * phi);
            let mut acc = T::zero();
            for mi in 0..2 * m_max + 1 {
                acc += (modes.at(mi, rho) * e).re;
                e *= step;
            }
            acc
        })
        .collect();
    ScalarField::new(*grid, values).map_err(|_| TatError::Numeric("Norton reconstruction produced non-finite values".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DetectorGeometry;

    #[test]
    fn zero_data_zero_field() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 32).unwrap();
        let d = TatData::zeros(g, DataKind::Integral, 64, 2.0 / 63.0).unwrap();
        let grid = Grid::cube(2, 9, -0.5, 0.5).unwrap();
        let f = norton2d(&d, &grid, &NortonConfig::default()).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nyquist_and_geometry_errors() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 32).unwrap();
        let d = TatData::zeros(g, DataKind::Integral, 64, 2.0 / 63.0).unwrap();
        let cfg = NortonConfig { m_max: Some(16), ..NortonConfig::default() };
        assert!(norton_coefficients(&d, 1.0, &cfg).is_err());
        let arc = DetectorGeometry::<f64>::arc([0.0, 0.0], 1.0, 0.0, 3.0, 32).unwrap();
        let d = TatData::zeros(arc, DataKind::Integral, 64, 2.0 / 63.0).unwrap();
        assert!(matches!(norton_coefficients(&d, 1.0, &NortonConfig::default()), Err(TatError::UnsupportedGeometry(_))));
    }
}
