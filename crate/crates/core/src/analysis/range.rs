//! Necessary conditions on circular mean data.
//!
//! Moment conditions: `M_k(θ) = ∫ r^{2k+1} g(θ, r) dr` is the restriction of
//! a polynomial of degree `≤ 2k` to the circle, hence a trigonometric
//! polynomial of degree `≤ 2k`. Orthogonality: the Hankel-type transform
//! `ĝ(θ, λ) = ∫ g(θ, t) J_0(λt) t dt` has angular modes `ĝ_m` vanishing at
//! the zeros of `J_m` (unit circle; other radii are rescaled).

use std::io::Write;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::data::{DataKind, TatData};
use crate::error::{invalid, Result, TatError};
use crate::forward::convert_kind;
use crate::geometry::{DetectorGeometry, SurfaceKind};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special::bessel::{bessel_jy0, bessel_zeros};
use crate::special::quadrature::trapezoid_weights;

/// Relative residual accepted by default.
pub const DEFAULT_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Moment,
    Orthogonality,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Moment => "moment",
            Condition::Orthogonality => "orthogonality",
        }
    }
}

/// One residual: moment order `k`, or angular order `m` with zero index `q`
/// (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEntry<T> {
    pub condition: Condition,
    pub index: (usize, Option<usize>),
    pub residual: T,
}

impl<T> RangeEntry<T> {
    fn label(&self) -> String {
        match self.index {
            (k, None) => k.to_string(),
            (m, Some(q)) => format!("{m}:{q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport<T> {
    pub entries: Vec<RangeEntry<T>>,
    /// Data norm the orthogonality residuals are divided by.
    pub normalization: T,
    pub tolerance: T,
}

impl<T: Real> RangeReport<T> {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.residual <= self.tolerance)
    }

    /// Largest residual, optionally of one condition only.
    pub fn max_residual(&self, condition: Option<Condition>) -> T {
        self.entries
            .iter()
            .filter(|e| condition.is_none_or(|c| c == e.condition))
            .fold(T::zero(), |m, e| m.max(e.residual))
    }

    /// Appends the entries of `other`; the tolerance of `self` is kept.
    pub fn merge(mut self, other: RangeReport<T>) -> Self {
        self.entries.extend(other.entries);
        self
    }

    /// CSV rows `condition,index,residual,tolerance,pass`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let res = (|| -> csv::Result<()> {
            out.write_record(["condition", "index", "residual", "tolerance", "pass"])?;
            for e in &self.entries {
                out.write_record([
                    e.condition.name().to_string(),
                    e.label(),
                    format!("{:e}", to_f64(e.residual)),
                    format!("{:e}", to_f64(self.tolerance)),
                    (e.residual <= self.tolerance).to_string(),
                ])?;
            }
            out.flush()?;
            Ok(())
        })();
        res.map_err(|e| TatError::Io(std::io::Error::other(e)))
    }
}

fn require_circle<T: Real>(geom: &DetectorGeometry<T>) -> Result<T> {
    if geom.kind() != SurfaceKind::Circle {
        return Err(TatError::UnsupportedGeometry(format!("range checks need a full circle of detectors, got {:?}", geom.kind())));
    }
    Ok(geom.require_round()?.1)
}

fn as_means<T: Real>(data: &TatData<T>) -> Result<TatData<T>> {
    if data.kind() == DataKind::Mean {
        return Ok(data.clone());
    }
    log::info!("range check: converting {} data to means", data.kind().name());
    convert_kind(data, DataKind::Mean)
}

/// Moment residuals for `k = 0..=k_max`: the share of the angular energy of
/// `M_k` in modes `|m| > 2k`.
pub fn moment_check<T: Real>(data: &TatData<T>, k_max: usize, tolerance: T) -> Result<RangeReport<T>> {
    require_circle(data.geometry())?;
    let g = as_means(data)?;
    let n = g.n_detectors();
    if 4 * k_max + 1 > n {
        return Err(invalid(format!("k_max = {k_max} needs at least {} detectors", 4 * k_max + 1)));
    }
    let dt = g.dt();
    let w = trapezoid_weights::<T>(g.n_samples());
    let entries = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut buf: Vec<Complex<T>> = g
                .traces()
                .map(|tr| {
                    let s = tr
                        .iter()
                        .enumerate()
                        .map(|(j, &v)| w[j] * g.time(j).powi(2 * k as i32 + 1) * v)
                        .sum::<T>();
                    Complex::new(s * dt, T::zero())
                })
                .collect();
            T::fft(&mut buf, false);
            let (mut high, mut total) = (T::zero(), T::zero());
            for (i, c) in buf.iter().enumerate() {
                let m = if i <= n / 2 { i } else { n - i };
                total += c.norm_sqr();
                if m > 2 * k {
                    high += c.norm_sqr();
                }
            }
            let residual = if total > T::zero() { high / total } else { T::zero() };
            RangeEntry { condition: Condition::Moment, index: (k, None), residual }
        })
        .collect();
    Ok(RangeReport { entries, normalization: data_norm(&g)?, tolerance })
}

/// `sqrt(mean_i ∫ g(θ_i, t)² t dt)` on the circle rescaled to radius one.
fn data_norm<T: Real>(g: &TatData<T>) -> Result<T> {
    let radius = require_circle(g.geometry())?;
    let dt = g.dt() / radius;
    let w = trapezoid_weights::<T>(g.n_samples());
    let sum: T = g
        .traces()
        .map(|tr| tr.iter().enumerate().map(|(j, &v)| w[j] * v * v * from_usize::<T>(j) * dt).sum::<T>())
        .sum();
    Ok((sum * dt / from_usize::<T>(g.n_detectors())).sqrt())
}

/// Orthogonality residuals `|ĝ_m(j_{m,q})| / ‖g‖` for `0 ≤ m ≤ m_max`,
/// `1 ≤ q ≤ q_max`.
pub fn orthogonality_check<T: Real>(data: &TatData<T>, m_max: usize, q_max: usize, tolerance: T) -> Result<RangeReport<T>> {
    let radius = require_circle(data.geometry())?;
    let g = as_means(data)?;
    let n = g.n_detectors();
    if 2 * m_max >= n {
        return Err(invalid(format!("m_max = {m_max} reaches the Nyquist limit of {n} detectors")));
    }
    if g.t_max() < lit::<T>(2.0 - 1e-9) * radius {
        return Err(invalid(format!("data reach radius {} but the check needs 2R = {}", g.t_max(), lit::<T>(2.0) * radius)));
    }
    let dt = g.dt() / radius;
    let n_int = ((lit::<T>(2.0) / dt).floor().to_usize().unwrap_or(0) + 1).min(g.n_samples());
    let w = trapezoid_weights::<T>(n_int);
    let norm = data_norm(&g)?;
    let angles = g.geometry().angles();
    let jobs: Vec<(usize, usize, T)> = (0..=m_max)
        .flat_map(|m| bessel_zeros::<T>(m, q_max).into_iter().enumerate().map(move |(q, z)| (m, q + 1, z)))
        .collect();
    let entries = jobs
        .into_par_iter()
        .map(|(m, q, lambda)| {
            let kernel: Vec<T> = (0..n_int)
                .map(|j| {
                    if j == 0 {
                        return T::zero();
                    }
                    let t = from_usize::<T>(j) * dt;
                    w[j] * bessel_jy0(lambda * t).0 * t * dt
                })
                .collect();
            let mut acc = Complex::new(T::zero(), T::zero());
            for (tr, &th) in g.traces().zip(&angles) {
                let v: T = tr[..n_int].iter().zip(&kernel).map(|(&a, &b)| a * b).sum();
                acc += Complex::from_polar(v, -from_usize::<T>(m) * th);
            }
            let value = acc.norm() / from_usize::<T>(n);
            let residual = if norm > T::zero() { value / norm } else { T::zero() };
            RangeEntry { condition: Condition::Orthogonality, index: (m, Some(q)), residual }
        })
        .collect();
    Ok(RangeReport { entries, normalization: norm, tolerance })
}

/// Adds i.i.d. Gaussian noise whose L2 norm is `level` times that of the data.
pub fn with_noise<T: Real>(data: &TatData<T>, level: T, seed: u64) -> Result<TatData<T>> {
    if !(level >= T::zero()) {
        return Err(invalid("noise level must be non-negative"));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let ns = data.n_samples();
    // spherical integrals vanish identically at r = 0
    let skip_origin = data.kind() == DataKind::Integral;
    let noise: Vec<f64> = (0..data.values().len())
        .map(|p| {
            let e: f64 = StandardNormal.sample(&mut rng);
            if skip_origin && p % ns == 0 {
                0.0
            } else {
                e
            }
        })
        .collect();
    let nn = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = if nn > 0.0 { to_f64(level) * to_f64(data.l2_norm()) / nn } else { 0.0 };
    let values = data.values().iter().zip(&noise).map(|(&v, &e)| v + lit::<T>(s * e)).collect();
    data.with_values(data.kind(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_pass_and_csv_shape() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 32).unwrap();
        let d = TatData::zeros(g, DataKind::Mean, 41, 0.05).unwrap();
        let r = moment_check(&d, 3, 1e-2).unwrap().merge(orthogonality_check(&d, 4, 3, 1e-2).unwrap());
        assert!(r.passed());
        assert_eq!(r.entries.len(), 4 + 5 * 3);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + r.entries.len());
        assert!(text.lines().nth(5).unwrap().starts_with("orthogonality,0:1,"));
    }

    #[test]
    fn noise_is_seeded_and_scaled() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 16).unwrap();
        let vals: Vec<f64> = (0..16 * 20).map(|i| (i as f64 * 0.1).sin()).collect();
        let d = TatData::new(g, DataKind::Mean, 20, 0.1, vals).unwrap();
        let a = with_noise(&d, 0.1, 7).unwrap();
        let b = with_noise(&d, 0.1, 7).unwrap();
        assert_eq!(a.values(), b.values());
        let diff: f64 = a.values().iter().zip(d.values()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((diff / d.l2_norm() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn arcs_are_refused() {
        let g = DetectorGeometry::<f64>::arc([0.0, 0.0], 1.0, 0.0, 3.0, 16).unwrap();
        let d = TatData::zeros(g, DataKind::Mean, 41, 0.05).unwrap();
        assert!(matches!(moment_check(&d, 1, 1e-2), Err(TatError::UnsupportedGeometry(_))));
        assert!(matches!(orthogonality_check(&d, 1, 1, 1e-2), Err(TatError::UnsupportedGeometry(_))));
    }
}
