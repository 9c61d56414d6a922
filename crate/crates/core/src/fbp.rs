//! Filtered backprojection for detectors on a full circle (2D) or sphere
//! (3D): filter each trace in the radius variable, integrate over all
//! spheres through the output point, and apply a final differential
//! operator where the formula has one.
//!
//! With `M` the spherical mean and `g` the spherical integral of `f`, the
//! implemented formulas are
//!
//! | variant | filter `q(y, t)` | outer operator |
//! |---|---|---|
//! | `fpr3d_laplacian` | `g / t` | `-1/(8π²R) Δ` |
//! | `fpr3d_d2t` | `g_tt / t` | `-1/(8π²R)` |
//! | `fpr3d_ddt_chain` | `t ((g/t)_t / t)_t` | `-1/(8π²R)` |
//! | `finch2d_laplacian` | `∫ t M log|t² - s²| dt` | `1/(2πR) Δ` |
//! | `finch2d_filtered` | `∫ (t M_t)_t log|t² - s²| dt` | `1/(2πR)` |
//! | `kunyansky_2d` | `PV ∫ g /(s² - t²) dt` | `-1/(2π²) div n` |
//! | `kunyansky_3d` | `(1/t) (g/t)_t` | `1/(8π²) div n` |
//! | `kunyansky_general` | `∫ [Y(λs) Ĵg(λ) - J(λs) Ŷg(λ)] λ^{2d-3} dλ` | `-1/(4(2π)^{d-1}) div n` |
//!
//! where `div n` means the divergence of the backprojection weighted by the
//! detector's exterior normal.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::data::{DataKind, TatData};
use crate::error::{invalid, Result, TatError};
use crate::forward::{convert_kind, differentiate};
use crate::geometry::DetectorGeometry;
use crate::grid::{Grid, ScalarField};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special::bessel::{radial_j, radial_y};
use crate::special::quadrature::{linear_uniform, trapezoid_weights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FbpVariant {
    Fpr3dLaplacian,
    Fpr3dD2t,
    Fpr3dDdtChain,
    Finch2dLaplacian,
    Finch2dFiltered,
    KunyanskyGeneral,
    Kunyansky2d,
    Kunyansky3d,
}

impl FbpVariant {
    pub const ALL: [FbpVariant; 8] = [
        FbpVariant::Fpr3dLaplacian,
        FbpVariant::Fpr3dD2t,
        FbpVariant::Fpr3dDdtChain,
        FbpVariant::Finch2dLaplacian,
        FbpVariant::Finch2dFiltered,
        FbpVariant::KunyanskyGeneral,
        FbpVariant::Kunyansky2d,
        FbpVariant::Kunyansky3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FbpVariant::Fpr3dLaplacian => "fpr3d_laplacian",
            FbpVariant::Fpr3dD2t => "fpr3d_d2t",
            FbpVariant::Fpr3dDdtChain => "fpr3d_ddt_chain",
            FbpVariant::Finch2dLaplacian => "finch2d_laplacian",
            FbpVariant::Finch2dFiltered => "finch2d_filtered",
            FbpVariant::KunyanskyGeneral => "kunyansky_general",
            FbpVariant::Kunyansky2d => "kunyansky_2d",
            FbpVariant::Kunyansky3d => "kunyansky_3d",
        }
    }

    /// Required dimension; `None` for formulas valid in 2D and 3D.
    pub fn dim(self) -> Option<usize> {
        match self {
            FbpVariant::Fpr3dLaplacian | FbpVariant::Fpr3dD2t | FbpVariant::Fpr3dDdtChain | FbpVariant::Kunyansky3d => Some(3),
            FbpVariant::Finch2dLaplacian | FbpVariant::Finch2dFiltered | FbpVariant::Kunyansky2d => Some(2),
            FbpVariant::KunyanskyGeneral => None,
        }
    }

    /// Default variant for a dimension.
    pub fn default_for(dim: usize) -> Self {
        if dim == 3 {
            FbpVariant::Fpr3dD2t
        } else {
            FbpVariant::Kunyansky2d
        }
    }

    fn post(self) -> PostOp {
        match self {
            FbpVariant::Fpr3dLaplacian | FbpVariant::Finch2dLaplacian => PostOp::Laplacian,
            FbpVariant::Fpr3dD2t | FbpVariant::Fpr3dDdtChain | FbpVariant::Finch2dFiltered => PostOp::Identity,
            FbpVariant::KunyanskyGeneral | FbpVariant::Kunyansky2d | FbpVariant::Kunyansky3d => PostOp::Divergence,
        }
    }
}

impl fmt::Display for FbpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FbpVariant {
    type Err = TatError;

    fn from_str(s: &str) -> Result<Self> {
        FbpVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| invalid(format!("unknown FBP variant '{s}'")))
    }
}

/// Discretisation parameters of the filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbpConfig<T> {
    /// The λ step is `π / (2 t_max)` divided by this factor.
    pub lambda_refine: usize,
    /// Truncation of the λ integral; default `π / Δt`.
    pub lambda_max: Option<T>,
    /// With `Some(ε)` the log kernel is regularised to `log(|t² - s²| + ε)`
    /// and integrated by the trapezoid rule; by default it is integrated
    /// exactly against the piecewise-linear interpolant of the trace.
    pub log_eps: Option<T>,
}

impl<T: Real> Default for FbpConfig<T> {
    fn default() -> Self {
        FbpConfig { lambda_refine: 1, lambda_max: None, log_eps: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostOp {
    Identity,
    Laplacian,
    Divergence,
}

/// Filtered traces `q(y_i, s_k)` on the radius grid `s_k = k Δt`, with the
/// constant and outer operator that complete the formula.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered<T> {
    pub variant: FbpVariant,
    pub n_samples: usize,
    pub ds: T,
    pub values: Vec<T>,
    pub scale: T,
    pub post: PostOp,
}

impl<T: Real> Filtered<T> {
    pub fn trace(&self, i: usize) -> &[T] {
        &self.values[i * self.n_samples..(i + 1) * self.n_samples]
    }
}

fn check_inputs<T: Real>(data: &TatData<T>, variant: FbpVariant) -> Result<T> {
    let (_, radius) = data.geometry().require_round()?;
    if let Some(d) = variant.dim() {
        if d != data.dim() {
            return Err(TatError::DimensionMismatch(format!("{variant} is a {d}D formula, data are {}D", data.dim())));
        }
    }
    if data.kind() == DataKind::Pressure {
        return Err(invalid("backprojection formulas take spherical means or integrals, not pressure"));
    }
    if data.t_max() < lit::<T>(2.0 - 1e-9) * radius {
        return Err(invalid(format!("data reach radius {} but the formulas need 2R = {}", data.t_max(), lit::<T>(2.0) * radius)));
    }
    Ok(radius)
}

/// Second derivative of uniform samples, second order with one-sided ends.
fn second_derivative<T: Real>(q: &[T], dt: T) -> Vec<T> {
    let n = q.len();
    let inv = T::one() / (dt * dt);
    let two = lit::<T>(2.0);
    (0..n)
        .map(|j| {
            if j == 0 {
                (two * q[0] - lit::<T>(5.0) * q[1] + lit::<T>(4.0) * q[2] - q[3]) * inv
            } else if j + 1 == n {
                (two * q[n - 1] - lit::<T>(5.0) * q[n - 2] + lit::<T>(4.0) * q[n - 3] - q[n - 4]) * inv
            } else {
                (q[j + 1] - two * q[j] + q[j - 1]) * inv
            }
        })
        .collect()
}

/// The radial filtration step of `variant`, exposed separately from the
/// backprojection.
pub fn fbp_filter_profile<T: Real>(variant: FbpVariant, data: &TatData<T>, cfg: &FbpConfig<T>) -> Result<Filtered<T>> {
    let radius = check_inputs(data, variant)?;
    if data.n_samples() < 4 {
        return Err(invalid("need at least four radial samples"));
    }
    let means = convert_kind(data, DataKind::Mean)?;
    let integrals = convert_kind(data, DataKind::Integral)?;
    let dim = data.dim();
    let dt = data.dt();
    let ns = data.n_samples();
    // the formulas integrate over t in [0, 2R]
    let two_r = lit::<T>(2.0) * radius;
    let n_int = ((two_r / dt).floor().to_usize().unwrap_or(ns - 1) + 1).min(ns);
    let t: Vec<T> = (0..ns).map(|j| from_usize::<T>(j) * dt).collect();
    let inv2dt = T::one() / (lit::<T>(2.0) * dt);
    let pi = T::PI();
    let two = lit::<T>(2.0);

    let (values, scale): (Vec<Vec<T>>, T) = match variant {
        FbpVariant::Fpr3dLaplacian | FbpVariant::Fpr3dD2t | FbpVariant::Fpr3dDdtChain => {
            let over_t = |v: Vec<T>| -> Vec<T> {
                v.into_iter().zip(&t).map(|(v, &t)| if t > T::zero() { v / t } else { T::zero() }).collect()
            };
            let rows = integrals
                .traces()
                .map(|g| match variant {
                    FbpVariant::Fpr3dLaplacian => over_t(g.to_vec()),
                    FbpVariant::Fpr3dD2t => over_t(second_derivative(g, dt)),
                    _ => {
                        let inner = over_t(differentiate(&over_t(g.to_vec()), inv2dt));
                        differentiate(&inner, inv2dt).into_iter().zip(&t).map(|(d, &t)| t * d).collect()
                    }
                })
                .collect();
            (rows, -T::one() / (lit::<T>(8.0) * pi * pi * radius))
        }
        FbpVariant::Finch2dLaplacian | FbpVariant::Finch2dFiltered => {
            let weights = match cfg.log_eps {
                None => log_product_weights::<T>(ns, n_int, dt),
                Some(eps) => {
                    let w = trapezoid_weights::<T>(n_int);
                    let mut out = Vec::with_capacity(ns * n_int);
                    for k in 0..ns {
                        let s2 = t[k] * t[k];
                        out.extend((0..n_int).map(|j| w[j] * dt * ((t[j] * t[j] - s2).abs() + eps).ln()));
                    }
                    out
                }
            };
            let rows = means
                .traces()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|m| {
                    let p: Vec<T> = if variant == FbpVariant::Finch2dLaplacian {
                        m.iter().zip(&t).map(|(&m, &t)| t * m).collect()
                    } else {
                        let tm: Vec<T> = differentiate(m, inv2dt).into_iter().zip(&t).map(|(d, &t)| t * d).collect();
                        differentiate(&tm, inv2dt)
                    };
                    weights.chunks(n_int).map(|row| row.iter().zip(&p).map(|(&w, &p)| w * p).sum()).collect()
                })
                .collect();
            (rows, T::one() / (two * pi * radius))
        }
        FbpVariant::Kunyansky3d => {
            let rows = integrals
                .traces()
                .map(|g| {
                    let u: Vec<T> = g.iter().zip(&t).map(|(&g, &t)| if t > T::zero() { g / t } else { T::zero() }).collect();
                    differentiate(&u, inv2dt)
                        .into_iter()
                        .zip(&t)
                        .map(|(d, &t)| if t > T::zero() { d / t } else { T::zero() })
                        .collect()
                })
                .collect();
            (rows, T::one() / (lit::<T>(8.0) * pi * pi))
        }
        FbpVariant::Kunyansky2d => {
            let rows = integrals.traces().collect::<Vec<_>>().par_iter().map(|g| pv_kernel(&g[..n_int], dt, ns)).collect();
            (rows, -T::one() / (two * pi * pi))
        }
        FbpVariant::KunyanskyGeneral => {
            let rows = general_filter(&integrals, n_int, cfg)?;
            // sign: ∫ [Y(λs)J(λt) - J(λs)Y(λt)] λ dλ = +(4/π)/(s² - t²) in 2D
            let scale = if dim == 2 {
                -T::one() / (lit::<T>(8.0) * pi)
            } else {
                -T::one() / (lit::<T>(16.0) * pi * pi)
            };
            (rows, scale)
        }
    };
    Ok(Filtered { variant, n_samples: ns, ds: dt, values: values.concat(), scale, post: variant.post() })
}

/// Weights `W[k][j]` with `sum_j W[k][j] p_j = ∫_0^T p(t) log|t² - s_k²| dt`
/// exactly for piecewise-linear `p`, `T = (n_int - 1) dt`.
fn log_product_weights<T: Real>(ns: usize, n_int: usize, dt: T) -> Vec<T> {
    // antiderivatives of log|u| and u log|u|
    fn f0(u: f64) -> f64 {
        if u == 0.0 { 0.0 } else { u * u.abs().ln() - u }
    }
    fn f1(u: f64) -> f64 {
        if u == 0.0 { 0.0 } else { 0.5 * u * u * u.abs().ln() - 0.25 * u * u }
    }
    let h = to_f64(dt);
    let mut out = Vec::with_capacity(ns * n_int);
    let mut row = vec![0.0f64; n_int];
    for k in 0..ns {
        let s = k as f64 * h;
        row.iter_mut().for_each(|w| *w = 0.0);
        for j in 0..n_int - 1 {
            let (ta, tb) = (j as f64 * h, (j + 1) as f64 * h);
            // log|t - s|: t = u + s
            let (ua, ub) = (ta - s, tb - s);
            let whole = f0(ub) - f0(ua);
            let up = (f1(ub) - f1(ua) + (s - ta) * whole) / h;
            // log(t + s): t = u - s
            let (va, vb) = (ta + s, tb + s);
            let whole2 = f0(vb) - f0(va);
            let up2 = (f1(vb) - f1(va) - (s + ta) * whole2) / h;
            row[j] += whole - up + whole2 - up2;
            row[j + 1] += up + up2;
        }
        out.extend(row.iter().map(|&w| lit::<T>(w)));
    }
    out
}

/// `K(s_k) = PV ∫_0^T g(t) / (s_k² - t²) dt` for every radius sample, with
/// `T = (g.len() - 1) dt`, written as
/// `(1 / 2s) [PV ∫ g / (s - t) dt + ∫ g / (s + t) dt]` and the principal value
/// taken by subtracting `g(s)`:
/// `PV ∫ g / (s - t) = ∫ (g(t) - g(s)) / (s - t) dt + g(s) ln(s / (T - s))`.
fn pv_kernel<T: Real>(g: &[T], dt: T, ns: usize) -> Vec<T> {
    let n = g.len();
    let w = trapezoid_weights::<T>(n);
    let inv2dt = T::one() / (lit::<T>(2.0) * dt);
    let dg = differentiate(g, inv2dt);
    let big_t = from_usize::<T>(n - 1) * dt;
    let mut out = vec![T::zero(); ns];
    for k in 1..ns {
        let s = from_usize::<T>(k) * dt;
        let gs = if k < n { g[k] } else { T::zero() };
        let mut pv = T::zero();
        let mut reg = T::zero();
        for j in 0..n {
            let tj = from_usize::<T>(j) * dt;
            if j == k {
                pv += w[j] * (-dg[j]);
            } else {
                pv += w[j] * (g[j] - gs) / (s - tj);
            }
            reg += w[j] * g[j] / (s + tj);
        }
        pv = pv * dt;
        if gs != T::zero() && k + 1 < n {
            pv += gs * (s / (big_t - s)).ln();
        } else if k >= n {
            // s beyond the data range: plain integral, no singularity
            pv = (0..n).map(|j| w[j] * g[j] / (s - from_usize::<T>(j) * dt)).sum::<T>() * dt;
        }
        out[k] = (pv + reg * dt) / (lit::<T>(2.0) * s);
    }
    out[0] = if ns > 1 { out[1] } else { T::zero() };
    out
}

/// λ-domain filter of the general formula. Kernel values are read from
/// tables indexed by `k * j`, since `λ_k t_j = k j Δλ Δt`.
fn general_filter<T: Real>(integrals: &TatData<T>, n_int: usize, cfg: &FbpConfig<T>) -> Result<Vec<Vec<T>>> {
    let dim = integrals.dim();
    let dt = integrals.dt();
    let ns = integrals.n_samples();
    if cfg.lambda_refine == 0 {
        return Err(invalid("lambda_refine must be at least 1"));
    }
    let t_max = integrals.t_max();
    let dl = T::PI() / (lit::<T>(2.0) * t_max * from_usize::<T>(cfg.lambda_refine));
    let l_max = cfg.lambda_max.unwrap_or(T::PI() / dt);
    if !(l_max > dl) {
        return Err(invalid("lambda_max must exceed the lambda step"));
    }
    let n_l = (l_max / dl).floor().to_usize().unwrap_or(0) + 1;
    let step = dl * dt;
    let table_len = (n_l - 1) * (ns - 1) + 1;
    let (jt, yt): (Vec<T>, Vec<T>) = (0..table_len)
        .into_par_iter()
        .map(|p| {
            if p == 0 {
                (radial_j(dim, T::zero()), T::zero())
            } else {
                let z = from_usize::<T>(p) * step;
                (radial_j(dim, z), radial_y(dim, z))
            }
        })
        .unzip();
    let power = 2 * dim as i32 - 3;
    let wl: Vec<T> = trapezoid_weights::<T>(n_l)
        .into_iter()
        .enumerate()
        .map(|(k, w)| w * dl * (from_usize::<T>(k) * dl).powi(power))
        .collect();
    let wt = trapezoid_weights::<T>(n_int);
    let rows = integrals
        .traces()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|g| {
            let mut a = vec![T::zero(); n_l];
            let mut b = vec![T::zero(); n_l];
            for k in 1..n_l {
                let (mut sa, mut sb) = (T::zero(), T::zero());
                for j in 1..n_int {
                    let gj = wt[j] * g[j];
                    sa += jt[k * j] * gj;
                    sb += yt[k * j] * gj;
                }
                a[k] = sa * dt * wl[k];
                b[k] = sb * dt * wl[k];
            }
            (0..ns)
                .map(|m| {
                    if m == 0 {
                        return T::zero();
                    }
                    (1..n_l).map(|k| yt[k * m] * a[k] - jt[k * m] * b[k]).sum()
                })
                .collect::<Vec<T>>()
        })
        .collect::<Vec<_>>();
    Ok(rows.into_iter().map(|mut r| {
        if ns > 1 {
            r[0] = r[1];
        }
        r
    }).collect())
}

/// `sum_i w_i φ_i q_i(|x - y_i|)` at every node, with `φ_i = 1` or the
/// components of the exterior normal.
fn backproject<T: Real>(geom: &DetectorGeometry<T>, filt: &Filtered<T>, grid: &Grid<T>, normal_weighted: bool) -> Vec<Vec<T>> {
    let dim = grid.dim();
    let n_comp = if normal_weighted { dim } else { 1 };
    let inv_ds = T::one() / filt.ds;
    let pos = geom.positions();
    let nrm = geom.normals();
    let wts = geom.weights();
    let per_node: Vec<[T; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let x = grid.node_at(idx);
            let mut acc = [T::zero(); 3];
            for i in 0..geom.len() {
                let y = pos[i];
                let mut r2 = T::zero();
                for a in 0..dim {
                    let d = x[a] - y[a];
                    r2 += d * d;
                }
                let q = linear_uniform(filt.trace(i), inv_ds, r2.sqrt()) * wts[i];
                if normal_weighted {
                    for a in 0..dim {
                        acc[a] += q * nrm[i][a];
                    }
                } else {
                    acc[0] += q;
                }
            }
            acc
        })
        .collect();
    (0..n_comp).map(|c| per_node.iter().map(|v| v[c]).collect()).collect()
}

/// First derivative along `axis`, centred inside, second-order one-sided at the ends.
fn grid_derivative<T: Real>(grid: &Grid<T>, u: &[T], axis: usize) -> Vec<T> {
    let shape = grid.shape();
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let h = grid.spacing()[axis];
    let inv = T::one() / (lit::<T>(2.0) * h);
    let mut out = vec![T::zero(); u.len()];
    let mut line = vec![T::zero(); n];
    for start in 0..u.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        for (i, v) in line.iter_mut().enumerate() {
            *v = u[start + i * stride];
        }
        for (i, d) in differentiate(&line, inv).into_iter().enumerate() {
            out[start + i * stride] = d;
        }
    }
    out
}

fn grid_second_derivative<T: Real>(grid: &Grid<T>, u: &[T], axis: usize) -> Vec<T> {
    let shape = grid.shape();
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let h = grid.spacing()[axis];
    let mut out = vec![T::zero(); u.len()];
    let mut line = vec![T::zero(); n];
    for start in 0..u.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        for (i, v) in line.iter_mut().enumerate() {
            *v = u[start + i * stride];
        }
        for (i, d) in second_derivative(&line, h).into_iter().enumerate() {
            out[start + i * stride] = d;
        }
    }
    out
}

/// Backprojects filtered traces and applies the formula's outer operator.
pub fn backproject_filtered<T: Real>(geom: &DetectorGeometry<T>, filt: &Filtered<T>, grid: &Grid<T>) -> Result<ScalarField<T>> {
    if grid.dim() != geom.dim() {
        return Err(TatError::DimensionMismatch(format!("{}D grid for {}D detectors", grid.dim(), geom.dim())));
    }
    if filt.values.len() != geom.len() * filt.n_samples {
        return Err(TatError::DimensionMismatch("filtered traces do not match the detector count".into()));
    }
    let (min_nodes, what) = match filt.post {
        PostOp::Identity => (2, ""),
        PostOp::Divergence => (3, "divergence"),
        PostOp::Laplacian => (4, "Laplacian"),
    };
    if grid.shape().iter().any(|&n| n < min_nodes) {
        return Err(invalid(format!("the {what} stencil needs at least {min_nodes} nodes per axis")));
    }
    let (center, radius) = geom.require_round()?;
    let far = (0..grid.len()).any(|idx| {
        let x = grid.node_at(idx);
        (0..grid.dim()).map(|a| (x[a] - center[a]) * (x[a] - center[a])).sum::<T>() > radius * radius
    });
    if far {
        log::warn!("reconstruction grid reaches outside the detector surface; values there are not meaningful");
    }
    let values = match filt.post {
        PostOp::Identity => backproject(geom, filt, grid, false).swap_remove(0),
        PostOp::Laplacian => {
            let b = backproject(geom, filt, grid, false).swap_remove(0);
            let mut lap = vec![T::zero(); b.len()];
            for a in 0..grid.dim() {
                for (l, d) in lap.iter_mut().zip(grid_second_derivative(grid, &b, a)) {
                    *l += d;
                }
            }
            lap
        }
        PostOp::Divergence => {
            let v = backproject(geom, filt, grid, true);
            let mut div = vec![T::zero(); grid.len()];
            for (a, comp) in v.iter().enumerate() {
                for (dv, d) in div.iter_mut().zip(grid_derivative(grid, comp, a)) {
                    *dv += d;
                }
            }
            div
        }
    };
    let scaled = values.into_iter().map(|v| v * filt.scale).collect();
    ScalarField::new(*grid, scaled).map_err(|_| TatError::Numeric("reconstruction produced non-finite values".into()))
}

/// Filtered backprojection reconstruction on `grid`.
pub fn fbp_invert<T: Real>(data: &TatData<T>, grid: &Grid<T>, variant: FbpVariant, cfg: &FbpConfig<T>) -> Result<ScalarField<T>> {
    if grid.dim() != data.dim() {
        return Err(TatError::DimensionMismatch(format!("{}D grid for {}D data", grid.dim(), data.dim())));
    }
    let filt = fbp_filter_profile(variant, data, cfg)?;
    backproject_filtered(data.geometry(), &filt, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel::radial_j;

    #[test]
    fn names_roundtrip() {
        for v in FbpVariant::ALL {
            assert_eq!(v.name().parse::<FbpVariant>().unwrap(), v);
        }
        assert!("fbp".parse::<FbpVariant>().is_err());
    }

    #[test]
    fn zero_data_zero_filter() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 16).unwrap();
        let d = TatData::zeros(g, DataKind::Integral, 64, 2.0 / 63.0).unwrap();
        for v in [FbpVariant::Kunyansky2d, FbpVariant::Finch2dFiltered, FbpVariant::KunyanskyGeneral] {
            let f = fbp_filter_profile(v, &d, &FbpConfig::default()).unwrap();
            assert!(f.values.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn kernel_limits_at_zero() {
        assert_eq!(radial_j(2, 0.0f64), 1.0);
        let want = 1.0 / (2f64.sqrt() * (std::f64::consts::PI.sqrt() / 2.0));
        assert!((radial_j(3, 0.0f64) - want).abs() < 1e-15);
    }

    #[test]
    fn variant_dimension_and_geometry_checks() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 16).unwrap();
        let d = TatData::zeros(g, DataKind::Integral, 64, 2.0 / 63.0).unwrap();
        assert!(matches!(fbp_filter_profile(FbpVariant::Fpr3dD2t, &d, &FbpConfig::default()), Err(TatError::DimensionMismatch(_))));
        let arc = DetectorGeometry::<f64>::arc([0.0, 0.0], 1.0, 0.0, 3.0, 16).unwrap();
        let d = TatData::zeros(arc, DataKind::Integral, 64, 2.0 / 63.0).unwrap();
        assert!(matches!(fbp_filter_profile(FbpVariant::Kunyansky2d, &d, &FbpConfig::default()), Err(TatError::UnsupportedGeometry(_))));
    }

    #[test]
    fn pv_kernel_matches_closed_form() {
        // g = 1 on [0, T]: PV ∫ 1/(s² - t²) dt = ln((T + s)/(T - s)) / (2s)
        let n = 401;
        let dt = 2.0 / (n - 1) as f64;
        let g = vec![1.0; n];
        let k = pv_kernel(&g, dt, n);
        for &j in &[50usize, 133, 200, 310] {
            let s = j as f64 * dt;
            let want = ((2.0 + s) / (2.0 - s)).ln() / (2.0 * s);
            assert!((k[j] - want).abs() < 1e-3 * want.abs().max(1.0), "{j}: {} vs {want}", k[j]);
        }
    }
}
