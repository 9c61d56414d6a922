//! Eigenfunction expansion for a variable sound speed on a square.
//!
//! On the interior nodes of the detector-conforming grid the operator
//! `-c² Δ_h` (Dirichlet) is symmetrised as `C (-Δ_h) C`, `C = diag(c)`; its
//! eigenvectors `v_k` give `ψ_k = C v_k / h`, orthonormal in
//! `<u, w> = sum u w c^{-2} h²`.
//!
//! Projecting the leapfrog scheme onto `ψ_k` gives, for
//! `a_k^n = <u^n, ψ_k>`,
//! `a^{n+1} - 2 cos θ a^n + a^{n-1} = Δt² G^n` with `sin(θ/2) = λ_k Δt / 2` and
//! the boundary flux `G^n = sum_b p_b^n ψ_k(inner neighbour of b)`. Since
//! `a^n` decays, `f_k = a^0 = (Δt² / sin θ) sum_n G^n sin(nθ)`, the discrete
//! form of `f_k = -λ_k^{-1} ∫ sin(λ_k t) g_k(t) dt`.

use rayon::prelude::*;

use crate::data::{DataKind, TatData};
use crate::error::{invalid, Result, TatError};
use crate::geometry::{face_axis, DetectorGeometry, Surface};
use crate::grid::{Grid, ScalarField};
use crate::scalar::{from_usize, lit, Real};
use crate::wavesim::conforming_grid;

/// Largest interior grid side for the dense eigensolver.
const MAX_SIDE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenConfig {
    /// Number of eigenpairs used in the expansion.
    pub k_max: usize,
}

/// Lowest Dirichlet eigenpairs of `-c² Δ_h` on the interior nodes of a square
/// detector-conforming grid.
#[derive(Debug, Clone)]
pub struct DiscreteEigenBasis<T> {
    grid: Grid<T>,
    c: Vec<T>,
    lambdas: Vec<T>,
    vectors: Vec<T>,
}

impl<T: Real> DiscreteEigenBasis<T> {
    /// `c` is given on the full conforming grid of `geom` (boundary included).
    pub fn new(geom: &DetectorGeometry<T>, c: &ScalarField<T>, k_max: usize) -> Result<Self> {
        let per_side = match *geom.surface() {
            Surface::Square { per_side, .. } => per_side,
            _ => return Err(TatError::UnsupportedGeometry(format!("the eigen-expansion needs a square, got {:?}", geom.kind()))),
        };
        if per_side > MAX_SIDE {
            return Err(invalid(format!("dense eigensolve limited to {MAX_SIDE} nodes per side, got {per_side}")));
        }
        let full = conforming_grid(geom)?;
        if !full.same_layout(c.grid()) {
            return Err(TatError::DimensionMismatch("sound speed must be sampled on the detector-conforming grid".into()));
        }
        if c.values().iter().any(|&v| !(v > T::zero())) {
            return Err(invalid("sound speed must be positive"));
        }
        let m = per_side;
        let n = m * m;
        if k_max == 0 || k_max > n {
            return Err(invalid(format!("k_max = {k_max} but only {n} eigenpairs exist")));
        }
        let h = full.spacing()[0];
        let ci: Vec<T> = (0..n).map(|p| c.get([p / m + 1, p % m + 1, 0])).collect();
        let inv_h2 = T::one() / (h * h);
        let mut b = vec![T::zero(); n * n];
        for p in 0..n {
            let (i, j) = (p / m, p % m);
            b[p * n + p] = lit::<T>(4.0) * inv_h2 * ci[p] * ci[p];
            let mut link = |q: usize| {
                let v = -inv_h2 * ci[p] * ci[q];
                b[p * n + q] = v;
                b[q * n + p] = v;
            };
            if i + 1 < m {
                link(p + m);
            }
            if j + 1 < m {
                link(p + 1);
            }
        }
        let (mu, vecs) = T::symmetric_eigen(n, b).ok_or_else(|| TatError::Numeric("eigensolver did not converge".into()))?;
        let lambdas = mu[..k_max].iter().map(|&v| v.max(T::zero()).sqrt()).collect();
        let inv_h = T::one() / h;
        let mut vectors = Vec::with_capacity(n * k_max);
        for k in 0..k_max {
            vectors.extend(vecs[k * n..(k + 1) * n].iter().zip(&ci).map(|(&v, &c)| c * v * inv_h));
        }
        let origin = [full.origin()[0] + h, full.origin()[1] + h];
        let grid = Grid::new(&[m, m], &origin, &[h, h])?;
        Ok(DiscreteEigenBasis { grid, c: ci, lambdas, vectors })
    }

    /// Interior nodes on which the eigenfunctions live.
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Wavenumbers `λ_k` (eigenvalue `λ_k²`), ascending.
    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn psi(&self, k: usize) -> &[T] {
        let n = self.grid.len();
        &self.vectors[k * n..(k + 1) * n]
    }

    /// `sum u w c^{-2} h²`.
    pub fn inner(&self, u: &[T], w: &[T]) -> T {
        let h2 = self.grid.cell_volume();
        u.iter().zip(w).zip(&self.c).map(|((&a, &b), &c)| a * b / (c * c)).sum::<T>() * h2
    }

    /// `||-c² Δ_h ψ_k - λ_k² ψ_k|| / (λ_k² ||ψ_k||)`.
    pub fn residual(&self, k: usize) -> T {
        let m = self.grid.shape()[0];
        let h = self.grid.spacing()[0];
        let psi = self.psi(k);
        let at = |i: isize, j: isize| if i < 0 || j < 0 || i >= m as isize || j >= m as isize { T::zero() } else { psi[i as usize * m + j as usize] };
        let l2 = self.lambdas[k] * self.lambdas[k];
        let (mut num, mut den) = (T::zero(), T::zero());
        for p in 0..m * m {
            let (i, j) = ((p / m) as isize, (p % m) as isize);
            let lap = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - lit::<T>(4.0) * psi[p]) / (h * h);
            let r = -self.c[p] * self.c[p] * lap - l2 * psi[p];
            num += r * r;
            den += psi[p] * psi[p];
        }
        (num / den).sqrt() / l2
    }

    /// Interior node adjacent to every detector of the square, in detector order.
    fn neighbours(&self) -> Vec<usize> {
        let m = self.grid.shape()[0];
        let mut out = Vec::with_capacity(4 * m);
        for face in 0..4 {
            let (axis, sign) = face_axis::<T>(face);
            let fixed = if sign < T::zero() { 0 } else { m - 1 };
            for j in 0..m {
                let (i0, i1) = if axis == 0 { (fixed, j) } else { (j, fixed) };
                out.push(i0 * m + i1);
            }
        }
        out
    }

    /// Expansion coefficients `f_k` from boundary pressure traces.
    pub fn coefficients(&self, data: &TatData<T>) -> Result<Vec<T>> {
        if data.kind() != DataKind::Pressure {
            return Err(invalid("the eigen-expansion takes pressure traces"));
        }
        let m = self.grid.shape()[0];
        match *data.geometry().surface() {
            Surface::Square { per_side, .. } if per_side == m => {}
            _ => return Err(TatError::DimensionMismatch("data geometry does not match the eigenbasis".into())),
        }
        let dt = data.dt();
        let lmax = self.lambdas.last().copied().unwrap_or(T::zero());
        if lmax * dt / lit::<T>(2.0) >= T::one() {
            return Err(invalid("time step too large for the highest eigenfrequency"));
        }
        let nb = self.neighbours();
        let ns = data.n_samples();
        let dt2 = dt * dt;
        Ok((0..self.len())
            .into_par_iter()
            .map(|k| {
                let psi = self.psi(k);
                let theta = lit::<T>(2.0) * (self.lambdas[k] * dt / lit::<T>(2.0)).asin();
                let mut acc = T::zero();
                for n in 1..ns {
                    let flux: T = nb.iter().enumerate().map(|(b, &q)| data.trace(b)[n] * psi[q]).sum();
                    acc += flux * (from_usize::<T>(n) * theta).sin();
                }
                acc * dt2 / theta.sin()
            })
            .collect())
    }

    /// `sum_k f_k ψ_k` on the interior grid.
    pub fn synthesize(&self, coeffs: &[T]) -> ScalarField<T> {
        let n = self.grid.len();
        let mut out = vec![T::zero(); n];
        for (k, &a) in coeffs.iter().enumerate() {
            for (o, &p) in out.iter_mut().zip(self.psi(k)) {
                *o += a * p;
            }
        }
        ScalarField::new(self.grid, out).expect("finite expansion")
    }
}

/// Reconstructs `f` on the interior nodes of the square from boundary
/// pressure recorded on the conforming grid of the same speed `c`.
pub fn eigen_expand_variable_speed<T: Real>(data: &TatData<T>, c: &ScalarField<T>, cfg: &EigenConfig) -> Result<ScalarField<T>> {
    let basis = DiscreteEigenBasis::new(data.geometry(), c, cfg.k_max)?;
    let coeffs = basis.coefficients(data)?;
    if coeffs.iter().any(|v| !v.is_finite()) {
        return Err(TatError::Numeric("non-finite expansion coefficient".into()));
    }
    Ok(basis.synthesize(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(m: usize) -> (DetectorGeometry<f64>, ScalarField<f64>) {
        let geom = DetectorGeometry::square([0.0, 0.0], 0.5, m).unwrap();
        let grid = conforming_grid(&geom).unwrap();
        let c = ScalarField::from_fn(grid, |x: &[f64]| 1.0 + 0.1 * (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
        (geom, c)
    }

    #[test]
    fn basis_is_orthonormal_and_accurate() {
        let (geom, c) = setup(12);
        let b = DiscreteEigenBasis::new(&geom, &c, 40).unwrap();
        assert!(b.lambdas().windows(2).all(|w| w[0] <= w[1]));
        for k in 0..40 {
            assert!(b.residual(k) < 1e-8, "k={k} {}", b.residual(k));
            for l in 0..=k {
                let ip = b.inner(b.psi(k), b.psi(l));
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_data_and_bad_inputs() {
        let (geom, c) = setup(8);
        let d = TatData::zeros(geom.clone(), DataKind::Pressure, 50, 0.01).unwrap();
        let f = eigen_expand_variable_speed(&d, &c, &EigenConfig { k_max: 10 }).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
        assert!(DiscreteEigenBasis::new(&geom, &c, 65).is_err());
        let neg = c.map(|v| v - 2.0);
        assert!(DiscreteEigenBasis::new(&geom, &neg, 4).is_err());
    }
}
