//! Node-centred uniform Cartesian grids and fields sampled on them.

use crate::error::{invalid, Result, TatError};
use crate::scalar::{from_usize, lit, Real};

/// Axis-aligned uniform grid in 2D or 3D.
///
/// Node `i` along axis `a` sits at `origin[a] + i * spacing[a]`. Values are
/// stored row-major with axis 0 varying slowest. Unused trailing axes of a
/// 2D grid carry `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    dim: usize,
    n: [usize; 3],
    origin: [T; 3],
    spacing: [T; 3],
}

impl<T: Real> Grid<T> {
    pub fn new(n: &[usize], origin: &[T], spacing: &[T]) -> Result<Self> {
        let dim = n.len();
        if !(2..=3).contains(&dim) {
            return Err(TatError::DimensionMismatch(format!("grid dimension {dim} not in {{2,3}}")));
        }
        if origin.len() != dim || spacing.len() != dim {
            return Err(invalid("origin/spacing length must equal grid dimension"));
        }
        let mut g = Grid { dim, n: [1; 3], origin: [T::zero(); 3], spacing: [T::one(); 3] };
        for a in 0..dim {
            if n[a] < 2 {
                return Err(invalid(format!("axis {a}: need at least 2 nodes, got {}", n[a])));
            }
            if !(spacing[a] > T::zero()) || !spacing[a].is_finite() {
                return Err(invalid(format!("axis {a}: spacing must be positive")));
            }
            if !origin[a].is_finite() {
                return Err(invalid(format!("axis {a}: origin must be finite")));
            }
            g.n[a] = n[a];
            g.origin[a] = origin[a];
            g.spacing[a] = spacing[a];
        }
        Ok(g)
    }

    /// Isotropic grid with `n` nodes per axis spanning `[lo, hi]` on every axis.
    pub fn cube(dim: usize, n: usize, lo: T, hi: T) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(invalid("cube grid needs n >= 2 and hi > lo"));
        }
        let h = (hi - lo) / from_usize::<T>(n - 1);
        Grid::new(&vec![n; dim], &vec![lo; dim], &vec![h; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.n[..self.dim]
    }

    pub fn origin(&self) -> &[T] {
        &self.origin[..self.dim]
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume (area in 2D) attached to one node.
    pub fn cell_volume(&self) -> T {
        self.spacing().iter().fold(T::one(), |acc, &h| acc * h)
    }

    /// Physical length `(n-1) * h` along `axis`.
    pub fn extent(&self, axis: usize) -> T {
        from_usize::<T>(self.n[axis] - 1) * self.spacing[axis]
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n[1] + i[1]) * self.n[2] + i[2]
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i2 = idx % self.n[2];
        let r = idx / self.n[2];
        [r / self.n[1], r % self.n[1], i2]
    }

    /// Physical position of node `i` (trailing entries zero in 2D).
    #[inline]
    pub fn node(&self, i: [usize; 3]) -> [T; 3] {
        let mut x = [T::zero(); 3];
        for a in 0..self.dim {
            x[a] = self.origin[a] + from_usize::<T>(i[a]) * self.spacing[a];
        }
        x
    }

    #[inline]
    pub fn node_at(&self, idx: usize) -> [T; 3] {
        self.node(self.unravel(idx))
    }

    pub fn lower(&self) -> [T; 3] {
        self.origin
    }

    pub fn upper(&self) -> [T; 3] {
        let mut x = self.origin;
        for (a, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = *xa + self.extent(a);
        }
        x
    }

    /// True if `x` lies in the closed bounding box of the grid.
    pub fn contains(&self, x: &[T]) -> bool {
        let hi = self.upper();
        // nodes computed as origin + i h may miss the intended bound by rounding
        (0..self.dim).all(|a| {
            let eps = self.spacing[a] * lit::<T>(1e-9);
            x[a] >= self.origin[a] - eps && x[a] <= hi[a] + eps
        })
    }

    /// Whether two grids have identical layout (exact comparison).
    pub fn same_layout(&self, other: &Grid<T>) -> bool {
        self == other
    }
}

/// Real values sampled at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(TatError::DimensionMismatch(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TatError::Numeric(format!("non-finite field value at node {i}")));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        ScalarField { values: vec![T::zero(); grid.len()], grid }
    }

    pub fn constant(grid: Grid<T>, c: T) -> Self {
        ScalarField { values: vec![c; grid.len()], grid }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(&[T]) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.node_at(i)[..grid.dim()])).collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, i: [usize; 3]) -> T {
        self.values[self.grid.index(i)]
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Discrete L2 norm `sqrt(sum v^2 * cell_volume)`.
    pub fn l2_norm(&self) -> T {
        (self.values.iter().map(|&v| v * v).sum::<T>() * self.grid.cell_volume()).sqrt()
    }

    /// Multilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: &[T]) -> T {
        let g = &self.grid;
        let dim = g.dim();
        let mut base = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..dim {
            let s = (x[a] - g.origin[a]) / g.spacing[a];
            let last = from_usize::<T>(g.n[a] - 1);
            if !(s >= T::zero() && s <= last) {
                return T::zero();
            }
            let i = s.floor().to_usize().unwrap().min(g.n[a] - 2);
            base[a] = i;
            frac[a] = s - from_usize::<T>(i);
        }
        let corners = 1usize << dim;
        let mut acc = T::zero();
        for c in 0..corners {
            let mut w = T::one();
            let mut idx = base;
            for a in 0..dim {
                if c >> a & 1 == 1 {
                    idx[a] += 1;
                    w = w * frac[a];
                } else {
                    w = w * (T::one() - frac[a]);
                }
            }
            if w != T::zero() {
                acc = acc + w * self.values[g.index(idx)];
            }
        }
        acc
    }

    pub fn zip_map(&self, other: &ScalarField<T>, f: impl Fn(T, T) -> T) -> Result<ScalarField<T>> {
        if !self.grid.same_layout(&other.grid) {
            return Err(TatError::DimensionMismatch("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(ScalarField { grid: self.grid, values })
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> ScalarField<T> {
        ScalarField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::<f64>::new(&[1, 4], &[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(Grid::<f64>::new(&[4, 4], &[0.0, 0.0], &[0.0, 1.0]).is_err());
        assert!(Grid::<f64>::new(&[4], &[0.0], &[1.0]).is_err());
        assert!(Grid::<f64>::new(&[4, 4, 4, 4], &[0.0; 4], &[1.0; 4]).is_err());
    }

    #[test]
    fn index_roundtrip_and_extent() {
        let g = Grid::<f64>::new(&[3, 4, 5], &[0.0, -1.0, 2.0], &[0.5, 0.25, 1.0]).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.index(g.unravel(idx)), idx);
        }
        assert_eq!(g.extent(0), 1.0);
        assert_eq!(g.extent(1), 0.75);
        assert_eq!(g.node([2, 1, 0]), [1.0, -0.75, 2.0]);
    }

    #[test]
    fn interpolation_reproduces_linear_functions() {
        let g = Grid::<f64>::cube(2, 5, -1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x| 2.0 * x[0] - x[1] + 0.5);
        let v = f.interpolate(&[0.3, -0.7]);
        assert!((v - (0.6 + 0.7 + 0.5)).abs() < 1e-14);
        assert_eq!(f.interpolate(&[1.5, 0.0]), 0.0);
        assert!((f.interpolate(&[1.0, 1.0]) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn non_finite_values_rejected() {
        let g = Grid::<f64>::cube(2, 2, 0.0, 1.0).unwrap();
        assert!(ScalarField::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(ScalarField::new(g, vec![0.0; 3]).is_err());
    }
}
