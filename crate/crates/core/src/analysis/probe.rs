//! Phantoms invisible to line detectors.
//!
//! A function odd under reflection in a line produces zero spherical means
//! for every centre on that line. Antisymmetrising over the dihedral group
//! of `N` concurrent lines at equal angles (a Coxeter cross) gives a function
//! invisible from all of them at once.

use crate::data::DataKind;
use crate::error::{invalid, Result, TatError};
use crate::forward::{spherical_forward, QuadratureSpec};
use crate::geometry::{DetectorGeometry, Surface};
use crate::grid::Grid;
use crate::phantom::{PhantomSpec, Primitive, Shape};
use crate::scalar::{from_usize, lit, Real};

/// Planar isometry `x ↦ c + A (x - c)` with `A` orthogonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry<T> {
    pub center: [T; 2],
    pub a: [[T; 2]; 2],
}

impl<T: Real> Isometry<T> {
    /// Reflection in the line through `center` at angle `angle`.
    pub fn reflection(center: [T; 2], angle: T) -> Self {
        let (s, c) = (lit::<T>(2.0) * angle).sin_cos();
        Isometry { center, a: [[c, s], [s, -c]] }
    }

    pub fn rotation(center: [T; 2], angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Isometry { center, a: [[c, -s], [s, c]] }
    }

    pub fn det(&self) -> T {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    /// Evaluated as `x + (A - I)(x - c)`, which leaves coordinates along an
    /// axis-aligned mirror line bitwise unchanged.
    pub fn apply(&self, x: [T; 2]) -> [T; 2] {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        let one = T::one();
        [
            x[0] + (self.a[0][0] - one) * d[0] + self.a[0][1] * d[1],
            x[1] + self.a[1][0] * d[0] + (self.a[1][1] - one) * d[1],
        ]
    }

    /// Image of a primitive; rectangles only under maps that permute the axes.
    fn map_primitive(&self, p: &Primitive<T>, sign: T) -> Result<Primitive<T>> {
        if p.dim != 2 {
            return Err(TatError::DimensionMismatch("line-detector probes are planar".into()));
        }
        let c = self.apply([p.center[0], p.center[1]]);
        let shape = match p.shape {
            Shape::Block { half } => {
                let tol = lit::<T>(1e-12);
                if self.a[0][1].abs() <= tol {
                    p.shape
                } else if self.a[0][0].abs() <= tol {
                    Shape::Block { half: [half[1], half[0], T::zero()] }
                } else {
                    return Err(invalid("rectangles can only be mapped by axis-permuting isometries"));
                }
            }
            other => other,
        };
        Ok(Primitive { shape, dim: 2, center: [c[0], c[1], T::zero()], amp: p.amp * sign })
    }
}

fn line_angle<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    (b[1] - a[1]).atan2(b[0] - a[0])
}

fn mirrored<T: Real>(base: &PhantomSpec<T>, a: [T; 2], b: [T; 2], sign: T) -> Result<PhantomSpec<T>> {
    let r = Isometry::reflection(a, line_angle(a, b));
    let mut prims = base.primitives.clone();
    for p in &base.primitives {
        prims.push(r.map_primitive(p, sign)?);
    }
    PhantomSpec::new(prims)
}

/// `p(x) - p(Rx)` for the reflection `R` in the line through `a` and `b`.
pub fn odd_about_line<T: Real>(base: &PhantomSpec<T>, a: [T; 2], b: [T; 2]) -> Result<PhantomSpec<T>> {
    mirrored(base, a, b, -T::one())
}

/// `p(x) + p(Rx)`.
pub fn even_about_line<T: Real>(base: &PhantomSpec<T>, a: [T; 2], b: [T; 2]) -> Result<PhantomSpec<T>> {
    mirrored(base, a, b, T::one())
}

/// `Σ_g det(g) p(g x)` over the dihedral group generated by reflections in
/// `n_lines` lines through `center`, the first at angle `angle`.
pub fn coxeter_odd<T: Real>(base: &PhantomSpec<T>, center: [T; 2], angle: T, n_lines: usize) -> Result<PhantomSpec<T>> {
    if n_lines == 0 {
        return Err(invalid("a Coxeter cross needs at least one line"));
    }
    let step = T::PI() / from_usize::<T>(n_lines);
    let mut group = Vec::with_capacity(2 * n_lines);
    for k in 0..n_lines {
        group.push(Isometry::rotation(center, lit::<T>(2.0) * step * from_usize::<T>(k)));
        group.push(Isometry::reflection(center, angle + step * from_usize::<T>(k)));
    }
    let mut prims = Vec::with_capacity(group.len() * base.primitives.len());
    for g in &group {
        let sign = g.det().signum();
        for p in &base.primitives {
            prims.push(g.map_primitive(p, sign)?);
        }
    }
    PhantomSpec::new(prims)
}

/// Segment detector sets along the `n_lines` lines of a Coxeter cross, each
/// of half-length `half_len` with `n` detectors.
pub fn coxeter_lines<T: Real>(center: [T; 2], angle: T, n_lines: usize, half_len: T, n: usize) -> Result<Vec<DetectorGeometry<T>>> {
    let step = T::PI() / from_usize::<T>(n_lines.max(1));
    (0..n_lines)
        .map(|k| {
            let (s, c) = (angle + step * from_usize::<T>(k)).sin_cos();
            let a = [center[0] - half_len * c, center[1] - half_len * s];
            let b = [center[0] + half_len * c, center[1] + half_len * s];
            DetectorGeometry::line(a, b, n)
        })
        .collect()
}

/// `max |g| / ‖f‖₂` for spherical means of `spec` centred on a segment
/// detector set. The angular quadrature is aligned with the segment, so
/// reflection-odd phantoms cancel to rounding error.
pub fn nonuniqueness_probe<T: Real>(
    spec: &PhantomSpec<T>,
    geom: &DetectorGeometry<T>,
    n_samples: usize,
    dt: T,
    quad: &QuadratureSpec,
) -> Result<T> {
    if !matches!(geom.surface(), Surface::Line { .. }) {
        return Err(TatError::UnsupportedGeometry(format!("the probe uses segment detectors, got {:?}", geom.kind())));
    }
    let norm = phantom_norm(spec)?;
    if norm == T::zero() {
        return Err(invalid("phantom has zero norm"));
    }
    let data = spherical_forward(spec, geom, n_samples, dt, DataKind::Mean, quad)?;
    Ok(data.max_abs() / norm)
}

/// L2 norm of a planar phantom by the midpoint rule on a 512² raster of its
/// bounding box.
fn phantom_norm<T: Real>(spec: &PhantomSpec<T>) -> Result<T> {
    if spec.is_empty() {
        return Ok(T::zero());
    }
    let mut lo = [T::infinity(); 2];
    let mut hi = [T::neg_infinity(); 2];
    for p in &spec.primitives {
        let (l, h) = p.bounding_box();
        for a in 0..2 {
            lo[a] = lo[a].min(l[a]);
            hi[a] = hi[a].max(h[a]);
        }
    }
    let n = 512;
    let h = [(hi[0] - lo[0]) / from_usize::<T>(n), (hi[1] - lo[1]) / from_usize::<T>(n)];
    let half = lit::<T>(0.5);
    let grid = Grid::new(&[n, n], &[lo[0] + half * h[0], lo[1] + half * h[1]], &h)?;
    let f = spec.rasterize(&grid)?;
    Ok((f.values().iter().map(|&v| v * v).sum::<T>() * grid.cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflections_and_group_size() {
        let r = Isometry::reflection([0.0, 0.0], 0.3f64);
        let x = r.apply(r.apply([0.4, -0.1]));
        assert!((x[0] - 0.4).abs() < 1e-15 && (x[1] + 0.1).abs() < 1e-15);
        assert!((r.det() + 1.0).abs() < 1e-15);
        let base = PhantomSpec::new(vec![Primitive::bump2(0.3, 0.2, 0.1, 1.0)]).unwrap();
        assert_eq!(coxeter_odd(&base, [0.0, 0.0], 0.0, 3).unwrap().primitives.len(), 6);
        let rect = PhantomSpec::new(vec![Primitive::rect(0.3, 0.2, 0.1, 0.05, 1.0)]).unwrap();
        assert!(coxeter_odd(&rect, [0.0, 0.0], 0.0, 2).is_ok());
        assert!(coxeter_odd(&rect, [0.0, 0.0], 0.0, 3).is_err());
    }
}
