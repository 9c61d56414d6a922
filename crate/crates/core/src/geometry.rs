//! Detector sets: where the transducers sit, which way they face, and the
//! surface quadrature weight each one carries.

use crate::error::{invalid, FormatError, Result, TatError};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special::quadrature::gauss_legendre;

/// The surface a detector set samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface<T> {
    /// Full circle, detector `i` at angle `2 pi i / n`.
    Circle { center: [T; 2], radius: T },
    /// Circular arc from `start` spanning `span` radians, endpoints included.
    Arc { center: [T; 2], radius: T, start: T, span: T },
    /// Sphere sampled on a Gauss–Legendre latitude × uniform longitude lattice.
    Sphere { center: [T; 3], radius: T, n_lat: usize },
    /// Boundary of the square `center ± half`; `per_side` interior lattice
    /// points on every side, corners excluded.
    Square { center: [T; 2], half: T, per_side: usize },
    /// Boundary of the cube `center ± half`; `per_side × per_side` interior
    /// lattice points on every face.
    Cube { center: [T; 3], half: T, per_side: usize },
    /// Straight segment from `a` to `b`.
    Line { a: [T; 2], b: [T; 2] },
}

/// Numeric tag used in the data file geometry block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum SurfaceKind {
    Circle = 0,
    Arc = 1,
    Sphere = 2,
    Square = 3,
    Cube = 4,
    Line = 5,
}

impl SurfaceKind {
    pub fn from_tag(tag: u8) -> Result<Self, FormatError> {
        Ok(match tag {
            0 => SurfaceKind::Circle,
            1 => SurfaceKind::Arc,
            2 => SurfaceKind::Sphere,
            3 => SurfaceKind::Square,
            4 => SurfaceKind::Cube,
            5 => SurfaceKind::Line,
            _ => return Err(FormatError::TagOutOfRange { what: "geometry", value: tag as u32 }),
        })
    }

    /// Number of `f64` parameters stored for this kind.
    pub fn n_params(self) -> usize {
        match self {
            SurfaceKind::Circle => 3,
            SurfaceKind::Arc => 5,
            SurfaceKind::Sphere => 5,
            SurfaceKind::Square => 3,
            SurfaceKind::Cube => 4,
            SurfaceKind::Line => 4,
        }
    }
}

/// A finite set of point detectors on a [`Surface`].
///
/// Positions and normals are stored with three components; the third is zero
/// for planar sets. Normals point out of the region enclosed by the surface
/// (for arcs: away from the centre; for segments: the direction rotated by
/// +90°).
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorGeometry<T> {
    surface: Surface<T>,
    positions: Vec<[T; 3]>,
    normals: Vec<[T; 3]>,
    weights: Vec<T>,
}

impl<T: Real> DetectorGeometry<T> {
    pub fn circle(center: [T; 2], radius: T, n: usize) -> Result<Self> {
        Self::new(Surface::Circle { center, radius }, n)
    }

    pub fn arc(center: [T; 2], radius: T, start: T, span: T, n: usize) -> Result<Self> {
        Self::new(Surface::Arc { center, radius, start, span }, n)
    }

    /// `n_lat` latitudes and `2 n_lat` longitudes.
    pub fn sphere(center: [T; 3], radius: T, n_lat: usize) -> Result<Self> {
        Self::new(Surface::Sphere { center, radius, n_lat }, 2 * n_lat * n_lat)
    }

    pub fn square(center: [T; 2], half: T, per_side: usize) -> Result<Self> {
        Self::new(Surface::Square { center, half, per_side }, 4 * per_side)
    }

    pub fn cube(center: [T; 3], half: T, per_side: usize) -> Result<Self> {
        Self::new(Surface::Cube { center, half, per_side }, 6 * per_side * per_side)
    }

    pub fn line(a: [T; 2], b: [T; 2], n: usize) -> Result<Self> {
        Self::new(Surface::Line { a, b }, n)
    }

    /// Builds the detector set; `n` is the total detector count and must be
    /// consistent with the lattice parameters of sphere/square/cube surfaces.
    pub fn new(surface: Surface<T>, n: usize) -> Result<Self> {
        let z = T::zero();
        let two_pi = T::TAU();
        let mut positions = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        match surface {
            Surface::Circle { center, radius } => {
                check_radius(radius)?;
                if n < 1 {
                    return Err(invalid("circle needs at least one detector"));
                }
                for i in 0..n {
                    let th = two_pi * from_usize::<T>(i) / from_usize::<T>(n);
                    let (s, c) = th.sin_cos();
                    positions.push([center[0] + radius * c, center[1] + radius * s, z]);
                    normals.push([c, s, z]);
                    weights.push(two_pi * radius / from_usize::<T>(n));
                }
            }
            Surface::Arc { center, radius, start, span } => {
                check_radius(radius)?;
                if !(span >= z) || span > two_pi || !start.is_finite() {
                    return Err(invalid("arc span must lie in [0, 2 pi]"));
                }
                if n < 1 || (n < 2 && span > z) {
                    return Err(invalid("arc needs at least two detectors"));
                }
                let step = if n > 1 { span / from_usize::<T>(n - 1) } else { z };
                for i in 0..n {
                    let th = start + step * from_usize::<T>(i);
                    let (s, c) = th.sin_cos();
                    positions.push([center[0] + radius * c, center[1] + radius * s, z]);
                    normals.push([c, s, z]);
                    let end = i == 0 || i + 1 == n;
                    weights.push(radius * step * if end { lit(0.5) } else { T::one() });
                }
            }
            Surface::Sphere { center, radius, n_lat } => {
                check_radius(radius)?;
                if n_lat < 1 || n != 2 * n_lat * n_lat {
                    return Err(invalid(format!("sphere with n_lat={n_lat} has {} detectors, not {n}", 2 * n_lat * n_lat)));
                }
                let n_lon = 2 * n_lat;
                let (cz, wz) = gauss_legendre::<T>(n_lat);
                for j in 0..n_lat {
                    let st = (T::one() - cz[j] * cz[j]).sqrt();
                    for l in 0..n_lon {
                        let ph = two_pi * from_usize::<T>(l) / from_usize::<T>(n_lon);
                        let (s, c) = ph.sin_cos();
                        let nv = [st * c, st * s, cz[j]];
                        positions.push([
                            center[0] + radius * nv[0],
                            center[1] + radius * nv[1],
                            center[2] + radius * nv[2],
                        ]);
                        normals.push(nv);
                        weights.push(radius * radius * wz[j] * two_pi / from_usize::<T>(n_lon));
                    }
                }
            }
            Surface::Square { center, half, per_side } => {
                check_radius(half)?;
                if per_side < 1 || n != 4 * per_side {
                    return Err(invalid(format!("square with {per_side} per side has {} detectors, not {n}", 4 * per_side)));
                }
                let h = lit::<T>(2.0) * half / from_usize::<T>(per_side + 1);
                let c3 = [center[0], center[1], z];
                for face in 0..4 {
                    let (axis, sign) = face_axis(face);
                    let other = 1 - axis;
                    for j in 1..=per_side {
                        let mut x = c3;
                        x[axis] = center[axis] + sign * half;
                        x[other] = center[other] - half + h * from_usize::<T>(j);
                        let mut nv = [z; 3];
                        nv[axis] = sign;
                        positions.push(x);
                        normals.push(nv);
                        weights.push(h);
                    }
                }
            }
            Surface::Cube { center, half, per_side } => {
                check_radius(half)?;
                if per_side < 1 || n != 6 * per_side * per_side {
                    return Err(invalid(format!(
                        "cube with {per_side} per side has {} detectors, not {n}",
                        6 * per_side * per_side
                    )));
                }
                let h = lit::<T>(2.0) * half / from_usize::<T>(per_side + 1);
                for face in 0..6 {
                    let (axis, sign) = face_axis(face);
                    let (b, c) = other_axes(axis);
                    for j in 1..=per_side {
                        for k in 1..=per_side {
                            let mut x = center;
                            x[axis] = center[axis] + sign * half;
                            x[b] = center[b] - half + h * from_usize::<T>(j);
                            x[c] = center[c] - half + h * from_usize::<T>(k);
                            let mut nv = [z; 3];
                            nv[axis] = sign;
                            positions.push(x);
                            normals.push(nv);
                            weights.push(h * h);
                        }
                    }
                }
            }
            Surface::Line { a, b } => {
                let d = [b[0] - a[0], b[1] - a[1]];
                let len = d[0].hypot(d[1]);
                if !(len > z) {
                    return Err(invalid("line segment endpoints must differ"));
                }
                if n < 2 {
                    return Err(invalid("line segment needs at least two detectors"));
                }
                let step = T::one() / from_usize::<T>(n - 1);
                for i in 0..n {
                    let s = step * from_usize::<T>(i);
                    positions.push([a[0] + s * d[0], a[1] + s * d[1], z]);
                    normals.push([-d[1] / len, d[0] / len, z]);
                    let end = i == 0 || i + 1 == n;
                    weights.push(len * step * if end { lit(0.5) } else { T::one() });
                }
            }
        }
        Ok(DetectorGeometry { surface, positions, normals, weights })
    }

    pub fn surface(&self) -> &Surface<T> {
        &self.surface
    }

    pub fn kind(&self) -> SurfaceKind {
        match self.surface {
            Surface::Circle { .. } => SurfaceKind::Circle,
            Surface::Arc { .. } => SurfaceKind::Arc,
            Surface::Sphere { .. } => SurfaceKind::Sphere,
            Surface::Square { .. } => SurfaceKind::Square,
            Surface::Cube { .. } => SurfaceKind::Cube,
            Surface::Line { .. } => SurfaceKind::Line,
        }
    }

    pub fn dim(&self) -> usize {
        match self.surface {
            Surface::Sphere { .. } | Surface::Cube { .. } => 3,
            _ => 2,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[T; 3]] {
        &self.positions
    }

    pub fn normals(&self) -> &[[T; 3]] {
        &self.normals
    }

    /// Surface measure carried by each detector (arc length or area).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Centre of the enclosing circle/sphere/square/cube (segment midpoint).
    pub fn center(&self) -> [T; 3] {
        let z = T::zero();
        match self.surface {
            Surface::Circle { center, .. } | Surface::Arc { center, .. } | Surface::Square { center, .. } => {
                [center[0], center[1], z]
            }
            Surface::Sphere { center, .. } | Surface::Cube { center, .. } => center,
            Surface::Line { a, b } => [(a[0] + b[0]) * lit(0.5), (a[1] + b[1]) * lit(0.5), z],
        }
    }

    /// Whether the detectors sample a closed surface completely.
    pub fn is_closed(&self) -> bool {
        !matches!(self.surface, Surface::Arc { .. } | Surface::Line { .. })
    }

    /// Largest distance between the centre and any point of the surface.
    pub fn outer_radius(&self) -> T {
        match self.surface {
            Surface::Circle { radius, .. } | Surface::Arc { radius, .. } | Surface::Sphere { radius, .. } => radius,
            Surface::Square { half, .. } => half * lit::<T>(2.0).sqrt(),
            Surface::Cube { half, .. } => half * lit::<T>(3.0).sqrt(),
            Surface::Line { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]) * lit(0.5),
        }
    }

    /// Distance from `x` to the nearest detector position's defining surface,
    /// i.e. the residual of the surface equation at detector `i`.
    pub fn surface_residual(&self, i: usize) -> T {
        let x = self.positions[i];
        match self.surface {
            Surface::Circle { center, radius } | Surface::Arc { center, radius, .. } => {
                ((x[0] - center[0]).hypot(x[1] - center[1]) - radius).abs()
            }
            Surface::Sphere { center, radius, .. } => {
                let d: T = (0..3).map(|a| (x[a] - center[a]).powi(2)).sum();
                (d.sqrt() - radius).abs()
            }
            Surface::Square { center, half, .. } => {
                let m = (x[0] - center[0]).abs().max((x[1] - center[1]).abs());
                (m - half).abs()
            }
            Surface::Cube { center, half, .. } => {
                let m = (0..3).map(|a| (x[a] - center[a]).abs()).fold(T::zero(), T::max);
                (m - half).abs()
            }
            Surface::Line { a, b } => {
                let d = [b[0] - a[0], b[1] - a[1]];
                let len = d[0].hypot(d[1]);
                ((x[0] - a[0]) * d[1] - (x[1] - a[1]) * d[0]).abs() / len
            }
        }
    }

    /// Parameters written to the data file geometry block.
    pub fn params(&self) -> Vec<f64> {
        let f = to_f64::<T>;
        match self.surface {
            Surface::Circle { center, radius } => vec![f(center[0]), f(center[1]), f(radius)],
            Surface::Arc { center, radius, start, span } => {
                vec![f(center[0]), f(center[1]), f(radius), f(start), f(span)]
            }
            Surface::Sphere { center, radius, n_lat } => {
                vec![f(center[0]), f(center[1]), f(center[2]), f(radius), n_lat as f64]
            }
            Surface::Square { center, half, .. } => vec![f(center[0]), f(center[1]), f(half)],
            Surface::Cube { center, half, .. } => vec![f(center[0]), f(center[1]), f(center[2]), f(half)],
            Surface::Line { a, b } => vec![f(a[0]), f(a[1]), f(b[0]), f(b[1])],
        }
    }

    /// Inverse of [`params`](Self::params) plus the detector count.
    pub fn from_params(kind: SurfaceKind, p: &[f64], n: usize) -> Result<Self> {
        if p.len() != kind.n_params() {
            return Err(invalid(format!("{kind:?} geometry takes {} parameters", kind.n_params())));
        }
        let t = |x: f64| -> T { lit(x) };
        let surface = match kind {
            SurfaceKind::Circle => Surface::Circle { center: [t(p[0]), t(p[1])], radius: t(p[2]) },
            SurfaceKind::Arc => Surface::Arc { center: [t(p[0]), t(p[1])], radius: t(p[2]), start: t(p[3]), span: t(p[4]) },
            SurfaceKind::Sphere => {
                if !(p[4] >= 1.0) || p[4].fract() != 0.0 {
                    return Err(invalid("sphere latitude count must be a positive integer"));
                }
                Surface::Sphere { center: [t(p[0]), t(p[1]), t(p[2])], radius: t(p[3]), n_lat: p[4] as usize }
            }
            SurfaceKind::Square => {
                if n % 4 != 0 {
                    return Err(invalid("square detector count must be a multiple of 4"));
                }
                Surface::Square { center: [t(p[0]), t(p[1])], half: t(p[2]), per_side: n / 4 }
            }
            SurfaceKind::Cube => {
                let m = ((n / 6) as f64).sqrt().round() as usize;
                if 6 * m * m != n {
                    return Err(invalid("cube detector count must be 6 m^2"));
                }
                Surface::Cube { center: [t(p[0]), t(p[1]), t(p[2])], half: t(p[3]), per_side: m }
            }
            SurfaceKind::Line => Surface::Line { a: [t(p[0]), t(p[1])], b: [t(p[2]), t(p[3])] },
        };
        Self::new(surface, n)
    }

    /// Angle of each detector about the centre (planar sets only).
    pub fn angles(&self) -> Vec<T> {
        let c = self.center();
        self.positions.iter().map(|x| (x[1] - c[1]).atan2(x[0] - c[0])).collect()
    }

    /// Requires a full circle or sphere; returns `(centre, radius)`.
    pub fn require_round(&self) -> Result<([T; 3], T)> {
        match self.surface {
            Surface::Circle { radius, .. } | Surface::Sphere { radius, .. } => Ok((self.center(), radius)),
            _ => Err(TatError::UnsupportedGeometry(format!(
                "{:?} geometry: a full circle or sphere is required",
                self.kind()
            ))),
        }
    }
}

/// `(axis, outward sign)` of box face `face` in the order `-x, +x, -y, +y, -z, +z`.
pub fn face_axis<T: Real>(face: usize) -> (usize, T) {
    (face / 2, if face % 2 == 0 { -T::one() } else { T::one() })
}

/// The two axes spanning a face normal to `axis`, ascending.
pub fn other_axes(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(invalid("radius / half-side must be positive"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<DetectorGeometry<f64>> {
        vec![
            DetectorGeometry::circle([0.1, -0.2], 1.3, 37).unwrap(),
            DetectorGeometry::arc([0.0, 0.0], 1.0, 0.5, 2.0, 20).unwrap(),
            DetectorGeometry::sphere([0.0, 0.1, 0.2], 0.9, 6).unwrap(),
            DetectorGeometry::square([0.0, 0.0], 0.5, 9).unwrap(),
            DetectorGeometry::cube([0.5, 0.5, 0.5], 0.5, 5).unwrap(),
            DetectorGeometry::line([-1.0, 0.0], [1.0, 1.0], 11).unwrap(),
        ]
    }

    #[test]
    fn detectors_on_surface_with_unit_normals() {
        for g in all() {
            for i in 0..g.len() {
                assert!(g.surface_residual(i) <= 1e-12, "{:?}", g.kind());
                let n = g.normals()[i];
                let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                assert!((len - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn weights_sum_to_measure() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 2.0, 64).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let s = DetectorGeometry::<f64>::sphere([0.0; 3], 2.0, 8).unwrap();
        assert!((s.weights().iter().sum::<f64>() - 16.0 * std::f64::consts::PI).abs() < 1e-11);
        let a = DetectorGeometry::<f64>::arc([0.0; 2], 1.0, 0.0, 1.5, 7).unwrap();
        assert!((a.weights().iter().sum::<f64>() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn params_roundtrip() {
        for g in all() {
            let back = DetectorGeometry::<f64>::from_params(g.kind(), &g.params(), g.len()).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn inconsistent_counts_rejected() {
        assert!(DetectorGeometry::<f64>::new(Surface::Cube { center: [0.0; 3], half: 1.0, per_side: 3 }, 50).is_err());
        assert!(DetectorGeometry::<f64>::from_params(SurfaceKind::Square, &[0.0, 0.0, 1.0], 7).is_err());
        assert!(DetectorGeometry::<f64>::circle([0.0; 2], -1.0, 8).is_err());
    }
}
