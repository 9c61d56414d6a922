//! Which jump interfaces of a phantom a detector set can see.
//!
//! A boundary point `x` with normal `ξ` is counted as visible when the full
//! line `{x + sξ}` meets the detector set. This is the geometric form of the
//! partial-data visibility criterion; it is a heuristic, not a wavefront-set
//! computation, and the CSV output says so.

use std::io::Write;

use crate::error::{Result, TatError};
use crate::geometry::{DetectorGeometry, Surface};
use crate::phantom::{PhantomSpec, Primitive, Shape};
use crate::scalar::{from_usize, lit, to_f64, wrap_angle, Real};

/// Boundary points sampled per disk, rectangle or ball. Boxes use the
/// nearest square count per face.
pub const BOUNDARY_SAMPLES: usize = 512;

const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilitySample<T> {
    pub primitive: usize,
    pub point: [T; 3],
    pub normal: [T; 3],
    pub visible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityMap<T> {
    pub dim: usize,
    pub samples: Vec<VisibilitySample<T>>,
}

impl<T: Real> VisibilityMap<T> {
    pub fn visible_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 1.0;
        }
        self.samples.iter().filter(|s| s.visible).count() as f64 / self.samples.len() as f64
    }

    /// CSV `x,y[,z],xi_x,xi_y[,xi_z],visible,primitive` preceded by a comment
    /// line naming the criterion.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "# visibility: normal line meets the detector set (geometric heuristic)")?;
        let mut out = csv::Writer::from_writer(w);
        let axes = ["x", "y", "z"];
        let mut header: Vec<String> = axes[..self.dim].iter().map(|s| s.to_string()).collect();
        header.extend(axes[..self.dim].iter().map(|s| format!("xi_{s}")));
        header.extend(["visible".to_string(), "primitive".to_string()]);
        let res = (|| -> csv::Result<()> {
            out.write_record(&header)?;
            for s in &self.samples {
                let mut row: Vec<String> = s.point[..self.dim].iter().map(|v| format!("{:e}", to_f64(*v))).collect();
                row.extend(s.normal[..self.dim].iter().map(|v| format!("{:e}", to_f64(*v))));
                row.push(u8::from(s.visible).to_string());
                row.push(s.primitive.to_string());
                out.write_record(&row)?;
            }
            out.flush()?;
            Ok(())
        })();
        res.map_err(|e| TatError::Io(std::io::Error::other(e)))
    }
}

/// Samples every sharp boundary of `spec` and tests its normal line against
/// the detector set. Smooth bumps have no jump interface and contribute no
/// samples.
pub fn visibility_map<T: Real>(spec: &PhantomSpec<T>, geom: &DetectorGeometry<T>) -> Result<VisibilityMap<T>> {
    let dim = geom.dim();
    if let Some(d) = spec.dim()? {
        if d != dim {
            return Err(TatError::DimensionMismatch(format!("{d}D phantom against {dim}D detectors")));
        }
    }
    let mut samples = Vec::new();
    for (idx, p) in spec.primitives.iter().enumerate() {
        for (point, normal) in boundary_samples(p) {
            let visible = line_meets(geom, &point, &normal);
            samples.push(VisibilitySample { primitive: idx, point, normal, visible });
        }
    }
    Ok(VisibilityMap { dim, samples })
}

fn boundary_samples<T: Real>(p: &Primitive<T>) -> Vec<([T; 3], [T; 3])> {
    let c = p.center;
    let z = T::zero();
    let n = BOUNDARY_SAMPLES;
    match (p.shape, p.dim) {
        (Shape::Bump { .. }, _) => Vec::new(),
        (Shape::Sphere { r }, 2) => (0..n)
            .map(|k| {
                let (s, co) = (T::TAU() * from_usize::<T>(k) / from_usize::<T>(n)).sin_cos();
                ([c[0] + r * co, c[1] + r * s, z], [co, s, z])
            })
            .collect(),
        (Shape::Sphere { r }, _) => {
            // Fibonacci lattice
            let golden = T::PI() * (lit::<T>(3.0) - lit::<T>(5.0).sqrt());
            (0..n)
                .map(|k| {
                    let u = T::one() - lit::<T>(2.0) * (from_usize::<T>(k) + lit(0.5)) / from_usize::<T>(n);
                    let rho = (T::one() - u * u).sqrt();
                    let (s, co) = (golden * from_usize::<T>(k)).sin_cos();
                    let d = [rho * co, rho * s, u];
                    ([c[0] + r * d[0], c[1] + r * d[1], c[2] + r * d[2]], d)
                })
                .collect()
        }
        (Shape::Block { half }, 2) => {
            // arc-length uniform, offset by half a step so no sample sits on a corner
            let per = lit::<T>(4.0) * (half[0] + half[1]);
            (0..n)
                .map(|k| {
                    let mut s = per * (from_usize::<T>(k) + lit(0.5)) / from_usize::<T>(n);
                    let sides = [
                        (lit::<T>(2.0) * half[0], [T::one(), z], [-half[0], -half[1]], [z, -T::one()]),
                        (lit::<T>(2.0) * half[1], [z, T::one()], [half[0], -half[1]], [T::one(), z]),
                        (lit::<T>(2.0) * half[0], [-T::one(), z], [half[0], half[1]], [z, T::one()]),
                        (lit::<T>(2.0) * half[1], [z, -T::one()], [-half[0], half[1]], [-T::one(), z]),
                    ];
                    for (len, dir, start, nrm) in sides {
                        if s <= len {
                            return ([c[0] + start[0] + s * dir[0], c[1] + start[1] + s * dir[1], z], [nrm[0], nrm[1], z]);
                        }
                        s -= len;
                    }
                    ([c[0] - half[0], c[1] + half[1], z], [-T::one(), z, z])
                })
                .collect()
        }
        (Shape::Block { half }, _) => {
            let m = ((n as f64 / 6.0).sqrt().round() as usize).max(1);
            let mut out = Vec::with_capacity(6 * m * m);
            for axis in 0..3 {
                let (a1, a2) = match axis {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                for sign in [-T::one(), T::one()] {
                    for i in 0..m {
                        for j in 0..m {
                            let u = lit::<T>(2.0) * (from_usize::<T>(i) + lit(0.5)) / from_usize::<T>(m) - T::one();
                            let v = lit::<T>(2.0) * (from_usize::<T>(j) + lit(0.5)) / from_usize::<T>(m) - T::one();
                            let mut x = c;
                            x[axis] = c[axis] + sign * half[axis];
                            x[a1] = c[a1] + u * half[a1];
                            x[a2] = c[a2] + v * half[a2];
                            let mut nrm = [z; 3];
                            nrm[axis] = sign;
                            out.push((x, nrm));
                        }
                    }
                }
            }
            out
        }
    }
}

/// Parameters `s` where the line `x + sξ` meets the sphere `|y - c| = r`.
fn circle_hits<T: Real>(c: &[T], r: T, x: &[T; 3], xi: &[T; 3], dim: usize) -> Vec<[T; 3]> {
    let p: Vec<T> = (0..dim).map(|a| x[a] - c[a]).collect();
    let b = (0..dim).map(|a| p[a] * xi[a]).sum::<T>();
    let pp = p.iter().map(|v| *v * *v).sum::<T>();
    let disc = b * b - (pp - r * r);
    let tol = lit::<T>(ANGLE_TOL) * r * r;
    if disc < -tol {
        return Vec::new();
    }
    let sq = disc.max(T::zero()).sqrt();
    [-b - sq, -b + sq]
        .iter()
        .map(|&s| {
            let mut y = [T::zero(); 3];
            for a in 0..dim {
                y[a] = x[a] + s * xi[a];
            }
            y
        })
        .collect()
}

/// Does the line through the closed box `lo..hi` (slab test)?
fn line_meets_box<T: Real>(lo: &[T], hi: &[T], x: &[T; 3], xi: &[T; 3], dim: usize) -> bool {
    let (mut s0, mut s1) = (T::neg_infinity(), T::infinity());
    let tol = lit::<T>(ANGLE_TOL);
    for a in 0..dim {
        if xi[a].abs() <= tol {
            if x[a] < lo[a] - tol || x[a] > hi[a] + tol {
                return false;
            }
        } else {
            let (u, v) = ((lo[a] - x[a]) / xi[a], (hi[a] - x[a]) / xi[a]);
            s0 = s0.max(u.min(v));
            s1 = s1.min(u.max(v));
        }
    }
    s0 <= s1 + tol
}

fn line_meets<T: Real>(geom: &DetectorGeometry<T>, x: &[T; 3], xi: &[T; 3]) -> bool {
    match *geom.surface() {
        Surface::Circle { center, radius } => !circle_hits(&center, radius, x, xi, 2).is_empty(),
        Surface::Sphere { center, radius, .. } => !circle_hits(&center, radius, x, xi, 3).is_empty(),
        Surface::Arc { center, radius, start, span } => circle_hits(&center, radius, x, xi, 2).iter().any(|y| {
            let phi = (y[1] - center[1]).atan2(y[0] - center[0]);
            let d = wrap_angle(phi - start);
            let tol = lit::<T>(ANGLE_TOL);
            d <= span + tol || d >= T::TAU() - tol
        }),
        Surface::Square { center, half, .. } => {
            line_meets_box(&[center[0] - half, center[1] - half], &[center[0] + half, center[1] + half], x, xi, 2)
        }
        Surface::Cube { center, half, .. } => {
            let lo = [center[0] - half, center[1] - half, center[2] - half];
            let hi = [center[0] + half, center[1] + half, center[2] + half];
            line_meets_box(&lo, &hi, x, xi, 3)
        }
        Surface::Line { a, b } => {
            let d = [b[0] - a[0], b[1] - a[1]];
            let cross = |u: [T; 2], v: [T; 2]| u[0] * v[1] - u[1] * v[0];
            let ax = [x[0] - a[0], x[1] - a[1]];
            let den = cross(d, [xi[0], xi[1]]);
            let tol = lit::<T>(ANGLE_TOL);
            if den.abs() <= tol {
                cross(ax, [xi[0], xi[1]]).abs() <= tol
            } else {
                let u = cross(ax, [xi[0], xi[1]]) / den;
                u >= -tol && u <= T::one() + tol
            }
        }
    }
}
