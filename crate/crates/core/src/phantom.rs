//! Declarative analytic phantoms built from disks, balls, boxes and smooth bumps.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, TatError};
use crate::grid::{Grid, ScalarField};
use crate::scalar::{lit, to_f64, Real};

/// Anything that can be evaluated pointwise: analytic phantoms, interpolated
/// fields, or plain closures.
pub trait Source<T>: Sync {
    fn eval(&self, x: &[T]) -> T;

    /// Axis-aligned box outside of which the source vanishes, if known.
    fn support_box(&self) -> Option<([T; 3], [T; 3])> {
        None
    }
}

impl<T, F> Source<T> for F
where
    F: Fn(&[T]) -> T + Sync,
{
    fn eval(&self, x: &[T]) -> T {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape<T> {
    /// Indicator of a disk (2D) or ball (3D) of radius `r`.
    Sphere { r: T },
    /// `(1 - (rho/r)^2)^3` inside radius `r`; twice continuously differentiable.
    Bump { r: T },
    /// Indicator of an axis-aligned rectangle or box with the given half-widths.
    Block { half: [T; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive<T> {
    pub shape: Shape<T>,
    pub dim: usize,
    pub center: [T; 3],
    pub amp: T,
}

impl<T: Real> Primitive<T> {
    pub fn disk(cx: T, cy: T, r: T, amp: T) -> Self {
        Primitive { shape: Shape::Sphere { r }, dim: 2, center: [cx, cy, T::zero()], amp }
    }

    pub fn ball(c: [T; 3], r: T, amp: T) -> Self {
        Primitive { shape: Shape::Sphere { r }, dim: 3, center: c, amp }
    }

    pub fn bump2(cx: T, cy: T, r: T, amp: T) -> Self {
        Primitive { shape: Shape::Bump { r }, dim: 2, center: [cx, cy, T::zero()], amp }
    }

    pub fn bump3(c: [T; 3], r: T, amp: T) -> Self {
        Primitive { shape: Shape::Bump { r }, dim: 3, center: c, amp }
    }

    pub fn rect(cx: T, cy: T, hx: T, hy: T, amp: T) -> Self {
        Primitive { shape: Shape::Block { half: [hx, hy, T::zero()] }, dim: 2, center: [cx, cy, T::zero()], amp }
    }

    pub fn cuboid(c: [T; 3], half: [T; 3], amp: T) -> Self {
        Primitive { shape: Shape::Block { half }, dim: 3, center: c, amp }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.shape {
            Shape::Sphere { r } | Shape::Bump { r } => r > T::zero(),
            Shape::Block { half } => half[..self.dim].iter().all(|&h| h > T::zero()),
        };
        if !ok {
            return Err(TatError::InvalidArgument("primitive size parameters must be positive".into()));
        }
        if !self.amp.is_finite() || self.center.iter().any(|c| !c.is_finite()) {
            return Err(TatError::InvalidArgument("primitive parameters must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, x: &[T]) -> T {
        let coord = |a: usize| if a < x.len() { x[a] } else { T::zero() };
        match self.shape {
            Shape::Sphere { r } => {
                let rho2 = self.dist2(&coord);
                if rho2 <= r * r {
                    self.amp
                } else {
                    T::zero()
                }
            }
            Shape::Bump { r } => {
                let s = self.dist2(&coord) / (r * r);
                if s < T::one() {
                    let u = T::one() - s;
                    self.amp * u * u * u
                } else {
                    T::zero()
                }
            }
            Shape::Block { half } => {
                let inside = (0..self.dim).all(|a| (coord(a) - self.center[a]).abs() <= half[a]);
                if inside {
                    self.amp
                } else {
                    T::zero()
                }
            }
        }
    }

    #[inline]
    fn dist2(&self, coord: &impl Fn(usize) -> T) -> T {
        (0..self.dim).map(|a| {
            let d = coord(a) - self.center[a];
            d * d
        }).fold(T::zero(), |s, v| s + v)
    }

    /// Radius of the smallest centred ball containing the support.
    pub fn bounding_radius(&self) -> T {
        match self.shape {
            Shape::Sphere { r } | Shape::Bump { r } => r,
            Shape::Block { half } => half[..self.dim].iter().map(|&h| h * h).fold(T::zero(), |s, v| s + v).sqrt(),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)` of the support.
    pub fn bounding_box(&self) -> ([T; 3], [T; 3]) {
        let mut lo = self.center;
        let mut hi = self.center;
        for a in 0..self.dim {
            let h = match self.shape {
                Shape::Sphere { r } | Shape::Bump { r } => r,
                Shape::Block { half } => half[a],
            };
            lo[a] = self.center[a] - h;
            hi[a] = self.center[a] + h;
        }
        (lo, hi)
    }

    fn keyword(&self) -> &'static str {
        match (self.shape, self.dim) {
            (Shape::Sphere { .. }, 2) => "disk",
            (Shape::Sphere { .. }, _) => "ball",
            (Shape::Bump { .. }, _) => "bump",
            (Shape::Block { .. }, 2) => "rect",
            (Shape::Block { .. }, _) => "box",
        }
    }
}

/// Ordered list of primitives; the phantom is their pointwise sum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhantomSpec<T> {
    pub primitives: Vec<Primitive<T>>,
}

impl<T: Real> PhantomSpec<T> {
    pub fn new(primitives: Vec<Primitive<T>>) -> Result<Self> {
        for p in &primitives {
            p.validate()?;
        }
        Ok(PhantomSpec { primitives })
    }

    pub fn empty() -> Self {
        PhantomSpec { primitives: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// Common dimension of all primitives, `None` for an empty spec.
    pub fn dim(&self) -> Result<Option<usize>> {
        let mut dim = None;
        for p in &self.primitives {
            match dim {
                None => dim = Some(p.dim),
                Some(d) if d != p.dim => {
                    return Err(TatError::DimensionMismatch("phantom mixes 2D and 3D primitives".into()))
                }
                _ => {}
            }
        }
        Ok(dim)
    }

    pub fn concat(&self, other: &PhantomSpec<T>) -> PhantomSpec<T> {
        let mut primitives = self.primitives.clone();
        primitives.extend_from_slice(&other.primitives);
        PhantomSpec { primitives }
    }

    /// Exact analytic value at `x`; no grid involved.
    #[inline]
    pub fn eval(&self, x: &[T]) -> T {
        self.primitives.iter().fold(T::zero(), |acc, p| acc + p.eval(x))
    }

    /// Largest single amplitude magnitude.
    pub fn max_amplitude(&self) -> T {
        self.primitives.iter().fold(T::zero(), |m, p| m.max(p.amp.abs()))
    }

    /// Descriptions of primitives whose support is not contained in the grid box.
    pub fn support_warnings(&self, grid: &Grid<T>) -> Vec<String> {
        let lo_g = grid.lower();
        let hi_g = grid.upper();
        self.primitives
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let (lo, hi) = p.bounding_box();
                let outside = (0..grid.dim()).any(|a| lo[a] < lo_g[a] || hi[a] > hi_g[a]);
                outside.then(|| format!("primitive {i} ({}) extends outside the grid", p.keyword()))
            })
            .collect()
    }

    /// Samples the phantom at every grid node. Primitives reaching outside the
    /// grid are reported through `log::warn!` and otherwise rasterized as usual.
    pub fn rasterize(&self, grid: &Grid<T>) -> Result<ScalarField<T>> {
        if let Some(d) = self.dim()? {
            if d != grid.dim() {
                return Err(TatError::DimensionMismatch(format!("{d}D phantom on {}D grid", grid.dim())));
            }
        }
        for w in self.support_warnings(grid) {
            log::warn!("{w}");
        }
        let dim = grid.dim();
        let values: Vec<T> = (0..grid.len())
            .into_par_iter()
            .map(|i| self.eval(&grid.node_at(i)[..dim]))
            .collect();
        ScalarField::new(*grid, values)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.primitives {
            let c: Vec<f64> = p.center[..p.dim].iter().map(|&v| to_f64(v)).collect();
            let amp = to_f64(p.amp);
            let _ = match p.shape {
                Shape::Sphere { r } | Shape::Bump { r } => {
                    let cs: Vec<String> = c.iter().map(|v| format!("{v:?}")).collect();
                    writeln!(out, "{} {} {:?} {:?}", p.keyword(), cs.join(" "), to_f64(r), amp)
                }
                Shape::Block { half } => {
                    let cs: Vec<String> = c.iter().map(|v| format!("{v:?}")).collect();
                    let hs: Vec<String> = half[..p.dim].iter().map(|&v| format!("{:?}", to_f64(v))).collect();
                    writeln!(out, "{} {} {} {:?}", p.keyword(), cs.join(" "), hs.join(" "), amp)
                }
            };
        }
        out
    }

    /// Parses the line-oriented text format (`disk cx cy r amp`, ...).
    pub fn parse(text: &str) -> Result<Self> {
        let mut primitives = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| TatError::Parse { line: lineno + 1, msg };
            let mut tokens = line.split_whitespace();
            let kw = tokens.next().unwrap();
            let nums: Vec<f64> = tokens
                .map(|t| t.parse::<f64>().map_err(|_| err(format!("not a number: {t:?}"))))
                .collect::<Result<_>>()?;
            let v = |i: usize| lit::<T>(nums[i]);
            let expect = |n: usize| -> Result<()> {
                if nums.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{kw} expects {n} numbers, got {}", nums.len())))
                }
            };
            let p = match kw {
                "disk" => {
                    expect(4)?;
                    Primitive::disk(v(0), v(1), v(2), v(3))
                }
                "ball" => {
                    expect(5)?;
                    Primitive::ball([v(0), v(1), v(2)], v(3), v(4))
                }
                "bump" => match nums.len() {
                    4 => Primitive::bump2(v(0), v(1), v(2), v(3)),
                    5 => Primitive::bump3([v(0), v(1), v(2)], v(3), v(4)),
                    n => return Err(err(format!("bump expects 4 or 5 numbers, got {n}"))),
                },
                "rect" => {
                    expect(5)?;
                    Primitive::rect(v(0), v(1), v(2), v(3), v(4))
                }
                "box" => {
                    expect(7)?;
                    Primitive::cuboid([v(0), v(1), v(2)], [v(3), v(4), v(5)], v(6))
                }
                other => return Err(err(format!("unknown primitive {other:?}"))),
            };
            p.validate().map_err(|e| err(e.to_string()))?;
            primitives.push(p);
        }
        Ok(PhantomSpec { primitives })
    }
}

impl<T: Real> FromStr for PhantomSpec<T> {
    type Err = TatError;

    fn from_str(s: &str) -> Result<Self> {
        PhantomSpec::parse(s)
    }
}

impl<T: Real> Source<T> for PhantomSpec<T> {
    fn eval(&self, x: &[T]) -> T {
        PhantomSpec::eval(self, x)
    }

    fn support_box(&self) -> Option<([T; 3], [T; 3])> {
        let mut it = self.primitives.iter().map(|p| p.bounding_box());
        let first = it.next()?;
        Some(it.fold(first, |(lo, hi), (l, h)| {
            let mut out = (lo, hi);
            for a in 0..3 {
                out.0[a] = lo[a].min(l[a]);
                out.1[a] = hi[a].max(h[a]);
            }
            out
        }))
    }
}

impl<T: Real> Source<T> for ScalarField<T> {
    fn eval(&self, x: &[T]) -> T {
        self.interpolate(x)
    }

    fn support_box(&self) -> Option<([T; 3], [T; 3])> {
        Some((self.grid().lower(), self.grid().upper()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_spec_is_zero() {
        let g = Grid::<f64>::cube(2, 9, -1.0, 1.0).unwrap();
        let f = PhantomSpec::empty().rasterize(&g).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn disk_center_and_overlap() {
        let spec: PhantomSpec<f64> = "disk 0 0 0.5 1\ndisk 0.2 0 0.5 1 # second".parse().unwrap();
        assert_eq!(spec.primitives[0].eval(&[0.0, 0.0]), 1.0);
        assert_eq!(spec.eval(&[0.1, 0.0]), 2.0);
        assert_eq!(spec.eval(&[0.9, 0.9]), 0.0);
    }

    #[test]
    fn bump_values() {
        let b = Primitive::bump2(0.0, 0.0, 1.0, 2.0);
        assert_eq!(b.eval(&[0.0, 0.0]), 2.0);
        assert_eq!(b.eval(&[1.0, 0.0]), 0.0);
        assert!((b.eval(&[0.5, 0.0]) - 2.0 * 0.75f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn parse_errors() {
        assert!(PhantomSpec::<f64>::parse("disk 0 0 1").is_err());
        assert!(PhantomSpec::<f64>::parse("disk 0 0 -1 1").is_err());
        assert!(PhantomSpec::<f64>::parse("blob 0 0 1 1").is_err());
        assert!(PhantomSpec::<f64>::parse("box 0 0 0 1 1 x 1").is_err());
        let s = PhantomSpec::<f64>::parse("# only comment\n\nbump 0 0 0 0.5 1\nbox 0 0 0 .1 .2 .3 -1").unwrap();
        assert_eq!(s.dim().unwrap(), Some(3));
    }

    #[test]
    fn mixed_dimension_rejected_on_raster() {
        let s = PhantomSpec::<f64>::parse("disk 0 0 0.2 1\nball 0 0 0 0.2 1").unwrap();
        let g = Grid::cube(2, 4, -1.0, 1.0).unwrap();
        assert!(matches!(s.rasterize(&g), Err(TatError::DimensionMismatch(_))));
    }

    #[test]
    fn outside_primitive_warns_but_rasterizes() {
        let s = PhantomSpec::<f64>::parse("disk 0.9 0 0.5 1").unwrap();
        let g = Grid::cube(2, 11, -1.0, 1.0).unwrap();
        assert_eq!(s.support_warnings(&g).len(), 1);
        assert!(s.rasterize(&g).is_ok());
    }

    #[test]
    fn text_roundtrip() {
        let s = PhantomSpec::<f64>::parse("disk 0.1 -0.2 0.3 1.5\nrect 0 0 0.1 0.2 -1\nbump 0 0 0.3 2").unwrap();
        assert_eq!(PhantomSpec::parse(&s.to_text()).unwrap(), s);
    }

    fn arb_prim() -> impl Strategy<Value = Primitive<f64>> {
        (0..3u8, -0.8..0.8f64, -0.8..0.8f64, 0.05..0.6f64, -2.0..2.0f64).prop_map(|(k, x, y, r, a)| match k {
            0 => Primitive::disk(x, y, r, a),
            1 => Primitive::bump2(x, y, r, a),
            _ => Primitive::rect(x, y, r, r * 0.5, a),
        })
    }

    proptest! {
        #[test]
        fn raster_matches_eval_and_is_linear(a in prop::collection::vec(arb_prim(), 0..4),
                                             b in prop::collection::vec(arb_prim(), 0..4)) {
            let g = Grid::cube(2, 17, -1.0, 1.0).unwrap();
            let sa = PhantomSpec::new(a).unwrap();
            let sb = PhantomSpec::new(b).unwrap();
            let fa = sa.rasterize(&g).unwrap();
            for i in 0..g.len() {
                prop_assert_eq!(fa.values()[i], sa.eval(&g.node_at(i)[..2]));
            }
            let fb = sb.rasterize(&g).unwrap();
            let fab = sa.concat(&sb).rasterize(&g).unwrap();
            for i in 0..g.len() {
                prop_assert!((fab.values()[i] - (fa.values()[i] + fb.values()[i])).abs() <= 1e-12);
            }
        }
    }
}
