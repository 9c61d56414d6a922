use rayon::prelude::*;

use crate::error::{invalid, Result, TatError};
use crate::grid::ScalarField;
use crate::scalar::{lit, Real};

/// Labelled straight piece of an interface, used to measure how sharply a
/// reconstruction resolves it.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSegment<T> {
    pub label: String,
    pub a: [T; 3],
    pub b: [T; 3],
}

impl<T: Real> EdgeSegment<T> {
    pub fn new(label: impl Into<String>, a: [T; 3], b: [T; 3]) -> Self {
        EdgeSegment { label: label.into(), a, b }
    }

    fn distance(&self, x: &[T; 3], dim: usize) -> T {
        let d: Vec<T> = (0..dim).map(|k| self.b[k] - self.a[k]).collect();
        let dd = d.iter().map(|v| *v * *v).sum::<T>();
        let u = if dd > T::zero() {
            ((0..dim).map(|k| (x[k] - self.a[k]) * d[k]).sum::<T>() / dd).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        (0..dim).map(|k| (x[k] - self.a[k] - u * d[k]).powi(2)).sum::<T>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics<T> {
    pub rel_l2: T,
    pub rel_linf: T,
    pub edge_sharpness: Vec<(String, T)>,
}

fn check_same<T: Real>(a: &ScalarField<T>, b: &ScalarField<T>) -> Result<()> {
    if a.grid().same_layout(b.grid()) {
        Ok(())
    } else {
        Err(TatError::DimensionMismatch("fields live on different grids".into()))
    }
}

/// `‖rec - reference‖₂ / ‖reference‖₂`.
pub fn rel_l2<T: Real>(reference: &ScalarField<T>, rec: &ScalarField<T>) -> Result<T> {
    check_same(reference, rec)?;
    let num = rec.values().iter().zip(reference.values()).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>();
    let den = reference.values().iter().map(|&b| b * b).sum::<T>();
    if den == T::zero() {
        return Err(invalid("reference field is identically zero"));
    }
    Ok((num / den).sqrt())
}

/// `max |rec - reference| / max |reference|`.
pub fn rel_linf<T: Real>(reference: &ScalarField<T>, rec: &ScalarField<T>) -> Result<T> {
    check_same(reference, rec)?;
    let num = rec.values().iter().zip(reference.values()).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let den = reference.max_abs();
    if den == T::zero() {
        return Err(invalid("reference field is identically zero"));
    }
    Ok(num / den)
}

/// Mean gradient magnitude of `f` over the nodes within 1.5 cells of the
/// segment (a band three cells wide).
pub fn edge_sharpness<T: Real>(f: &ScalarField<T>, seg: &EdgeSegment<T>) -> Result<T> {
    let g = f.grid();
    let dim = g.dim();
    let h = g.spacing()[..dim].iter().fold(T::zero(), |m, &v| m.max(v));
    let band = lit::<T>(1.5) * h;
    let shape = g.shape().to_vec();
    let (sum, count) = (0..g.len())
        .into_par_iter()
        .filter(|&i| seg.distance(&g.node_at(i), dim) <= band)
        .map(|i| {
            let idx = g.unravel(i);
            let mut grad2 = T::zero();
            for a in 0..dim {
                let (mut lo, mut hi) = (idx, idx);
                if idx[a] > 0 {
                    lo[a] -= 1;
                }
                if idx[a] + 1 < shape[a] {
                    hi[a] += 1;
                }
                let span = lit::<T>((hi[a] - lo[a]) as f64) * g.spacing()[a];
                if span > T::zero() {
                    let d = (f.get(hi) - f.get(lo)) / span;
                    grad2 += d * d;
                }
            }
            (grad2.sqrt(), 1usize)
        })
        .reduce(|| (T::zero(), 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if count == 0 {
        return Err(invalid(format!("segment '{}' has no grid nodes within its band", seg.label)));
    }
    Ok(sum / lit::<T>(count as f64))
}

pub fn metrics<T: Real>(reference: &ScalarField<T>, rec: &ScalarField<T>, segments: &[EdgeSegment<T>]) -> Result<Metrics<T>> {
    let edge_sharpness = segments
        .iter()
        .map(|s| Ok((s.label.clone(), edge_sharpness(rec, s)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Metrics { rel_l2: rel_l2(reference, rec)?, rel_linf: rel_linf(reference, rec)?, edge_sharpness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn trivial_cases() {
        let g = Grid::cube(2, 16, -1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x: &[f64]| x[0] + 2.0 * x[1]);
        assert_eq!(rel_l2(&f, &f).unwrap(), 0.0);
        assert_eq!(rel_l2(&f, &ScalarField::zeros(g)).unwrap(), 1.0);
        assert_eq!(rel_linf(&f, &ScalarField::zeros(g)).unwrap(), 1.0);
        let seg = EdgeSegment::new("mid", [-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]);
        let s = edge_sharpness(&f, &seg).unwrap();
        assert!((s - 5f64.sqrt()).abs() < 1e-12);
        let other = Grid::cube(2, 17, -1.0, 1.0).unwrap();
        assert!(rel_l2(&f, &ScalarField::zeros(other)).is_err());
    }
}
