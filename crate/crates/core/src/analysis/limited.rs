use crate::data::TatData;
use crate::error::{invalid, Result, TatError};
use crate::fbp::{fbp_invert, FbpConfig, FbpVariant};
use crate::geometry::{DetectorGeometry, Surface};
use crate::grid::{Grid, ScalarField};
use crate::scalar::{from_usize, lit, wrap_angle, Real};

/// Embeds arc data into a full circle of detectors with the arc's angular
/// spacing: traces inside the arc are interpolated linearly in angle, the
/// rest are zero.
pub fn zero_fill_arc<T: Real>(data: &TatData<T>) -> Result<TatData<T>> {
    let (center, radius, start, span) = match *data.geometry().surface() {
        Surface::Arc { center, radius, start, span } => (center, radius, start, span),
        _ => return Err(TatError::UnsupportedGeometry(format!("zero filling needs arc data, got {:?}", data.geometry().kind()))),
    };
    let n_arc = data.n_detectors();
    if n_arc < 2 || !(span > T::zero()) {
        return Err(invalid("arc must have positive span and at least two detectors"));
    }
    let step = span / from_usize::<T>(n_arc - 1);
    let m = (T::TAU() / step).round().to_usize().unwrap_or(0).max(n_arc);
    let circle = DetectorGeometry::circle(center, radius, m)?;
    let ns = data.n_samples();
    let tol = lit::<T>(1e-9) * span;
    let mut values = vec![T::zero(); m * ns];
    for (i, row) in values.chunks_mut(ns).enumerate() {
        let theta = T::TAU() * from_usize::<T>(i) / from_usize::<T>(m);
        let mut d = wrap_angle(theta - start);
        if d > T::TAU() - tol {
            d = T::zero();
        }
        if d > span + tol {
            continue;
        }
        let u = (d / step).min(from_usize::<T>(n_arc - 1));
        let k = u.floor().to_usize().unwrap_or(0).min(n_arc - 2);
        let f = u - from_usize::<T>(k);
        for ((o, &a), &b) in row.iter_mut().zip(data.trace(k)).zip(data.trace(k + 1)) {
            *o = a * (T::one() - f) + b * f;
        }
    }
    TatData::new(circle, data.kind(), ns, data.dt(), values)
}

/// Filtered backprojection of arc data after [`zero_fill_arc`].
pub fn limited_view_fbp<T: Real>(data: &TatData<T>, grid: &Grid<T>, variant: FbpVariant, cfg: &FbpConfig<T>) -> Result<ScalarField<T>> {
    let full = zero_fill_arc(data)?;
    fbp_invert(&full, grid, variant, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataKind;

    #[test]
    fn half_circle_fills_half_the_detectors() {
        let arc = DetectorGeometry::<f64>::arc([0.0, 0.0], 1.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 33).unwrap();
        let d = TatData::new(arc, DataKind::Mean, 4, 0.5, vec![1.0; 33 * 4]).unwrap();
        let full = zero_fill_arc(&d).unwrap();
        assert_eq!(full.n_detectors(), 64);
        let lit = full.traces().filter(|t| t[0] == 1.0).count();
        assert_eq!(lit, 33);
        assert!(full.traces().all(|t| t[0] == 1.0 || t[0] == 0.0));
    }
}
