//! Measured (or simulated) data: one trace per detector, uniformly sampled in
//! radius/time.

use crate::error::{invalid, FormatError, Result, TatError};
use crate::geometry::DetectorGeometry;
use crate::scalar::{from_usize, Real};

/// What the samples of a [`TatData`] represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum DataKind {
    /// Normalised spherical means `M(y, r)`.
    Mean = 0,
    /// Spherical integrals `|S^{d-1}| r^{d-1} M(y, r)`.
    Integral = 1,
    /// Acoustic pressure `p(y, t)`.
    Pressure = 2,
}

impl DataKind {
    pub fn from_tag(tag: u8) -> Result<Self, FormatError> {
        match tag {
            0 => Ok(DataKind::Mean),
            1 => Ok(DataKind::Integral),
            2 => Ok(DataKind::Pressure),
            _ => Err(FormatError::TagOutOfRange { what: "data kind", value: tag as u32 }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DataKind::Mean => "mean",
            DataKind::Integral => "integral",
            DataKind::Pressure => "pressure",
        }
    }
}

impl std::str::FromStr for DataKind {
    type Err = TatError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(DataKind::Mean),
            "integral" => Ok(DataKind::Integral),
            "pressure" => Ok(DataKind::Pressure),
            _ => Err(invalid(format!("unknown data kind '{s}'"))),
        }
    }
}

/// Detector-major array `g(y_i, t_j)`, `t_j = j * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct TatData<T> {
    geometry: DetectorGeometry<T>,
    kind: DataKind,
    n_samples: usize,
    dt: T,
    values: Vec<T>,
}

impl<T: Real> TatData<T> {
    /// Validates shape, finiteness, `dt > 0`, and for integrals that the
    /// `t = 0` column vanishes.
    pub fn new(geometry: DetectorGeometry<T>, kind: DataKind, n_samples: usize, dt: T, values: Vec<T>) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(invalid("sample spacing must be positive"));
        }
        if n_samples < 2 {
            return Err(invalid("need at least two samples per trace"));
        }
        if values.len() != geometry.len() * n_samples {
            return Err(TatError::DimensionMismatch(format!(
                "{} values for {} detectors x {} samples",
                values.len(),
                geometry.len(),
                n_samples
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TatError::Numeric("data contain non-finite values".into()));
        }
        if kind == DataKind::Integral && values.chunks(n_samples).any(|row| row[0] != T::zero()) {
            return Err(FormatError::Validation("spherical integrals must vanish at r = 0".into()).into());
        }
        Ok(TatData { geometry, kind, n_samples, dt, values })
    }

    pub fn zeros(geometry: DetectorGeometry<T>, kind: DataKind, n_samples: usize, dt: T) -> Result<Self> {
        let n = geometry.len() * n_samples;
        Self::new(geometry, kind, n_samples, dt, vec![T::zero(); n])
    }

    pub fn geometry(&self) -> &DetectorGeometry<T> {
        &self.geometry
    }

    pub fn kind(&self) -> DataKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn n_detectors(&self) -> usize {
        self.geometry.len()
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Largest sampled radius/time.
    pub fn t_max(&self) -> T {
        from_usize::<T>(self.n_samples - 1) * self.dt
    }

    pub fn time(&self, j: usize) -> T {
        from_usize::<T>(j) * self.dt
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn trace(&self, i: usize) -> &[T] {
        &self.values[i * self.n_samples..(i + 1) * self.n_samples]
    }

    pub fn traces(&self) -> std::slice::Chunks<'_, T> {
        self.values.chunks(self.n_samples)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Same geometry and sampling, new values (re-validated).
    pub fn with_values(&self, kind: DataKind, values: Vec<T>) -> Result<Self> {
        Self::new(self.geometry.clone(), kind, self.n_samples, self.dt, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_enforced() {
        let g = DetectorGeometry::<f64>::circle([0.0, 0.0], 1.0, 3).unwrap();
        assert!(TatData::new(g.clone(), DataKind::Mean, 4, 0.0, vec![0.0; 12]).is_err());
        assert!(TatData::new(g.clone(), DataKind::Mean, 4, 0.1, vec![0.0; 11]).is_err());
        let mut v = vec![0.0; 12];
        v[4] = 1.0;
        assert!(matches!(
            TatData::new(g.clone(), DataKind::Integral, 4, 0.1, v.clone()),
            Err(TatError::Format(FormatError::Validation(_)))
        ));
        let d = TatData::new(g, DataKind::Mean, 4, 0.1, v).unwrap();
        assert_eq!(d.trace(1)[0], 1.0);
        assert!((d.t_max() - 0.3).abs() < 1e-15);
    }
}
