//! Binary interchange files for fields and data, plus PGM image export.
//!
//! All multi-byte quantities are little-endian. Payload samples are always
//! stored as IEEE-754 binary64, so `f64` round trips are bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::data::{DataKind, TatData};
use crate::error::{FormatError, Result, TatError};
use crate::geometry::{DetectorGeometry, SurfaceKind};
use crate::grid::{Grid, ScalarField};
use crate::scalar::{lit, to_f64, Real};

pub const FIELD_MAGIC: [u8; 4] = *b"TATF";
pub const DATA_MAGIC: [u8; 4] = *b"TATD";
const VERSION: u32 = 1;

fn read_header(r: &mut impl Read, expected: [u8; 4]) -> Result<()> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != expected {
        return Err(FormatError::BadMagic { expected, found: magic }.into());
    }
    let version = r.read_u32::<LE>()?;
    if version != VERSION {
        return Err(FormatError::BadVersion(version).into());
    }
    Ok(())
}

fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(FormatError::Validation("trailing bytes after payload".into()).into()),
    }
}

fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    r.read_f64_into::<LE>(&mut out)?;
    Ok(out)
}

pub fn write_field_to<T: Real>(w: &mut impl Write, f: &ScalarField<T>) -> Result<()> {
    let g = f.grid();
    w.write_all(&FIELD_MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u32::<LE>(g.dim() as u32)?;
    for &n in g.shape() {
        w.write_u32::<LE>(n as u32)?;
    }
    for &o in g.origin() {
        w.write_f64::<LE>(to_f64(o))?;
    }
    for &h in g.spacing() {
        w.write_f64::<LE>(to_f64(h))?;
    }
    for &v in f.values() {
        w.write_f64::<LE>(to_f64(v))?;
    }
    Ok(())
}

pub fn read_field_from<T: Real>(r: &mut impl Read) -> Result<ScalarField<T>> {
    read_header(r, FIELD_MAGIC)?;
    let dim = r.read_u32::<LE>()?;
    if !(2..=3).contains(&dim) {
        return Err(FormatError::TagOutOfRange { what: "dimension", value: dim }.into());
    }
    let dim = dim as usize;
    let mut n = vec![0usize; dim];
    for v in n.iter_mut() {
        *v = r.read_u32::<LE>()? as usize;
    }
    let origin: Vec<T> = read_f64s(r, dim)?.into_iter().map(lit).collect();
    let spacing: Vec<T> = read_f64s(r, dim)?.into_iter().map(lit).collect();
    let grid = Grid::new(&n, &origin, &spacing).map_err(|e| FormatError::Validation(e.to_string()))?;
    let values: Vec<T> = read_f64s(r, grid.len())?.into_iter().map(lit).collect();
    expect_eof(r)?;
    ScalarField::new(grid, values).map_err(|e| FormatError::Validation(e.to_string()).into())
}

pub fn write_data_to<T: Real>(w: &mut impl Write, d: &TatData<T>) -> Result<()> {
    w.write_all(&DATA_MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u8(d.kind() as u8)?;
    let geom = d.geometry();
    w.write_u8(geom.kind() as u8)?;
    for p in geom.params() {
        w.write_f64::<LE>(p)?;
    }
    w.write_u32::<LE>(geom.len() as u32)?;
    w.write_u32::<LE>(d.n_samples() as u32)?;
    w.write_f64::<LE>(to_f64(d.dt()))?;
    for &v in d.values() {
        w.write_f64::<LE>(to_f64(v))?;
    }
    Ok(())
}

pub fn read_data_from<T: Real>(r: &mut impl Read) -> Result<TatData<T>> {
    read_header(r, DATA_MAGIC)?;
    let kind = DataKind::from_tag(r.read_u8()?)?;
    let gkind = SurfaceKind::from_tag(r.read_u8()?)?;
    let params = read_f64s(r, gkind.n_params())?;
    let n_det = r.read_u32::<LE>()? as usize;
    let geometry = DetectorGeometry::from_params(gkind, &params, n_det)
        .map_err(|e| FormatError::Validation(format!("geometry: {e}")))?;
    let n_samples = r.read_u32::<LE>()? as usize;
    let dt: T = lit(r.read_f64::<LE>()?);
    let values: Vec<T> = read_f64s(r, n_det * n_samples)?.into_iter().map(lit).collect();
    expect_eof(r)?;
    TatData::new(geometry, kind, n_samples, dt, values).map_err(|e| match e {
        TatError::Format(f) => TatError::Format(f),
        other => FormatError::Validation(other.to_string()).into(),
    })
}

pub fn write_field<T: Real>(path: impl AsRef<Path>, f: &ScalarField<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field_to(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn read_field<T: Real>(path: impl AsRef<Path>) -> Result<ScalarField<T>> {
    read_field_from(&mut BufReader::new(File::open(path)?))
}

pub fn write_data<T: Real>(path: impl AsRef<Path>, d: &TatData<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_data_to(&mut w, d)?;
    w.flush()?;
    Ok(())
}

pub fn read_data<T: Real>(path: impl AsRef<Path>) -> Result<TatData<T>> {
    read_data_from(&mut BufReader::new(File::open(path)?))
}

/// Linear mapping used by the PGM exporter: `level = round((v - min) * scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmScale {
    pub min: f64,
    pub max: f64,
    pub scale: f64,
}

/// Writes a 2D field (or the slice `index` along axis 0 of a 3D field) as an
/// ASCII PGM with 16-bit levels; image rows run from high to low axis-1
/// coordinate so the picture has the usual orientation.
pub fn write_pgm<T: Real>(path: impl AsRef<Path>, f: &ScalarField<T>, slice: Option<usize>) -> Result<PgmScale> {
    let g = f.grid();
    let (nx, ny, offset, stride) = match g.dim() {
        2 => (g.shape()[0], g.shape()[1], 0, 1),
        _ => {
            let n = g.shape();
            let k = slice.unwrap_or(n[0] / 2);
            if k >= n[0] {
                return Err(TatError::InvalidArgument(format!("slice {k} out of range 0..{}", n[0])));
            }
            // plane x0 = k, image axes (x1, x2)
            (n[1], n[2], k * n[1] * n[2], 1)
        }
    };
    let at = |i: usize, j: usize| to_f64(f.values()[offset + (i * ny + j) * stride]);
    let (lo, hi) = f.min_max();
    let (lo, hi) = (to_f64(lo), to_f64(hi));
    let scale = if hi > lo { 65535.0 / (hi - lo) } else { 0.0 };
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "P2")?;
    writeln!(w, "{nx} {ny}")?;
    writeln!(w, "65535")?;
    for j in (0..ny).rev() {
        let row: Vec<String> = (0..nx)
            .map(|i| (((at(i, j) - lo) * scale).round().clamp(0.0, 65535.0) as u32).to_string())
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()?;
    let info = PgmScale { min: lo, max: hi, scale };
    let mut side = BufWriter::new(File::create(scale_sidecar(path.as_ref()))?);
    writeln!(side, "min,max,scale")?;
    writeln!(side, "{:e},{:e},{:e}", info.min, info.max, info.scale)?;
    side.flush()?;
    Ok(info)
}

/// `image.pgm` → `image.scale.csv`.
pub fn scale_sidecar(path: &Path) -> PathBuf {
    path.with_extension("scale.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn field() -> ScalarField<f64> {
        let g = Grid::new(&[3, 3], &[-1.0, 0.5], &[0.25, 1.0 / 3.0]).unwrap();
        ScalarField::new(g, vec![0.1, -2.5, 3.0, f64::MIN_POSITIVE, 1e300, -0.0, 7.0, 8.5, std::f64::consts::PI]).unwrap()
    }

    #[test]
    fn field_roundtrip_bit_exact() {
        let f = field();
        let mut buf = Vec::new();
        write_field_to(&mut buf, &f).unwrap();
        let back: ScalarField<f64> = read_field_from(&mut Cursor::new(&buf)).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn distinct_error_codes() {
        let f = field();
        let mut buf = Vec::new();
        write_field_to(&mut buf, &f).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        let code = |r: Result<ScalarField<f64>>| match r {
            Err(TatError::Format(e)) => e.code(),
            other => panic!("expected format error, got {other:?}"),
        };
        let c_magic = code(read_field_from(&mut Cursor::new(&bad)));
        let c_trunc = code(read_field_from(&mut Cursor::new(&buf[..buf.len() - 3])));
        let mut dim = buf.clone();
        dim[8] = 7;
        let c_dim = code(read_field_from(&mut Cursor::new(&dim)));
        assert_eq!(c_magic, 1);
        assert_eq!(c_trunc, 3);
        assert_eq!(c_dim, 4);
        let msg = read_field_from::<f64>(&mut Cursor::new(&bad)).unwrap_err().to_string();
        assert!(msg.contains("bad magic"));
    }

    #[test]
    fn data_roundtrip_and_validation() {
        let g = DetectorGeometry::<f64>::arc([0.0, 0.0], 1.0, 0.3, 2.0, 4).unwrap();
        let vals: Vec<f64> = (0..20).map(|i| if i % 5 == 0 { 0.0 } else { (i as f64).sqrt() }).collect();
        let d = TatData::new(g, DataKind::Integral, 5, 0.01, vals).unwrap();
        let mut buf = Vec::new();
        write_data_to(&mut buf, &d).unwrap();
        let back: TatData<f64> = read_data_from(&mut Cursor::new(&buf)).unwrap();
        assert_eq!(back, d);
        // corrupt the r = 0 sample of the first trace
        let header = 4 + 4 + 1 + 1 + 5 * 8 + 4 + 4 + 8;
        buf[header..header + 8].copy_from_slice(&1.0f64.to_le_bytes());
        match read_data_from::<f64>(&mut Cursor::new(&buf)) {
            Err(TatError::Format(FormatError::Validation(_))) => {}
            other => panic!("{other:?}"),
        }
        let mut kind = Vec::new();
        write_data_to(&mut kind, &d).unwrap();
        kind[8] = 9;
        assert!(matches!(
            read_data_from::<f64>(&mut Cursor::new(&kind)),
            Err(TatError::Format(FormatError::TagOutOfRange { .. }))
        ));
    }

    #[test]
    fn pgm_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("img.pgm");
        let s = write_pgm(&p, &field(), None).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("P2\n3 3\n65535\n"));
        assert!(text.contains("65535") && text.split_whitespace().any(|w| w == "0"));
        assert_eq!(s.max, 1e300);
        let side = std::fs::read_to_string(dir.path().join("img.scale.csv")).unwrap();
        assert!(side.starts_with("min,max,scale"));
    }
}
