use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use tat_core::analysis::{
    limited_view_fbp, metrics, moment_check, orthogonality_check, visibility_map, with_noise, Condition, EdgeSegment,
};
use tat_core::fbp::{fbp_invert, FbpConfig, FbpVariant};
use tat_core::forward::{exact_radial_forward, pressure_from_means, spherical_forward, QuadratureSpec};
use tat_core::io::{write_data, write_field, write_pgm};
use tat_core::series::{
    cubic_series, eigen_expand_variable_speed, norton2d, square_series_2d, EigenConfig, NortonConfig, SeriesConfig,
};
use tat_core::wavesim::{conforming_grid, fd_forward, time_reversal, FdConfig};
use tat_core::{Data, DataKind, Field, Geometry, Grid, Phantom, ScalarField, SurfaceKind, TatError};

use crate::args::*;

type Result<T> = std::result::Result<T, TatError>;

fn bad(msg: impl Into<String>) -> TatError {
    TatError::InvalidArgument(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("--{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(bad(format!("--{name} must be at least {min}, got {v}")))
    }
}

fn with_path(path: &Path, e: TatError) -> TatError {
    match e {
        TatError::Io(io) => TatError::Io(io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

fn read_field(path: &Path) -> Result<Field> {
    tat_core::io::read_field(path).map_err(|e| with_path(path, e))
}

fn read_data(path: &Path) -> Result<Data> {
    tat_core::io::read_data(path).map_err(|e| with_path(path, e))
}

fn read_spec(path: &Path) -> Result<Phantom> {
    let text = fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    Phantom::parse(&text)
}

fn point(v: &Option<Vec<f64>>, dim: usize, what: &str) -> Result<[f64; 3]> {
    let mut p = [0.0; 3];
    if let Some(v) = v {
        if v.len() != dim {
            return Err(bad(format!("--{what} needs {dim} components, got {}", v.len())));
        }
        p[..dim].copy_from_slice(v);
    }
    Ok(p)
}

pub fn build_geometry(g: &GeometryArgs) -> Result<Geometry> {
    positive("radius", g.radius)?;
    at_least("detectors", g.detectors, 1)?;
    let dim = if matches!(g.geometry, GeomKind::Sphere | GeomKind::Cube) { 3 } else { 2 };
    let c = point(&g.center, dim, "center")?;
    match g.geometry {
        GeomKind::Circle => Geometry::circle([c[0], c[1]], g.radius, g.detectors),
        GeomKind::Arc => Geometry::arc([c[0], c[1]], g.radius, g.arc_start, g.arc_span, g.detectors),
        GeomKind::Sphere => Geometry::sphere(c, g.radius, g.detectors),
        GeomKind::Square => Geometry::square([c[0], c[1]], g.radius, g.detectors),
        GeomKind::Cube => Geometry::cube(c, g.radius, g.detectors),
        GeomKind::Line => {
            let s = g.segment.as_ref().ok_or_else(|| bad("--geometry line needs --segment x0,y0,x1,y1"))?;
            if s.len() != 4 {
                return Err(bad("--segment needs four numbers"));
            }
            Geometry::line([s[0], s[1]], [s[2], s[3]], g.detectors)
        }
    }
}

/// Isotropic grid box from the flags; `center` and `extent` are the defaults.
fn make_grid(g: &GridArgs, dim: usize, center: [f64; 3], extent: f64) -> Result<Grid<f64>> {
    at_least("grid", g.grid, 2)?;
    let extent = g.extent.unwrap_or(extent);
    positive("extent", extent)?;
    let c = if g.grid_center.is_some() { point(&g.grid_center, dim, "grid-center")? } else { center };
    let h = extent / (g.grid - 1) as f64;
    let origin: Vec<f64> = (0..dim).map(|a| c[a] - extent / 2.0).collect();
    Grid::new(&vec![g.grid; dim], &origin, &vec![h; dim])
}

fn output(path: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn phantom(a: &PhantomArgs) -> Result<()> {
    let spec = read_spec(&a.spec)?;
    let dim = spec.dim()?.unwrap_or(a.dim);
    let grid = make_grid(&a.grid, dim, [0.0; 3], 2.0)?;
    let f = spec.rasterize(&grid)?;
    write_field(&a.out, &f)
}

pub fn forward(a: &ForwardArgs) -> Result<()> {
    let geom = build_geometry(&a.geometry)?;
    at_least("samples", a.samples, 2)?;
    at_least("quad-circle", a.quad_circle, 8)?;
    at_least("quad-lat", a.quad_lat, 8)?;
    at_least("quad-lon", a.quad_lon, 8)?;
    if !(a.noise >= 0.0) {
        return Err(bad("--noise must be non-negative"));
    }
    let t_max = a.t_max.unwrap_or(2.0 * geom.outer_radius());
    positive("t-max", t_max)?;
    let dt = t_max / (a.samples - 1) as f64;
    let quad = QuadratureSpec { n_circle: a.quad_circle, n_lat: a.quad_lat, n_lon: a.quad_lon };
    let kind = match a.kind {
        KindArg::Integral => DataKind::Integral,
        KindArg::Mean | KindArg::Pressure => DataKind::Mean,
    };
    if a.kind == KindArg::Pressure && geom.dim() != 3 {
        return Err(TatError::DimensionMismatch("pressure from means is a 3D formula; use wave-forward in 2D".into()));
    }
    let mut data = match (&a.spec, &a.field) {
        (Some(path), _) => {
            let spec = read_spec(path)?;
            if let Some(d) = spec.dim()? {
                if d != geom.dim() {
                    return Err(TatError::DimensionMismatch(format!("{d}D phantom with {}D detectors", geom.dim())));
                }
            }
            if a.exact {
                exact_radial_forward(&spec, &geom, a.samples, dt, kind)?
            } else {
                spherical_forward(&spec, &geom, a.samples, dt, kind, &quad)?
            }
        }
        (None, Some(path)) => {
            if a.exact {
                return Err(bad("--exact needs an analytic --spec"));
            }
            let f = read_field(path)?;
            if f.grid().dim() != geom.dim() {
                return Err(TatError::DimensionMismatch(format!("{}D field with {}D detectors", f.grid().dim(), geom.dim())));
            }
            spherical_forward(&f, &geom, a.samples, dt, kind, &quad)?
        }
        (None, None) => return Err(bad("give --spec or --field")),
    };
    if a.kind == KindArg::Pressure {
        data = pressure_from_means(&data)?;
    }
    if a.noise > 0.0 {
        data = with_noise(&data, a.noise, a.seed)?;
    }
    write_data(&a.out, &data)
}

fn speed_on(s: &SpeedArgs, grid: &Grid<f64>) -> Result<Field> {
    match &s.speed {
        Some(p) => read_field(p),
        None => {
            positive("speed-const", s.speed_const)?;
            Ok(ScalarField::constant(*grid, s.speed_const))
        }
    }
}

fn fd_config(s: &SpeedArgs, t_final: f64, padding: Option<usize>) -> Result<FdConfig<f64>> {
    positive("t-final", t_final)?;
    if let Some(c) = s.cfl {
        positive("cfl", c)?;
    }
    Ok(FdConfig { cfl: s.cfl, padding, t_final })
}

pub fn wave_forward(a: &WaveForwardArgs) -> Result<()> {
    let geom = build_geometry(&a.geometry)?;
    let f = match (&a.field, &a.spec) {
        (Some(p), _) => read_field(p)?,
        (None, Some(p)) => read_spec(p)?.rasterize(&conforming_grid(&geom)?)?,
        (None, None) => return Err(bad("give --field or --spec")),
    };
    let c = speed_on(&a.speed, f.grid())?;
    let cfg = fd_config(&a.speed, a.t_final, a.padding)?;
    write_data(&a.out, &fd_forward(&f, &c, &geom, &cfg)?)
}

pub fn recon(a: &ReconArgs) -> Result<()> {
    let data: Data = read_data(&a.input)?;
    let geom = data.geometry().clone();
    let dim = data.dim();
    at_least("lambda-refine", a.lambda_refine, 1)?;
    for (name, v) in [("lambda-max", a.lambda_max), ("log-eps", a.log_eps)] {
        if let Some(v) = v {
            positive(name, v)?;
        }
    }
    let method = a.method.clone().unwrap_or_else(|| FbpVariant::default_for(dim).name().to_string());
    let grid = || make_grid(&a.grid, dim, geom.center(), 1.4 * geom.outer_radius());
    let rec = match method.as_str() {
        "norton2d" => {
            let cfg = NortonConfig { use_hankel: !a.no_hankel, m_max: a.m_max, lambda_max: a.lambda_max, mask: a.mask };
            norton2d(&data, &grid()?, &cfg)?
        }
        "cubic_series" | "square_series_2d" => {
            at_least("interp-order", a.interp_order, 2)?;
            let cfg = SeriesConfig { m_max: a.m_max, interp_order: a.interp_order };
            log::info!("series reconstructions use the interior nodes of the detector lattice; grid flags are ignored");
            if method == "cubic_series" {
                cubic_series(&data, &cfg)?
            } else {
                square_series_2d(&data, &cfg)?
            }
        }
        "eigen_expand" => {
            at_least("k-max", a.k_max, 1)?;
            let c = speed_on(&a.speed, &conforming_grid(&geom)?)?;
            eigen_expand_variable_speed(&data, &c, &EigenConfig { k_max: a.k_max })?
        }
        "time_reversal" => {
            let c = speed_on(&a.speed, &conforming_grid(&geom)?)?;
            time_reversal(&data, &c, &geom, &fd_config(&a.speed, data.t_max(), None)?)?
        }
        name => {
            let variant: FbpVariant = name.parse()?;
            let cfg = FbpConfig { lambda_refine: a.lambda_refine, lambda_max: a.lambda_max, log_eps: a.log_eps };
            if geom.kind() == SurfaceKind::Arc {
                if !a.zero_fill {
                    return Err(TatError::UnsupportedGeometry(
                        "inversion formulas need a closed surface; pass --zero-fill to treat the arc as a zero-padded circle".into(),
                    ));
                }
                limited_view_fbp(&data, &grid()?, variant, &cfg)?
            } else {
                fbp_invert(&data, &grid()?, variant, &cfg)?
            }
        }
    };
    if rec.values().iter().any(|v| !v.is_finite()) {
        return Err(TatError::Numeric("reconstruction contains non-finite values".into()));
    }
    write_field(&a.out, &rec)
}

pub fn range_check(a: &RangeCheckArgs) -> Result<()> {
    let data: Data = read_data(&a.input)?;
    positive("tolerance", a.tolerance)?;
    if a.skip_moment && a.skip_orthogonality {
        return Err(bad("both checks skipped"));
    }
    let mut report = None;
    if !a.skip_moment {
        report = Some(moment_check(&data, a.k_max, a.tolerance)?);
    }
    if !a.skip_orthogonality {
        let o = orthogonality_check(&data, a.m_max, a.q_max, a.tolerance)?;
        report = Some(match report {
            Some(r) => r.merge(o),
            None => o,
        });
    }
    let report = report.expect("at least one check ran");
    report.write_csv(output(&a.out)?)?;
    let verdict = if report.passed() { "pass" } else { "fail" };
    let worst = |c| report.entries.iter().any(|e| e.condition == c).then(|| report.max_residual(Some(c)));
    eprintln!(
        "range check: {verdict} (max moment residual {}, max orthogonality residual {}, tolerance {:e})",
        worst(Condition::Moment).map_or("-".into(), |v| format!("{v:e}")),
        worst(Condition::Orthogonality).map_or("-".into(), |v| format!("{v:e}")),
        a.tolerance
    );
    Ok(())
}

pub fn visibility(a: &VisibilityArgs) -> Result<()> {
    let spec = read_spec(&a.spec)?;
    let geom = build_geometry(&a.geometry)?;
    let map = visibility_map(&spec, &geom)?;
    map.write_csv(output(&a.out)?)?;
    log::info!("{:.1}% of boundary samples visible", 100.0 * map.visible_fraction());
    Ok(())
}

fn parse_edge(s: &str, dim: usize) -> Result<EdgeSegment<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let err = || bad(format!("--edge expects label:x0,y0{}:x1,y1{}, got {s:?}", if dim == 3 { ",z0" } else { "" }, if dim == 3 { ",z1" } else { "" }));
    if parts.len() != 3 {
        return Err(err());
    }
    let pt = |t: &str| -> Result<[f64; 3]> {
        let v: Vec<f64> = t.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| err())?;
        if v.len() != dim {
            return Err(err());
        }
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&v);
        Ok(p)
    };
    Ok(EdgeSegment::new(parts[0], pt(parts[1])?, pt(parts[2])?))
}

pub fn metrics_cmd(a: &MetricsArgs) -> Result<()> {
    let reference: Field = read_field(&a.reference)?;
    let rec: Field = read_field(&a.rec)?;
    let dim = reference.grid().dim();
    let segments = a.edge.iter().map(|s| parse_edge(s, dim)).collect::<Result<Vec<_>>>()?;
    let m = metrics(&reference, &rec, &segments)?;
    let mut w = output(&a.out)?;
    writeln!(w, "metric,value")?;
    writeln!(w, "rel_l2,{:e}", m.rel_l2)?;
    writeln!(w, "rel_linf,{:e}", m.rel_linf)?;
    for (label, s) in &m.edge_sharpness {
        writeln!(w, "sharpness:{label},{s:e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_pgm(a: &ExportPgmArgs) -> Result<()> {
    let f: Field = read_field(&a.input)?;
    write_pgm(&a.out, &f, a.slice)?;
    Ok(())
}
