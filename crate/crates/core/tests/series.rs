use tat_core::fbp::{fbp_invert, FbpConfig, FbpVariant};
use tat_core::forward::{exact_radial_forward, spherical_forward, QuadratureSpec};
use tat_core::series::{
    cubic_series, eigen_expand_variable_speed, norton2d, norton_coefficients, series_coefficients, square_series_2d, BoxBasis, EigenConfig,
    NortonConfig, SeriesConfig,
};
use tat_core::wavesim::{conforming_grid, fd_forward, FdConfig};
use tat_core::{Data, DataKind, Field, Geometry, Grid, Phantom, Primitive, ScalarField};

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Relative L2 misfit restricted to nodes with `|x_i| < r`.
fn band_error(rec: &Field, truth: &Field, r: f64) -> f64 {
    let g = rec.grid();
    let idx: Vec<usize> = (0..g.len()).filter(|&i| g.node_at(i)[..g.dim()].iter().all(|v| v.abs() < r)).collect();
    let a: Vec<f64> = idx.iter().map(|&i| rec.values()[i]).collect();
    let b: Vec<f64> = idx.iter().map(|&i| truth.values()[i]).collect();
    rel_l2(&a, &b)
}

fn circle_data(spec: &Phantom, n_det: usize, ns: usize) -> Data {
    let geom = Geometry::circle([0.0, 0.0], 1.0, n_det).unwrap();
    spherical_forward(spec, &geom, ns, 2.0 / (ns - 1) as f64, DataKind::Integral, &QuadratureSpec::default()).unwrap()
}

#[test]
fn norton_hankel_matches_kunyansky() {
    let spec = Phantom::new(vec![Primitive::bump2(0.2, 0.0, 0.3, 1.0), Primitive::bump2(-0.25, 0.2, 0.2, 0.5)]).unwrap();
    let data = circle_data(&spec, 256, 512);
    let grid = Grid::cube(2, 96, -0.7, 0.7).unwrap();
    let nh = norton2d(&data, &grid, &NortonConfig::default()).unwrap();
    let ky = fbp_invert(&data, &grid, FbpVariant::Kunyansky2d, &FbpConfig::default()).unwrap();
    let truth = spec.rasterize(&grid).unwrap();
    assert!(rel_l2(nh.values(), truth.values()) <= 0.01);
    assert!(rel_l2(nh.values(), ky.values()) <= 0.03);
    // raising m_max past the angular bandwidth changes nothing
    let m60 = norton2d(&data, &grid, &NortonConfig { m_max: Some(60), ..NortonConfig::default() }).unwrap();
    assert!(rel_l2(m60.values(), nh.values()) <= 0.005);
    // the masked J division is usable but clearly worse
    let nj = norton2d(&data, &grid, &NortonConfig { use_hankel: false, ..NortonConfig::default() }).unwrap();
    let ej = rel_l2(nj.values(), truth.values());
    assert!(ej < 0.5 && ej > rel_l2(nh.values(), truth.values()));
}

#[test]
fn norton_centred_disk_is_radial() {
    let spec = Phantom::new(vec![Primitive::disk(0.0, 0.0, 0.5, 1.0)]).unwrap();
    let data = circle_data(&spec, 64, 256);
    let modes = norton_coefficients(&data, 0.9, &NortonConfig::default()).unwrap();
    let worst = (1..=modes.m_max as i64).flat_map(|m| [m, -m]).map(|m| modes.norm(m)).fold(0.0, f64::max);
    assert!(worst <= 1e-6 * modes.norm(0));
}

fn cube_data(spec: &Phantom, m: usize, t_max: f64) -> Data {
    let geom = Geometry::cube([0.0; 3], 0.5, m).unwrap();
    let ns = (t_max * 142.0) as usize;
    exact_radial_forward(spec, &geom, ns, t_max / (ns - 1) as f64, DataKind::Integral).unwrap()
}

#[test]
fn cubic_series_recovers_bump() {
    let spec = Phantom::new(vec![Primitive::bump3([0.1, -0.05, 0.0], 0.3, 1.0)]).unwrap();
    let data = cube_data(&spec, 32, 1.8);
    let rec = cubic_series(&data, &SeriesConfig::default()).unwrap();
    let truth = spec.rasterize(rec.grid()).unwrap();
    assert!(rel_l2(rec.values(), truth.values()) <= 0.05);

    let c8 = series_coefficients(&data, &SeriesConfig::default()).unwrap();
    let c10 = series_coefficients(&data, &SeriesConfig { interp_order: 10, ..SeriesConfig::default() }).unwrap();
    assert!(rel_l2(&c8.values, &c10.values) <= 1e-3);
    let energy: f64 = c8.values.iter().map(|a| a * a).sum();
    let norm2 = truth.values().iter().map(|v| v * v).sum::<f64>() * truth.grid().cell_volume();
    assert!((energy / norm2 - 1.0).abs() <= 0.02, "parseval {}", energy / norm2);
}

#[test]
fn cubic_series_ignores_exterior_sources() {
    let inside = Primitive::bump3([0.1, -0.05, 0.0], 0.3, 1.0);
    let spec = Phantom::new(vec![inside, Primitive::ball([0.8, 0.0, 0.1], 0.2, 1.0)]).unwrap();
    let data = cube_data(&spec, 32, 2.6);
    let rec = cubic_series(&data, &SeriesConfig::default()).unwrap();
    let truth = Phantom::new(vec![inside]).unwrap().rasterize(rec.grid()).unwrap();
    let err = rel_l2(rec.values(), truth.values());
    println!("exterior-support cube error {err:.3e}");
    assert!(err <= 0.07);
}

#[test]
fn square_basis_self_test() {
    let geom = Geometry::square([0.0, 0.0], 0.5, 32).unwrap();
    let ns = 300;
    let basis = BoxBasis::from_geometry(&geom).unwrap();
    let m = [2usize, 3usize];
    let src = move |x: &[f64]| if x[0].abs() <= 0.5 && x[1].abs() <= 0.5 { basis.eval(&m, x) } else { 0.0 };
    let quad = QuadratureSpec { n_circle: 2048, ..QuadratureSpec::default() };
    let data = spherical_forward(&src, &geom, ns, 1.6 / (ns - 1) as f64, DataKind::Integral, &quad).unwrap();
    let c = series_coefficients(&data, &SeriesConfig::default()).unwrap();
    for m1 in 1..=c.m_max {
        for m2 in 1..=c.m_max {
            let want = if [m1, m2] == m { 1.0 } else { 0.0 };
            assert!((c.get(&[m1, m2]) - want).abs() <= 1e-2);
        }
    }
}

#[test]
fn square_series_with_exterior_disks() {
    let interior = vec![Primitive::disk(0.1, 0.0, 0.2, 1.0), Primitive::disk(-0.2, 0.25, 0.1, 0.7)];
    let mut all = interior.clone();
    all.extend([Primitive::disk(0.5, -0.3, 0.15, 1.0), Primitive::disk(-0.45, -0.45, 0.2, 0.8)]);
    let quad = QuadratureSpec { n_circle: 2048, ..QuadratureSpec::default() };
    let geom = Geometry::square([0.0, 0.0], 0.5, 128).unwrap();
    let ns = 769;
    let run = |prims: Vec<Primitive<f64>>| {
        let spec = Phantom::new(prims).unwrap();
        let data = spherical_forward(&spec, &geom, ns, 2.2 / (ns - 1) as f64, DataKind::Integral, &quad).unwrap();
        let rec = square_series_2d(&data, &SeriesConfig::default()).unwrap();
        band_error(&rec, &spec.rasterize(rec.grid()).unwrap(), 0.4)
    };
    let (e_in, e_all) = (run(interior), run(all));
    println!("disks: interior only {e_in:.3e}, with exterior parts {e_all:.3e}");
    assert!(e_all <= 0.10);
    assert!(e_all - e_in <= 0.015);
}

#[test]
fn eigen_expansion_constant_and_variable_speed() {
    let geom = Geometry::square([0.0, 0.0], 0.5, 24).unwrap();
    let grid = conforming_grid(&geom).unwrap();
    let spec = Phantom::new(vec![Primitive::bump2(0.1, -0.05, 0.3, 1.0)]).unwrap();
    let f = spec.rasterize(&grid).unwrap();
    let one = ScalarField::constant(grid, 1.0);
    let var = ScalarField::from_fn(grid, |x: &[f64]| 1.0 + 0.1 * (3.0 * x[0]).sin() * (2.0 * x[1] + 0.3).cos());
    let cfg = EigenConfig { k_max: 400 };

    let p = fd_forward(&f, &one, &geom, &FdConfig::new(6.0)).unwrap();
    let rec_const = eigen_expand_variable_speed(&p, &one, &cfg).unwrap();
    let truth = spec.rasterize(rec_const.grid()).unwrap();
    assert!(rel_l2(rec_const.values(), truth.values()) <= 0.05);
    let ns = 300;
    let g = spherical_forward(&spec, &geom, ns, 1.6 / (ns - 1) as f64, DataKind::Integral, &QuadratureSpec::default()).unwrap();
    let rec_series = square_series_2d(&g, &SeriesConfig::default()).unwrap();
    assert!(rec_series.grid().same_layout(rec_const.grid()));
    assert!(rel_l2(rec_const.values(), rec_series.values()) <= 0.05);

    let p = fd_forward(&f, &var, &geom, &FdConfig::new(6.0)).unwrap();
    let rec_var = eigen_expand_variable_speed(&p, &var, &cfg).unwrap();
    assert!(rel_l2(rec_var.values(), truth.values()) <= 0.10);
}
