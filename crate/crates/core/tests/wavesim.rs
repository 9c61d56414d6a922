use tat_core::forward::{exact_radial_forward, pressure_from_means};
use tat_core::wavesim::{conforming_grid, fd_forward, time_reversal, FdConfig};
use tat_core::{DataKind, Data, Field, Geometry, Grid, Phantom, Primitive, ScalarField};

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn bump3() -> Phantom {
    Phantom::new(vec![Primitive::bump3([0.1, 0.0, -0.05], 0.5, 1.0)]).unwrap()
}

/// Relative L2 misfit of FD traces against the Poisson–Kirchhoff oracle.
fn trace_error(n: usize) -> f64 {
    let grid = Grid::cube(3, n, -1.0, 1.0).unwrap();
    let f = bump3().rasterize(&grid).unwrap();
    let c = ScalarField::constant(grid, 1.0);
    let geom = Geometry::sphere([0.0; 3], 0.8, 3).unwrap();
    let p = fd_forward(&f, &c, &geom, &FdConfig::new(1.6)).unwrap();
    let means = exact_radial_forward(&bump3(), &geom, p.n_samples(), p.dt(), DataKind::Mean).unwrap();
    let oracle = pressure_from_means(&means).unwrap();
    rel_l2(p.values(), oracle.values())
}

#[test]
fn forward_traces_match_kirchhoff_and_converge() {
    let coarse = trace_error(33);
    let fine = trace_error(65);
    println!("trace error h=1/16: {coarse:.4e}, h=1/32: {fine:.4e}, ratio {:.2}", coarse / fine);
    assert!(fine <= 0.03);
    assert!(coarse / fine >= 3.0);
}

#[test]
fn time_reversal_3d_constant_speed() {
    let geom = Geometry::cube([0.0; 3], 0.5, 31).unwrap();
    let grid = conforming_grid(&geom).unwrap();
    let spec = Phantom::new(vec![Primitive::bump3([0.05, -0.05, 0.0], 0.3, 1.0)]).unwrap();
    let f = spec.rasterize(&grid).unwrap();
    let c = ScalarField::constant(grid, 1.0);
    let t = 1.5 * 3f64.sqrt();
    let data: Data = fd_forward(&f, &c, &geom, &FdConfig::new(t)).unwrap();
    let rec: Field = time_reversal(&data, &c, &geom, &FdConfig::new(t)).unwrap();
    let err = rel_l2(rec.values(), f.values());
    println!("3D time reversal rel L2 {err:.4e}");
    assert!(err <= 0.05);
}
