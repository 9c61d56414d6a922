use tat_core::fbp::{fbp_invert, FbpConfig, FbpVariant};
use tat_core::forward::{exact_radial_forward, spherical_forward, QuadratureSpec};
use tat_core::{DataKind, DetectorGeometry, Field, Geometry, Grid, Phantom, Primitive, TatData};

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn data_2d(ns: usize) -> (Phantom, tat_core::Data) {
    let spec = Phantom::new(vec![Primitive::bump2(0.2, 0.0, 0.3, 1.0)]).unwrap();
    let geom = Geometry::circle([0.0, 0.0], 1.0, 256).unwrap();
    let dt = 2.0 / (ns - 1) as f64;
    let data = spherical_forward(&spec, &geom, ns, dt, DataKind::Integral, &QuadratureSpec::default()).unwrap();
    (spec, data)
}

#[test]
fn two_dimensional_variants_recover_bump() {
    let (spec, data) = data_2d(512);
    let grid = Grid::cube(2, 128, -0.7, 0.7).unwrap();
    let truth = spec.rasterize(&grid).unwrap();
    let mut recs: Vec<Field> = Vec::new();
    for v in [FbpVariant::Kunyansky2d, FbpVariant::Finch2dLaplacian, FbpVariant::Finch2dFiltered, FbpVariant::KunyanskyGeneral] {
        let rec = fbp_invert(&data, &grid, v, &FbpConfig::default()).unwrap();
        let err = rel_l2(rec.values(), truth.values());
        println!("{v}: rel L2 {err:.3e}");
        assert!(err <= 0.02, "{v}: {err}");
        recs.push(rec);
    }
    // the filtered Finch formula and the principal-value formula agree
    assert!(rel_l2(recs[2].values(), recs[0].values()) <= 0.03);
}

#[test]
fn mean_data_are_accepted_directly() {
    let (spec, data) = data_2d(256);
    let means = tat_core::forward::convert_kind(&data, DataKind::Mean).unwrap();
    let grid = Grid::cube(2, 48, -0.6, 0.6).unwrap();
    let a = fbp_invert(&data, &grid, FbpVariant::Kunyansky2d, &FbpConfig::default()).unwrap();
    let b = fbp_invert(&means, &grid, FbpVariant::Kunyansky2d, &FbpConfig::default()).unwrap();
    assert!(rel_l2(b.values(), a.values()) < 1e-12);
    assert!(rel_l2(a.values(), spec.rasterize(&grid).unwrap().values()) < 0.03);
}

#[test]
fn regularised_log_kernel_converges() {
    let grid = Grid::cube(2, 64, -0.6, 0.6).unwrap();
    let mut errs = Vec::new();
    for ns in [256, 1024] {
        let (spec, data) = data_2d(ns);
        let dt = data.dt();
        let cfg = FbpConfig { log_eps: Some(dt * dt), ..FbpConfig::default() };
        let rec = fbp_invert(&data, &grid, FbpVariant::Finch2dFiltered, &cfg).unwrap();
        errs.push(rel_l2(rec.values(), spec.rasterize(&grid).unwrap().values()));
    }
    println!("regularised log kernel: {:.3e} -> {:.3e}", errs[0], errs[1]);
    assert!(errs[1] < 0.6 * errs[0]);
}

#[test]
fn three_dimensional_variants_agree() {
    let spec = Phantom::new(vec![Primitive::bump3([0.2, 0.0, -0.1], 0.35, 1.0)]).unwrap();
    let geom = Geometry::sphere([0.0; 3], 1.0, 32).unwrap();
    let ns = 257;
    let data = exact_radial_forward(&spec, &geom, ns, 2.0 / (ns - 1) as f64, DataKind::Integral).unwrap();
    let grid = Grid::cube(3, 33, -0.5, 0.5).unwrap();
    let truth = spec.rasterize(&grid).unwrap();
    let variants = [FbpVariant::Fpr3dLaplacian, FbpVariant::Fpr3dD2t, FbpVariant::Fpr3dDdtChain, FbpVariant::Kunyansky3d, FbpVariant::KunyanskyGeneral];
    let recs: Vec<Field> = variants.iter().map(|&v| fbp_invert(&data, &grid, v, &FbpConfig::default()).unwrap()).collect();
    for (v, rec) in variants.iter().zip(&recs) {
        let err = rel_l2(rec.values(), truth.values());
        println!("{v}: rel L2 {err:.3e}");
        assert!(err <= 0.02, "{v}: {err}");
    }
    for i in 0..4 {
        for j in i + 1..4 {
            assert!(rel_l2(recs[i].values(), recs[j].values()) <= 0.02);
        }
    }
}

#[test]
fn single_precision_reconstruction() {
    let spec = tat_core::PhantomSpec::<f32>::new(vec![Primitive::bump2(0.1, -0.1, 0.35, 1.0)]).unwrap();
    let geom = DetectorGeometry::<f32>::circle([0.0, 0.0], 1.0, 128).unwrap();
    let data: TatData<f32> = spherical_forward(&spec, &geom, 256, 2.0 / 255.0, DataKind::Integral, &QuadratureSpec::default()).unwrap();
    let grid = Grid::<f32>::cube(2, 48, -0.6, 0.6).unwrap();
    let rec = fbp_invert(&data, &grid, FbpVariant::Kunyansky2d, &FbpConfig::default()).unwrap();
    let truth = spec.rasterize(&grid).unwrap();
    let num: f32 = rec.values().iter().zip(truth.values()).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f32 = truth.values().iter().map(|b| b * b).sum();
    assert!((num / den).sqrt() < 0.03);
}

#[test]
fn pressure_and_short_data_are_refused() {
    let (_, data) = data_2d(64);
    let grid = Grid::cube(2, 16, -0.5, 0.5).unwrap();
    let p = data.with_values(DataKind::Pressure, data.values().to_vec()).unwrap();
    assert!(fbp_invert(&p, &grid, FbpVariant::Kunyansky2d, &FbpConfig::default()).is_err());
    let geom = Geometry::circle([0.0, 0.0], 1.0, 16).unwrap();
    let short = tat_core::Data::zeros(geom, DataKind::Integral, 64, 1.0 / 63.0).unwrap();
    assert!(fbp_invert(&short, &grid, FbpVariant::Kunyansky2d, &FbpConfig::default()).is_err());
}
