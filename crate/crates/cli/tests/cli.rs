use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn tat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tat")).current_dir(dir).args(args).output().expect("spawn tat")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = tat(dir, args);
    assert_eq!(code(&o), 0, "tat {args:?} failed: {}", stderr(&o));
    o
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("p.txt"), "# two bumps\nbump 0.2 0 0.3 1\nbump -0.25 0.1 0.2 0.5\n").unwrap();
        Work { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn data(&self) -> &Self {
        ok(self.path(), &["forward", "--spec", "p.txt", "--detectors", "128", "--samples", "256", "--quad-circle", "256", "--out", "d.tat"]);
        self
    }
}

#[test]
fn phantom_forward_recon_pipeline() {
    let w = Work::new();
    w.data();
    ok(w.path(), &["phantom", "--spec", "p.txt", "--grid", "48", "--extent", "1.4", "--out", "ref.field"]);
    ok(w.path(), &["recon", "--in", "d.tat", "--grid", "48", "--extent", "1.4", "--out", "rec.field"]);
    let o = ok(w.path(), &["metrics", "--reference", "ref.field", "--rec", "rec.field", "--edge", "a:0.1,0:0.3,0"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let l2: f64 = text.lines().find_map(|l| l.strip_prefix("rel_l2,")).unwrap().parse().unwrap();
    assert!(l2 < 0.1, "relative error {l2}");
    assert!(text.lines().any(|l| l.starts_with("sharpness:a,")));
}

#[test]
fn threads_one_is_deterministic() {
    let w = Work::new();
    w.data();
    for out in ["a.field", "b.field"] {
        ok(w.path(), &["--threads", "1", "recon", "--method", "finch2d_filtered", "--in", "d.tat", "--grid", "32", "--out", out]);
    }
    assert_eq!(fs::read(w.file("a.field")).unwrap(), fs::read(w.file("b.field")).unwrap());
}

#[test]
fn noisy_forward_is_reproducible_per_seed() {
    let w = Work::new();
    let run = |seed: &str, out: &str| {
        ok(w.path(), &["forward", "--spec", "p.txt", "--detectors", "32", "--samples", "64", "--noise", "0.05", "--seed", seed, "--out", out]);
        fs::read(w.file(out)).unwrap()
    };
    let (a, b, c) = (run("7", "a.tat"), run("7", "b.tat"), run("8", "c.tat"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn error_exit_codes() {
    let w = Work::new();
    w.data();
    // 3D method on 2D data
    let o = tat(w.path(), &["recon", "--method", "fpr3d_d2t", "--in", "d.tat", "--out", "r.field"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error:"));
    // pressure traces are three-dimensional only
    let o = tat(w.path(), &["forward", "--spec", "p.txt", "--kind", "pressure", "--out", "x.tat"]);
    assert_eq!(code(&o), 3);
    // invalid values
    let o = tat(w.path(), &["recon", "--in", "d.tat", "--grid", "0", "--out", "r.field"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"));
    let o = tat(w.path(), &["recon", "--method", "no_such_method", "--in", "d.tat", "--out", "r.field"]);
    assert_eq!(code(&o), 2);
    // missing file names the path
    let o = tat(w.path(), &["recon", "--in", "missing.tat", "--out", "r.field"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:") && stderr(&o).contains("missing.tat"));
    // parse errors
    assert_eq!(code(&tat(w.path(), &["frobnicate"])), 2);
    assert_eq!(code(&tat(w.path(), &["forward", "--spec", "p.txt", "--detectors", "many", "--out", "x.tat"])), 2);
    assert!(!w.file("r.field").exists());
}

#[test]
fn arc_data_needs_zero_fill() {
    let w = Work::new();
    let arc = ["--geometry", "arc", "--detectors", "65", "--arc-start", "1.5707963267948966"];
    let mut args = vec!["forward", "--spec", "p.txt", "--samples", "128", "--quad-circle", "128", "--out", "arc.tat"];
    args.extend(arc);
    ok(w.path(), &args);
    let o = tat(w.path(), &["recon", "--in", "arc.tat", "--grid", "24", "--out", "r.field"]);
    assert_eq!(code(&o), 3);
    ok(w.path(), &["recon", "--in", "arc.tat", "--grid", "24", "--zero-fill", "--out", "r.field"]);
}

#[test]
fn config_file_fills_unset_flags() {
    let w = Work::new();
    w.data();
    fs::write(w.file("cfg.txt"), "# defaults\ngrid = 20\nmethod=norton2d\nno_hankel = false\n").unwrap();
    ok(w.path(), &["--config", "cfg.txt", "recon", "--in", "d.tat", "--out", "a.field"]);
    ok(w.path(), &["--config", "cfg.txt", "recon", "--in", "d.tat", "--grid", "12", "--out", "b.field"]);
    ok(w.path(), &["export-pgm", "--in", "a.field", "--out", "a.pgm"]);
    ok(w.path(), &["export-pgm", "--in", "b.field", "--out", "b.pgm"]);
    let header = |p: &str| {
        let bytes = fs::read(w.file(p)).unwrap();
        String::from_utf8_lossy(&bytes[..12]).split_whitespace().take(3).collect::<Vec<_>>().join(" ")
    };
    assert_eq!(header("a.pgm"), "P2 20 20");
    assert_eq!(header("b.pgm"), "P2 12 12");
    assert!(w.file("a.scale.csv").exists());
}

#[test]
fn range_check_reports_csv() {
    let w = Work::new();
    w.data();
    let o = ok(w.path(), &["range-check", "--in", "d.tat", "--k-max", "2", "--m-max", "8", "--q-max", "4", "--out", "rc.csv"]);
    assert!(stderr(&o).contains("range check: pass"), "{}", stderr(&o));
    let csv = fs::read_to_string(w.file("rc.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("condition,index,residual,tolerance,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|l| l.starts_with("moment,")).count(), 3);
    assert_eq!(rows.iter().filter(|l| l.starts_with("orthogonality,")).count(), 9 * 4);

    ok(w.path(), &["forward", "--spec", "p.txt", "--detectors", "128", "--samples", "256", "--noise", "0.2", "--out", "n.tat"]);
    let o = ok(w.path(), &["range-check", "--in", "n.tat", "--skip-orthogonality"]);
    assert!(stderr(&o).contains("range check: fail"));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("condition,"));
}

#[test]
fn visibility_map_csv() {
    let w = Work::new();
    fs::write(w.file("disk.txt"), "disk 0.5 0 0.3 1\n").unwrap();
    let o = ok(w.path(), &["visibility", "--spec", "disk.txt", "--geometry", "arc", "--detectors", "33", "--arc-start", "1.5707963267948966"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert_eq!(lines.next(), Some("x,y,xi_x,xi_y,visible,primitive"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 512);
    let visible = rows.iter().filter(|r| r.split(',').nth(4) == Some("1") || r.split(',').nth(4) == Some("true")).count();
    assert!(visible > 0 && visible < 512, "{visible}");
}

#[test]
fn wave_forward_and_time_reversal() {
    let w = Work::new();
    fs::write(w.file("b.txt"), "bump 0.05 0 0.25 1\n").unwrap();
    let sq = ["--geometry", "square", "--radius", "0.5", "--detectors", "31"];
    let mut fwd = vec!["wave-forward", "--spec", "b.txt", "--t-final", "2.5", "--out", "p.tat"];
    fwd.extend(sq);
    ok(w.path(), &fwd);
    ok(w.path(), &["recon", "--method", "time_reversal", "--in", "p.tat", "--out", "tr.field"]);
    ok(w.path(), &["export-pgm", "--in", "tr.field", "--out", "tr.pgm"]);
    assert!(fs::read(w.file("tr.pgm")).unwrap().starts_with(b"P2"));
}

#[test]
fn every_subcommand_has_help() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(dir.path(), &["--help"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("recon"));
    for sub in ["phantom", "forward", "wave-forward", "recon", "range-check", "visibility", "metrics", "export-pgm"] {
        let o = ok(dir.path(), &[sub, "--help"]);
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("Usage"), "{sub}");
    }
}
