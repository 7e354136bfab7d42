use serde_json::Value;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

fn fbplab(out: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_fbplab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema=fbplab."));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, rows)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn modes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/modes");
    assert_eq!(fbplab(&out, &["modes"]).0, 0);
    let (head, rows) = csv_rows(&out.join("modes.csv"));
    assert_eq!(head, ["n", "mu", "norm", "l2norm_mu"]);
    let want = [4.0, 8.183, 16.0, 24.187];
    for (r, w) in rows.iter().zip(want) {
        assert!((r[1] - w).abs() < 2e-3, "{r:?}");
        assert!((r[2] - 1.0).abs() < 1e-8);
    }
    let out2 = dir.path().join("m2");
    assert_eq!(fbplab(&out2, &["modes", "--set", "omega=2pi", "--set", "n_max=3"]).0, 0);
    let (_, rows) = csv_rows(&out2.join("modes.csv"));
    assert!((rows[2][1] - 4.0).abs() < 1e-12);
}

#[test]
fn overwrite_needs_force_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let args = ["goursat", "--set", "count=3", "--set", "n_r=64", "--set", "n_theta=128", "--seed", "5"];
    assert_eq!(fbplab(out, &args).0, 0);
    let first = json(&out.join("manifest.json"));
    let (code, err) = fbplab(out, &args);
    assert_eq!(code, 2);
    assert!(err.contains("--force"));
    let mut forced = args.to_vec();
    forced.extend(["--force", "--jobs", "3"]);
    assert_eq!(fbplab(out, &forced).0, 0);
    let second = json(&out.join("manifest.json"));
    assert_eq!(first["outputs"], second["outputs"]);
    assert_eq!(first["config"], second["config"]);
    assert_eq!(second["subcommand"], "goursat");
    // the recorded hash is the hash of the file on disk
    let h = second["outputs"][0]["sha256"].as_str().unwrap();
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(out.join("goursat.csv")).unwrap();
    assert_eq!(format!("{:x}", Sha256::digest(&bytes)), h);
    let (_, rows) = csv_rows(&out.join("goursat.csv"));
    assert_eq!(rows.len(), 9);
}

#[test]
fn config_file_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# flat profile\nprofile = angular\nn_r = 128\nn_theta = 256\n").unwrap();
    let out = dir.path().join("w");
    assert_eq!(fbplab(&out, &["weiss", "--config", cfg.to_str().unwrap()]).0, 0);
    let (_, rows) = csv_rows(&out.join("weiss.csv"));
    let t1 = fbplab::angular_modes::t1();
    for r in &rows {
        assert!((r[1] - 0.5 * t1).abs() / (0.5 * t1) < 1e-2, "{r:?}");
    }
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);

    std::fs::write(&cfg, "profile: flat\n").unwrap();
    assert_eq!(fbplab(&dir.path().join("x"), &["weiss", "--config", cfg.to_str().unwrap()]).0, 2);
    assert_eq!(fbplab(&dir.path().join("y"), &["weiss", "--set", "profile=round"]).0, 2);
    assert_eq!(fbplab(&dir.path().join("z"), &["solve", "--set", "lambda=-1"]).0, 2);
}

#[test]
fn weiss_on_flat_profile_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fbplab(dir.path(), &["weiss", "--set", "n_r=128", "--set", "n_theta=256"]).0, 0);
    let (head, rows) = csv_rows(&dir.path().join("weiss.csv"));
    assert_eq!(&head[..5], ["r", "W", "N", "R", "E_over_r2"]);
    for r in &rows {
        assert!((r[1] - 0.5 * PI).abs() / (0.5 * PI) < 1e-2, "{r:?}");
    }
}

#[test]
fn epi_on_flat_profile_has_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fbplab(dir.path(), &["epi"]).0, 0);
    let v = json(&dir.path().join("epi.json"));
    assert!(v["gap"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(v["report"]["decay_holds"], true);
}

#[test]
fn solve_then_weiss_on_the_stored_field() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("solve");
    let code = fbplab(&s, &["solve", "--set", "n_r=48", "--set", "n_theta=96", "--set", "g0=1e-3"]);
    assert_eq!(code.0, 0, "{}", code.1);
    let v = json(&s.join("solve.json"));
    assert_eq!(v["support_nodes_inside"], 0);
    assert_eq!(v["max_abs_inside"].as_f64().unwrap(), 0.0);
    assert_eq!(v["summary"]["label"], "candidate minimizer");
    let m = json(&s.join("manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 3);

    // a field with a sizeable support, read back from disk
    let p = dir.path().join("profile");
    let code = fbplab(&p, &["solve", "--set", "boundary=profile", "--set", "n_r=32", "--set", "n_theta=64"]);
    assert_eq!(code.0, 0, "{}", code.1);
    let w = dir.path().join("weiss");
    let field = p.join("field.csv");
    let code = fbplab(
        &w,
        &["weiss", "--set", &format!("field={}", field.display()), "--set", "radii=0.3,0.6,0.9"],
    );
    assert_eq!(code.0, 0, "{}", code.1);
    let (_, rows) = csv_rows(&w.join("weiss.csv"));
    let h = 1.0 / 32.0;
    for r in &rows {
        // W = E/r² + rN' + R within the grid slack
        assert!(r[6] <= fbplab::fbp_solver::SLACK_PER_H * h * (1.0 + r[1].abs()), "{r:?}");
        assert!(r[1] > 0.0);
    }
    assert_eq!(json(&w.join("manifest.json"))["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn buckling_scan_prefers_the_disk() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fbplab(dir.path(), &["buckling", "--set", "meshes=64", "--jobs", "4"]).0, 0);
    let (head, rows) = csv_rows(&dir.path().join("scan_mesh64.csv"));
    assert_eq!(head, ["family_param", "area", "lambda1", "area_lambda1", "mesh", "residual"]);
    let best = rows.iter().min_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert_eq!(best[0], 1.0);
    let v = json(&dir.path().join("buckling.json"));
    assert_eq!(v["tables"][0]["disk_minimal"], true);

    let s = dir.path().join("star");
    assert_eq!(fbplab(&s, &["buckling", "--set", "family=star", "--set", "meshes=64"]).0, 0);
    let v = json(&s.join("buckling.json"));
    assert!(v["tables"][0]["scale_spread"].as_f64().unwrap() < 1e-8);
}
