use std::path::Path;
use std::process::Command;

use serde_json::Value;

const DISC: &str = r#"{ "curves": [ { "coeffs": [[0,0],[0,0],[1,0]], "n_samples": 128 } ] }"#;
const ELLIPSE: &str = r#"{ "curves": [ { "coeffs": [[-0.1,0],[0,0],[1.1,0]], "n_samples": 128 } ] }"#;
const ANNULUS: &str = r#"{ "curves": [ { "coeffs": [[0,0],[0,0],[1,0]], "n_samples": 256 },
  { "coeffs": [[0.4,0],[0,0],[0,0]], "n_samples": 256 } ], "hole_points": [[0,0]] }"#;
const ANNULUS_NO_HOLE: &str = r#"{ "curves": [ { "coeffs": [[0,0],[0,0],[1,0]], "n_samples": 64 },
  { "coeffs": [[0.4,0],[0,0],[0,0]], "n_samples": 64 } ] }"#;

fn qd(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qd"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn disc_kernel_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "disc.json", DISC);
    let (code, text) = qd(
        dir.path(),
        &["kernel", "--domain", "disc.json", "--point", "0,0", "--order", "1"],
    );
    assert_eq!(code, 0, "{text}");
    let csv = std::fs::read_to_string(dir.path().join("qd-out/kernel_m0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("curve_index,t,re_S,im_S,re_L,im_L"));
    for l in lines {
        let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[2] - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!(f[3].abs() < 1e-12);
    }
    assert!(dir.path().join("qd-out/kernel_m1.csv").exists());
    let svg = std::fs::read_to_string(dir.path().join("qd-out/kernel.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("<script"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "disc.json", DISC);
    write(dir.path(), "annulus.json", ANNULUS_NO_HOLE);
    write(dir.path(), "broken.json", "{ curves: ");
    let cases: [&[&str]; 7] = [
        &["build", "--domain", "annulus.json", "--mode", "mc"],
        &["build", "--domain", "broken.json"],
        &["build", "--domain", "missing.json"],
        &["kernel", "--domain", "disc.json", "--point", "2,0"],
        &["kernel", "--domain", "disc.json", "--point", "0,0", "--grid", "100"],
        &["build", "--domain", "disc.json", "--order", "1", "--eps", "1e-3"],
        &["explode"],
    ];
    for args in cases {
        let (code, text) = qd(dir.path(), args);
        assert_eq!(code, 2, "{args:?}: {text}");
    }
    assert!(!dir.path().join("qd-out").exists());
}

#[test]
fn simply_connected_mode_on_an_annulus_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "annulus.json", ANNULUS);
    let (code, text) = qd(dir.path(), &["build", "--domain", "annulus.json", "--mode", "sc"]);
    assert_eq!(code, 2, "{text}");
}

#[test]
fn infeasible_builds_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ellipse.json", ELLIPSE);
    let (code, text) = qd(
        dir.path(),
        &["build", "--domain", "ellipse.json", "--eps", "1e-17", "--grid", "64"],
    );
    assert_eq!(code, 4, "{text}");
    let (code, text) = qd(
        dir.path(),
        &["build", "--domain", "ellipse.json", "--order", "30", "--grid", "64"],
    );
    assert_eq!(code, 4, "{text}");
}

#[test]
fn ellipse_is_not_a_one_point_quadrature_domain() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ellipse.json", ELLIPSE);
    let (code, text) = qd(
        dir.path(),
        &["verify", "--domain", "ellipse.json", "--point", "0,0", "--order", "0"],
    );
    assert_eq!(code, 5, "{text}");
    assert!(text.contains("FAIL"));
    let report = read_json(&dir.path().join("qd-out/verify_area.json"));
    assert_eq!(report["passed"], Value::Bool(false));
}

#[test]
fn build_then_verify_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ellipse.json", ELLIPSE);
    let (code, text) = qd(
        dir.path(),
        &[
            "build",
            "--domain",
            "ellipse.json",
            "--point",
            "0.1,-0.05",
            "--out",
            "b",
        ],
    );
    assert_eq!(code, 0, "{text}");
    let map = read_json(&dir.path().join("b/map.json"));
    assert_eq!(map["certificate"]["passed"], Value::Bool(true));
    let (code, text) = qd(dir.path(), &["verify", "--map", "b/map.json", "--out", "v"]);
    assert_eq!(code, 0, "{text}");
    let report = read_json(&dir.path().join("v/verify_arc-length.json"));
    assert!(report["holdout_residual"].as_f64().unwrap() < 1e-8);

    // The saved image domain reloads and verifies through the fitting path.
    let node = &map["arc_length"]["nodes"][0];
    let point = format!("{},{}", node[0], node[1]);
    let order = map["order"].to_string();
    let (code, text) = qd(
        dir.path(),
        &[
            "verify",
            "--domain",
            "b/image_domain.json",
            "--point",
            &point,
            "--order",
            &order,
            "--measure",
            "arc",
            "--out",
            "w",
        ],
    );
    assert_eq!(code, 0, "{text}");
    let refit = read_json(&dir.path().join("w/verify_arc-length.json"));
    let c0 = |r: &Value| r["coefficients"][0][0][0].as_f64().unwrap();
    assert!((c0(&refit) - c0(&report)).abs() < 1e-6 * c0(&report).abs());
}

#[test]
fn reports_depend_only_on_the_inputs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ellipse.json", ELLIPSE);
    let args = |out: &'static str| {
        [
            "verify",
            "--domain",
            "ellipse.json",
            "--point",
            "0,0",
            "--order",
            "2",
            "--seed",
            "7",
            "--out",
            out,
        ]
    };
    qd(dir.path(), &args("a"));
    qd(dir.path(), &args("b"));
    for f in ["verify_area.json", "verify_area.csv", "verify_arc-length.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let (_, _) = qd(
        dir.path(),
        &[
            "verify",
            "--domain",
            "ellipse.json",
            "--point",
            "0,0",
            "--order",
            "2",
            "--seed",
            "8",
            "--out",
            "c",
        ],
    );
    let a = std::fs::read(dir.path().join("a/verify_area.csv")).unwrap();
    let c = std::fs::read(dir.path().join("c/verify_area.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn multiply_connected_build_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "annulus.json", ANNULUS);
    let (code, text) = qd(
        dir.path(),
        &[
            "build",
            "--domain",
            "annulus.json",
            "--mode",
            "mc",
            "--point",
            "0.65,0.1",
            "--out",
            "b",
        ],
    );
    assert_eq!(code, 0, "{text}");
    let (code, text) = qd(dir.path(), &["verify", "--map", "b/map.json", "--out", "v"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("NOTE: the arc-length build has no area identity"));
    assert!(text.contains("OK moment defect of conj(T)"), "{text}");
    assert!(dir.path().join("v/verify_arc-length.json").exists());
    let defects = read_json(&dir.path().join("v/defects.json"));
    assert_eq!(defects.as_array().unwrap().len(), 1);
}
