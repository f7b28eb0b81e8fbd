use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dtm_core::geometry::dist2;
use dtm_core::io;

fn dtm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = dtm(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sample_is_deterministic_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "sample", "figure8", "--sigma", "0.45", "--n", "6000", "--seed", "1",
    ];
    ok(d, &[&args[..], &["-o", "a.csv"]].concat());
    ok(d, &[&args[..], &["-o", "b.csv"]].concat());
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    assert_eq!(io::read_point_cloud(&d.join("a.csv")).unwrap().len(), 6000);
    let side = json(&d.join("a.csv.json"));
    assert_eq!(side["seed"], 1);
    assert_eq!(side["n"], 6000);
}

#[test]
fn noiseless_circle_sample() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "sample", "circle", "--r", "1", "--sigma", "0", "--n", "100", "-o", "c.csv",
        ],
    );
    let c = io::read_point_cloud(&d.join("c.csv")).unwrap();
    assert_eq!(c.len(), 100);
    assert!(c
        .points()
        .all(|p| (dist2(p, &[0.0, 0.0]).sqrt() - 1.0).abs() < 1e-12));
}

#[test]
fn bad_spec_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dtm(dir.path(), &["sample", "torus"]).status.code(), Some(2));
    assert_eq!(
        dtm(dir.path(), &["sample", "circle:sigma=x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dtm(dir.path(), &["dist", "--k", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dtm(
        dir.path(),
        &["dist", "--input", "absent.csv", "--k", "2", "-o", "d.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.csv"));
    assert!(!dir.path().join("d.csv").exists());
}

#[test]
fn exact_and_brute_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "sample", "circle", "--sigma", "0.3", "--n", "10", "--seed", "4", "-o", "p.csv",
        ],
    );
    ok(
        d,
        &[
            "sample", "circle", "--r", "2", "--sigma", "1", "--n", "20", "--seed", "5", "-o",
            "q.csv",
        ],
    );
    for mode in ["exact", "brute"] {
        ok(
            d,
            &[
                "dist",
                "--input",
                "p.csv",
                "--k",
                "3",
                "--mode",
                mode,
                "--queries",
                "q.csv",
                "-o",
                &format!("{mode}.csv"),
            ],
        );
    }
    let e = io::read_point_cloud(&d.join("exact.csv")).unwrap();
    let b = io::read_point_cloud(&d.join("brute.csv")).unwrap();
    assert_eq!(e.len(), 20);
    for (x, y) in e.points().zip(b.points()) {
        assert!((x[2] - y[2]).abs() <= 1e-9);
    }
}

#[test]
fn witnessed_k1_is_nearest_point_distance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "sample", "figure8", "--sigma", "0.2", "--n", "300", "--seed", "2", "-o", "p.csv",
        ],
    );
    ok(
        d,
        &[
            "sample", "circle", "--r", "3", "--sigma", "0.5", "--n", "50", "--seed", "3", "-o",
            "q.csv",
        ],
    );
    ok(
        d,
        &[
            "dist",
            "--input",
            "p.csv",
            "--k",
            "1",
            "--queries",
            "q.csv",
            "--sites-out",
            "s.csv",
            "-o",
            "v.csv",
        ],
    );
    let p = io::read_point_cloud(&d.join("p.csv")).unwrap();
    let v = io::read_point_cloud(&d.join("v.csv")).unwrap();
    for row in v.points() {
        let nearest = p
            .points()
            .map(|y| dist2(&row[..2], y))
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        assert!((row[2] - nearest).abs() <= 1e-12);
    }
    assert_eq!(io::read_sites(&d.join("s.csv")).unwrap().len(), 300);
}

#[test]
fn brute_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["sample", "circle", "--n", "60", "-o", "p.csv"]);
    let out = dtm(
        d,
        &[
            "dist", "--input", "p.csv", "--k", "30", "--mode", "brute", "--grid", "4",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let out = dtm(d, &["dist", "--input", "p.csv", "--k", "61", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn check_bounds_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "check-bounds",
            "general",
            "--clouds",
            "50",
            "--queries",
            "20",
            "--seed",
            "3",
            "-o",
            "g.json",
        ],
    );
    let g = json(&d.join("g.json"));
    assert_eq!(g["pass"], true);
    assert!(g["max_ratio"].as_f64().unwrap() <= 2.0 + 2f64.sqrt() + 1e-9);
    ok(
        d,
        &[
            "check-bounds",
            "stability",
            "--pairs",
            "20",
            "--queries",
            "10",
            "--seed",
            "3",
            "-o",
            "s.json",
        ],
    );
    let s = json(&d.join("s.json"));
    assert_eq!(s["pass"], true);
    assert!(s["min_margin"].as_f64().unwrap() >= 0.0);
    ok(
        d,
        &[
            "check-bounds",
            "witnessed",
            "--n",
            "500",
            "--sigma",
            "0.05",
            "--m0",
            "0.02",
            "--atoms",
            "512",
            "--grid",
            "64",
            "-o",
            "w.json",
        ],
    );
    let w = json(&d.join("w.json"));
    assert_eq!(w["pass"], true);
    let e = &w["entries"][0];
    assert!(e["sup_error"].as_f64().unwrap() <= e["bound"].as_f64().unwrap());
}

#[test]
fn witnessed_check_needs_reference() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["sample", "circle", "--n", "100", "-o", "p.csv"]);
    let out = dtm(d, &["check-bounds", "witnessed", "--input", "p.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_expectation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "sample", "circle", "--n", "200", "--seed", "1", "-o", "p.csv",
        ],
    );
    // A single circle never shows two prominent classes.
    let out = dtm(
        d,
        &[
            "vineyard",
            "--input",
            "p.csv",
            "--k",
            "1:3",
            "--grid",
            "32",
            "--expect-prominent",
            "1",
            "--report",
            "r.json",
            "-o",
            "v.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&d.join("r.json"))["pass"], false);
}

#[test]
fn annulus_topology() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "sample", "circle", "--n", "400", "--sigma", "0", "-o", "c.csv",
        ],
    );
    ok(
        d,
        &[
            "dist",
            "--input",
            "c.csv",
            "--k",
            "1",
            "--grid",
            "128",
            "--bbox=-2,2,-2,2",
            "-o",
            "f.csv",
        ],
    );
    ok(
        d,
        &[
            "topology",
            "--field",
            "f.csv",
            "--level",
            "0.3",
            "--expect-betti",
            "1,1",
            "--diagram-out",
            "d.csv",
            "--svg",
            "f.svg",
            "--report",
            "r.json",
        ],
    );
    let r = json(&d.join("r.json"));
    assert_eq!(
        (r["beta0"].as_u64(), r["beta1"].as_u64()),
        (Some(1), Some(1))
    );
    assert_eq!(r["euler"], 0);
    let diagram = io::read_diagram(&d.join("d.csv")).unwrap();
    assert_eq!(diagram.betti(0.3, 1), 1);
    assert!(fs::read_to_string(d.join("f.svg"))
        .unwrap()
        .starts_with("<svg"));
    let out = dtm(
        d,
        &[
            "topology",
            "--field",
            "f.csv",
            "--level",
            "0.3",
            "--expect-betti",
            "1,0",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn vineyard_alias_matches_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "sample", "figure8", "--n", "800", "--sigma", "0.1", "--seed", "9", "-o", "p.csv",
        ],
    );
    ok(
        d,
        &[
            "vineyard", "--input", "p.csv", "--k", "5:25:10", "--grid", "48", "-o", "a.csv",
            "--svg", "v.svg",
        ],
    );
    ok(
        d,
        &[
            "topology", "vineyard", "--input", "p.csv", "--k", "5:25:10", "--grid", "48", "-o",
            "b.csv",
        ],
    );
    let a = fs::read_to_string(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(d.join("b.csv")).unwrap());
    assert!(a.starts_with("k,m0,class_rank,birth,death,persistence\n"));
    assert_eq!(json(&d.join("a.csv.json"))["seed"], 9);
}

#[test]
fn w2_command() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("a.csv"), "0,0.5\n1,0.5\n").unwrap();
    fs::write(d.join("b.csv"), "# denominator=2\n2,0.5\n3,0.5\n").unwrap();
    ok(
        d,
        &[
            "w2",
            "--mu",
            "a.csv",
            "--nu",
            "b.csv",
            "--plan-out",
            "plan.csv",
            "-o",
            "w.json",
        ],
    );
    let w = json(&d.join("w.json"));
    assert!((w["w2"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(fs::read_to_string(d.join("plan.csv"))
        .unwrap()
        .starts_with("source,target,mass"));
    fs::write(d.join("u.csv"), "-1\n1\n").unwrap();
    fs::write(d.join("z.csv"), "0\n").unwrap();
    ok(
        d,
        &[
            "w2",
            "--uniform",
            "--mu",
            "u.csv",
            "--nu",
            "z.csv",
            "-o",
            "u.json",
        ],
    );
    assert!((json(&d.join("u.json"))["w2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}
