use std::path::Path;
use std::process::{Command, Output};

use jacobi_cone::beta_poly::BetaPolynomial;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi-cone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_csv_for_simons() {
    let o = run(&[
        "spectrum", "--p", "3", "--q", "3", "--count", "5", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    let header: Vec<&str> = lines[0].split(',').collect();
    let beta_col = header.iter().position(|h| *h == "beta").unwrap();
    assert_eq!(lines[1].split(',').nth(beta_col), Some("1"));
}

#[test]
fn poly_prints_h2() {
    let o = run(&["poly", "--ell", "1", "--beta", "1", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("-1/3"));
    let csv = stdout(&run(&[
        "poly", "--ell", "1", "--beta", "1", "--degree", "2", "--format", "csv",
    ]));
    assert!(csv.lines().any(|l| l == "2,0,-1/3"), "{csv}");
}

#[test]
fn gap_report() {
    let o = run(&["growth", "gap", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("infeasible for R>1, margin 1.0"));
}

#[test]
fn exit_codes_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = run(&["spectrum", "--nope"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(stderr(&unknown).contains("--nope"));

    let bad_cfg = dir.path().join("bad.cfg");
    std::fs::write(&bad_cfg, "this line has no equals sign\n").unwrap();
    let cfg = run(&["spectrum", "--config", path(&bad_cfg)]);
    assert_eq!(cfg.status.code(), Some(1));
    assert!(stderr(&cfg).contains("malformed config"));

    let unwritable = dir.path().join("missing").join("out.json");
    let w = run(&["spectrum", "--out", path(&unwritable)]);
    assert_eq!(w.status.code(), Some(1));
    assert!(stderr(&w).contains("cannot write"));

    let invalid = run(&["spectrum", "--p", "0"]);
    assert_eq!(invalid.status.code(), Some(1));

    let h2 = dir.path().join("h2.json");
    assert_eq!(run(&["poly", "--out", path(&h2)]).status.code(), Some(0));
    let diverged = run(&[
        "solve",
        "--trace",
        path(&h2),
        "--grid",
        "32",
        "--max-iterations",
        "2",
    ]);
    assert_eq!(diverged.status.code(), Some(2));
    assert!(stderr(&diverged).contains("numerical failure"));
}

#[test]
fn config_defaults_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# cone\np = 2\nq = 4\ncount = 3\nformat = csv\nalpha = 0.25\n",
    )
    .unwrap();
    let a = stdout(&run(&["spectrum", "--config", path(&cfg)]));
    assert_eq!(a.lines().count(), 4);
    let b = stdout(&run(&["spectrum", "--config", path(&cfg), "--count", "2"]));
    assert_eq!(b.lines().count(), 3);
    let c = stdout(&run(&[
        "--format",
        "json",
        "spectrum",
        "--config",
        path(&cfg),
    ]));
    assert!(c.trim_start().starts_with('{'));
    assert!(c.contains("\"p\": 2"));
}

#[test]
fn poly_solve_expand_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let h2 = dir.path().join("h2.json");
    let field = dir.path().join("field.json");
    assert_eq!(
        run(&["poly", "--beta", "1", "--degree", "2", "--out", path(&h2)])
            .status
            .code(),
        Some(0)
    );
    BetaPolynomial::from_json(&std::fs::read_to_string(&h2).unwrap()).unwrap();
    let s = run(&[
        "solve",
        "--trace",
        path(&h2),
        "--grid",
        "64",
        "--out",
        path(&field),
    ]);
    assert_eq!(s.status.code(), Some(0), "{}", stderr(&s));
    let e = run(&[
        "expand",
        "--field",
        path(&field),
        "--rho",
        "0.5",
        "--max-degree",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(e.status.code(), Some(0));
    let text = stdout(&e);
    let row: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("2,"))
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[1] - row[2] * 0.25).abs() < 1e-3, "{text}");

    let field_csv = dir.path().join("field.csv");
    run(&[
        "solve",
        "--trace",
        path(&h2),
        "--grid",
        "16",
        "--format",
        "csv",
        "--out",
        path(&field_csv),
    ]);
    let again = run(&["expand", "--field", path(&field_csv)]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn modes_feed_growth_fit() {
    let dir = tempfile::tempdir().unwrap();
    let modes = dir.path().join("modes.json");
    let radii: Vec<String> = (1..=16).map(|i| format!("{}", i as f64 / 16.0)).collect();
    let m = run(&[
        "modes",
        "--modes",
        "1:0:1,1:1:0.5",
        "--radii",
        &radii.join(","),
        "--out",
        path(&modes),
    ]);
    assert_eq!(m.status.code(), Some(0), "{}", stderr(&m));
    let f = run(&["growth", "fit", "--samples", path(&modes), "--max-q", "2"]);
    assert_eq!(f.status.code(), Some(0), "{}", stderr(&f));
    let v: serde_json::Value = serde_json::from_str(&stdout(&f)).unwrap();
    let w: Vec<f64> = v["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(w[0] > 0.0 && w[1] > 0.0);
    assert!(w[2..].iter().all(|x| x.abs() < 1e-8), "{w:?}");
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["growth", "dichotomy", "--seed", "5"],
        vec!["modes", "--modes", "1:0:1,2:1:0.5", "--format", "csv"],
        vec!["report"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["report", "--all", "--seed", "3", "--out", path(d1.path())])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["report", "--all", "--seed", "3", "--out", path(d2.path())])
            .status
            .code(),
        Some(0)
    );
    let mut names: Vec<_> = std::fs::read_dir(d1.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 10);
    for n in names {
        assert_eq!(
            std::fs::read(d1.path().join(&n)).unwrap(),
            std::fs::read(d2.path().join(&n)).unwrap()
        );
    }
    let other = run(&["growth", "dichotomy", "--seed", "6"]);
    assert_ne!(
        other.stdout,
        run(&["growth", "dichotomy", "--seed", "5"]).stdout
    );
}
