use std::path::Path;
use std::process::{Command, Output};

fn netspectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netspectra")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_model(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write_model(tmp.path(), "p.json", r#"{"atoms": [[100, 1]]}"#);
    let out = tmp.path().join("x.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["density", &m, "--zmin", "-1", "--zmax", "1", "--points", "1", "--out", out],
        vec!["density", &m, "--zmin", "1", "--zmax", "-1", "--out", out],
        vec!["density", &m, "--zmin", "-1", "--zmax", "1", "--eta", "0", "--out", out],
        vec!["empirical", &m, "--reps", "0", "--out", out],
        vec!["empirical", &m, "--bins", "0", "--n", "50", "--out", out],
        vec!["empirical", &m, "--range", "3:1", "--n", "50", "--out", out],
        vec!["hub", &m],
        vec!["hub", &m, "--kn", "300", "--sweep", "1:2:3"],
        vec!["hub", &m, "--sweep", "1:2"],
        vec!["leading", "/nonexistent/model.json"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&netspectra(&args)), 1, "{args:?}");
    }
    let bad = write_model(tmp.path(), "bad.json", r#"{"atoms": [[100, 0.5]]}"#);
    assert_eq!(code(&netspectra(&["leading", &bad])), 1);
    assert!(!Path::new(out).exists());
}

#[test]
fn dense_cap_is_enforced_and_overridable() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write_model(tmp.path(), "p.json", r#"{"atoms": [[10, 1]]}"#);
    let out = tmp.path().join("h.csv");
    let args = ["empirical", &m, "--n", "60", "--reps", "1", "--bins", "5", "--out", out.to_str().unwrap()];
    let capped =
        Command::new(env!("CARGO_BIN_EXE_netspectra")).args(args).env("NETSPECTRA_DENSE_CAP", "50").output().unwrap();
    assert_eq!(code(&capped), 1);
    assert_eq!(code(&netspectra(&args)), 0);
}

#[test]
fn absent_results_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_model(tmp.path(), "p.json", r#"{"atoms": [[100, 1]]}"#);
    let out = netspectra(&["hub", &p, "--kn", "150"]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    assert!(text.contains("inside band") && text.contains("k_critical           200"), "{text}");

    let sparse = write_model(tmp.path(), "one.json", r#"{"atoms": [[1, 1]]}"#);
    assert_eq!(code(&netspectra(&["leading", &sparse])), 3);
}

#[test]
fn hub_pole_is_a_numeric_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_model(tmp.path(), "p.json", r#"{"atoms": [[100, 1]]}"#);
    assert_eq!(code(&netspectra(&["hub", &p, "--kn", "90"])), 2);
}

#[test]
fn leading_report_lists_both_values() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write_model(tmp.path(), "fig.json", r#"{"atoms": [[50, 0.25], [100, 0.75]]}"#);
    let out = netspectra(&["leading", &m]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("93.892") && text.contains("92.857"), "{text}");

    let p = write_model(tmp.path(), "p.json", r#"{"atoms": [[100, 1]]}"#);
    let text = stdout(&netspectra(&["leading", &p]));
    assert!(text.contains("101.000000") && text.contains("100.000000"), "{text}");
}

#[test]
fn hub_single_value_report() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_model(tmp.path(), "p.json", r#"{"atoms": [[100, 1]]}"#);
    let csv = tmp.path().join("hub.csv");
    let out = netspectra(&["hub", &p, "--kn", "400", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let field = |name: &str| row[header.iter().position(|h| *h == name).unwrap()].parse::<f64>().unwrap();
    assert!((field("vn_sq") - 1.0 / 3.0).abs() < 1e-4);
    assert!((field("neighbor_vi_sq_mean") - 1.0 / 900.0).abs() < 1e-7);
    assert!((field("z_plus") - 400.0 / 300f64.sqrt()).abs() < 1e-9);
    assert!(tmp.path().join("hub.manifest.json").exists());
}

#[test]
fn sweep_prints_csv_without_out() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_model(tmp.path(), "p.json", r#"{"atoms": [[100, 1]]}"#);
    let out = netspectra(&["hub", &p, "--sweep", "110:400:30"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k_n,z_plus,band_edge,exists"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').take(3).map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 30);
    for r in rows {
        let expected = if r[0] > 200.0 { r[0] / (r[0] - 100.0).sqrt() } else { 20.0 };
        assert!((r[1] - expected).abs() < 1e-9 * expected, "{r:?}");
    }
}

#[test]
fn outputs_are_csv_with_one_header() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write_model(tmp.path(), "fig.json", r#"{"atoms": [[50, 0.25], [100, 0.75]]}"#);
    let d = tmp.path().join("d.csv");
    assert_eq!(
        code(&netspectra(&[
            "density",
            &m,
            "--zmin",
            "-25",
            "--zmax",
            "25",
            "--points",
            "51",
            "--out",
            d.to_str().unwrap()
        ])),
        0
    );
    let e = tmp.path().join("e.csv");
    let out = netspectra(&[
        "empirical",
        &m,
        "--n",
        "120",
        "--reps",
        "2",
        "--bins",
        "10",
        "--eigenvalues",
        "--out",
        e.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("l1_distance"));
    for (file, header, rows) in
        [("d.csv", "z,rho", 51), ("e.csv", "bin_lo,bin_hi,density", 10), ("e.eigenvalues.csv", "eigenvalue", 240)]
    {
        let text = std::fs::read_to_string(tmp.path().join(file)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(header));
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), rows, "{file}");
        let width = header.split(',').count();
        for line in body {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), width);
            assert!(fields.iter().all(|f| f.parse::<f64>().is_ok()));
        }
    }
    let manifest = std::fs::read_to_string(tmp.path().join("e.manifest.json")).unwrap();
    assert!(manifest.contains("\"eigenvalues\": true") && manifest.contains("e.eigenvalues.csv"));
}

#[test]
fn fixed_seed_rerun_is_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write_model(tmp.path(), "p.json", r#"{"atoms": [[30, 1]]}"#);
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = tmp.path().join(format!("h{i}.csv"));
            let o = netspectra(&[
                "empirical",
                &m,
                "--n",
                "100",
                "--reps",
                "3",
                "--bins",
                "12",
                "--seed",
                "4",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code(&o), 0);
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn replay_rejects_tampered_manifests() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("evil.manifest.json");
    std::fs::write(
        &path,
        r#"{"version":"0.1.0","model":{"atoms":[[10,1]]},"base_seed":1,"run":{"command":"sample","n":10,"hubs":[]},"outputs":["../escape.txt"]}"#,
    )
    .unwrap();
    assert_eq!(code(&netspectra(&["replay", path.to_str().unwrap()])), 1);
    assert!(!tmp.path().parent().unwrap().join("escape.txt").exists());
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&netspectra(&["--help"])), 0);
    assert_eq!(code(&netspectra(&["--version"])), 0);
}
