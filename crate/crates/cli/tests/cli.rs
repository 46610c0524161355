mod common;

use std::process::Command;

use common::{run, stdout, Csv};

#[test]
fn coherent_entropy_reaches_equilibrium() {
    let csv = Csv::parse(&stdout(&[
        "entropy",
        "--gaussian",
        "r=0",
        "--nbeta",
        "1",
        "--t-max",
        "10",
        "--points",
        "11",
    ]));
    assert_eq!(csv.headers, ["gt", "S", "R"]);
    let s = csv.column("S");
    assert!(s.windows(2).all(|w| w[1] >= w[0]));
    assert!((s[10] - 3f64.ln()).abs() < 1e-6);
}

#[test]
fn squeezed_entropy_peak_is_the_closed_form_maximum() {
    let csv = Csv::parse(&stdout(&[
        "entropy",
        "--gaussian",
        "r=2",
        "--nbeta",
        "1",
        "--t-max",
        "2",
        "--points",
        "20001",
    ]));
    let peak = csv.column("S").into_iter().fold(0.0, f64::max);
    let b = qho_relax::ThermalBath::new(1.0).unwrap();
    let smax = qho_relax::gaussian::entropy_max(&b, 2.0).unwrap();
    assert!((peak - smax).abs() < 1e-8, "{peak} vs {smax}");
}

#[test]
fn oracle_column_tracks_closed_form() {
    let csv = Csv::parse(&stdout(&[
        "entropy",
        "--fock",
        "n=2",
        "--nbeta",
        "0.5",
        "--t-max",
        "2",
        "--points",
        "5",
        "--oracle",
        "--truncation",
        "30",
    ]));
    for (s, o) in csv.column("S").iter().zip(csv.column("S_oracle")) {
        assert!((s - o).abs() < 1e-6);
    }
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let args = [
        "variance",
        "--classical",
        "--alpha",
        "2i",
        "--lambda",
        "5",
        "--points",
        "101",
    ];
    let first = stdout(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(stdout(&with_out).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
    assert_eq!(stdout(&args), first);
    let v = Csv::parse(&first).column("V");
    assert!(common::extrema(&v, 1e-13) > 0);
}

#[test]
fn numbers_use_printf_scientific_format() {
    let text = stdout(&[
        "photon",
        "--gaussian",
        "r=0,alpha1=1",
        "--points",
        "2",
        "--n",
        "0,3",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "gt,n,P,residual");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0.000000000000e+00");
    assert_eq!(first[1], "0");
    assert_eq!(first[2], "3.678794411714e-01");
}

#[test]
fn phase_json_is_versioned() {
    let text = stdout(&["phase", "--gaussian", "r=1", "--nbeta", "0.5,2"]);
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["schema_version"], 1);
    let rows = json["entries"][0]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["phase"], "SingleHump");
    assert_eq!(rows[1]["phase"], "MonotoneFromBelow");
    assert!(
        (json["entries"][0]["critical"]["damping_ratio"]
            .as_f64()
            .unwrap()
            - 1.0f64.sinh() * 2.0 * 1.0f64.cosh())
        .abs()
            < 1e-12
    );
}

#[test]
fn truncation_comes_from_the_environment() {
    let run_with = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qho-relax"));
        cmd.args(["verify", "--set", "classical", "--points", "3"])
            .args(extra);
        match env {
            Some(v) => cmd.env("QHO_RELAX_TRUNCATION", v),
            None => cmd.env_remove("QHO_RELAX_TRUNCATION"),
        };
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap()["truncation"].clone()
    };
    assert_eq!(run_with(None, &[]), 60);
    assert_eq!(run_with(Some("45"), &[]), 45);
    assert_eq!(run_with(Some("45"), &["--truncation", "50"]), 50);
}

#[test]
fn too_small_truncation_is_an_error() {
    let out = run(&[
        "verify",
        "--set",
        "fock",
        "--truncation",
        "8",
        "--nbeta",
        "3",
        "--points",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn invalid_input_is_explained() {
    for args in [
        &["entropy", "--gaussian", "alpha1=1"][..],
        &["entropy", "--nbeta", "-1"],
        &["classical-entropy", "--alpha", "bogus"],
        &["photon", "--fock", "n=1"],
        &["entropy", "--points", "1"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert!(!run(&[]).status.success());
}

#[test]
fn config_and_subcommand_are_exclusive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "command = \"phase\"\n[[states]]\nkind = \"fock\"\nn = 2\n",
    )
    .unwrap();
    let text = stdout(&["--config", path.to_str().unwrap()]);
    assert!(text.contains("DoubleExtremum"));
    assert!(!run(&["--config", path.to_str().unwrap(), "phase"])
        .status
        .success());
}
