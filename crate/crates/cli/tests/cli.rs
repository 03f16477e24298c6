use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn phasecorr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasecorr"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn phasecorr")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const GAUSSIAN: &str = "kind = \"gaussian\"\nalpha = 1.0\nt0_over_m = 1.0\n";
const COHERENT: &str = "kind = \"coherent\"\nn = 2\namplitude = 1.3\ntheta = 0.4\n";

#[test]
fn report_gaussian() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.toml", GAUSSIAN);
    let out = phasecorr(
        dir.path(),
        &[
            "report",
            "--state",
            "g.toml",
            "--b-schedule",
            "0.5,1,2",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["schema_version"], 1);
    assert!(r["units"].as_str().unwrap().contains("hbar = 1"));
    assert!((f(&r["quantum"]["global"]) - 1.0).abs() < 1e-6);
    let ak = r["arthurs_kelly"].as_array().unwrap();
    assert_eq!(ak.len(), 3);
    for row in ak {
        assert!((f(&row["global_moment"]) - 1.0).abs() < 1e-5);
    }
    assert!((f(&r["causal"]["epsilon_plus"]["global"]) - 2f64.sqrt()).abs() < 1e-6);
    assert!((f(&r["causal"]["epsilon_minus"]["global"]) + 2f64.sqrt()).abs() < 1e-6);
    let lambda = f(&r["causal"]["combo"]["lambda_plus"]);
    assert!((lambda - 0.5 * (1.0 + 0.5f64.sqrt())).abs() < 1e-6);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn report_coherent_fock_like_global() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.toml", COHERENT);
    let out = phasecorr(dir.path(), &["report", "--state", "c.toml"]);
    let r = stdout_json(&out);
    assert!((f(&r["causal"]["epsilon_plus"]["global"]) - 5.0).abs() < 1e-6);
    assert!((f(&r["causal"]["epsilon_minus"]["global"]) + 5.0).abs() < 1e-6);
    assert!((f(&r["causal"]["combo"]["lambda_plus"]) - 0.5).abs() < 1e-6);
}

#[test]
fn report_is_reproducible() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.toml", COHERENT);
    let a = phasecorr(dir.path(), &["report", "--state", "c.toml", "--format", "csv"]);
    let b = phasecorr(dir.path(), &["report", "--state", "c.toml", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn report_reads_full_config() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "run.json",
        r#"{"state": {"kind": "gaussian", "alpha": 2.0}, "b": 0.7, "grid": {"n": 512, "span": 14.0}}"#,
    );
    let r = stdout_json(&phasecorr(dir.path(), &["report", "--config", "run.json"]));
    assert_eq!(r["grid"]["n_points"], 512);
    assert!((f(&r["grid"]["q_max"]) - 14.0).abs() < 1e-9);
    assert_eq!(r["arthurs_kelly"][0]["b"], 0.7);
    assert!(f(&r["quantum"]["global"]).abs() < 1e-9);
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.toml", "kind = \"gaussian\"\nalpha = \n");
    let out = phasecorr(dir.path(), &["report", "--state", "bad.toml", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("r.json").exists());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_keys_exit_2() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.toml", "kind = \"gaussian\"\nalpha = 1.0\ngamma = 2.0\n");
    let out = phasecorr(dir.path(), &["report", "--state", "g.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.toml", "kind = \"gaussian\"\nalpha = -1.0\n");
    assert_eq!(
        phasecorr(dir.path(), &["report", "--state", "g.toml"]).status.code(),
        Some(2)
    );
    write(dir.path(), "g2.toml", GAUSSIAN);
    let out = phasecorr(
        dir.path(),
        &["report", "--state", "g2.toml", "--b", "1", "--b-schedule", "1,2"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = phasecorr(dir.path(), &["report", "--state", "g2.toml", "--b", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        phasecorr(dir.path(), &["report", "--state", "missing.toml"])
            .status
            .code(),
        Some(2)
    );
    let out = phasecorr(dir.path(), &["report", "--state", "g2.toml", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn figure_csv() {
    let dir = TempDir::new().unwrap();
    let out = phasecorr(dir.path(), &["figure", "--out", "fig.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("fig.csv")).unwrap();
    let (header, rows) = parse_csv(&text);
    assert_eq!(
        header,
        ["b_over_dq", "dqdp", "ratio_numeric", "ratio_closed_form", "abs_error"]
    );
    assert_eq!(rows.len(), 20);
    for r in &rows {
        assert!(r[4] < 1e-3);
        if r[1] == 0.5 {
            assert!(r[2].abs() < 1e-6);
        }
    }
    let out = phasecorr(
        dir.path(),
        &["figure", "--b-schedule", "1", "--dqdp-schedule", "0.7071067811865476"],
    );
    let (_, rows) = parse_csv(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert!((rows[0][2] - 0.5f64.sqrt() / 2.0).abs() < 1e-5);
}

#[test]
fn figure_rejects_subunit_product() {
    let dir = TempDir::new().unwrap();
    let out = phasecorr(dir.path(), &["figure", "--dqdp-schedule", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_numbers_round_trip() {
    let dir = TempDir::new().unwrap();
    let json_out = stdout_json(&phasecorr(dir.path(), &["figure", "--format", "json"]));
    let csv_out = phasecorr(dir.path(), &["figure"]);
    let (_, rows) = parse_csv(&String::from_utf8(csv_out.stdout).unwrap());
    let points = json_out["rows"].as_array().unwrap();
    assert_eq!(points.len(), rows.len());
    for (p, r) in points.iter().zip(&rows) {
        assert_eq!(f(&p["ratio_numeric"]).to_bits(), r[2].to_bits());
        assert_eq!(f(&p["ratio_closed_form"]).to_bits(), r[3].to_bits());
    }
}

#[test]
fn sample_is_seeded() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.toml", GAUSSIAN);
    let run = |tag: &str| {
        let out = phasecorr(
            dir.path(),
            &[
                "sample",
                "--state",
                "g.toml",
                "--samples",
                "100000",
                "--seed",
                "7",
                "--out",
                &format!("{tag}.csv"),
                "--summary",
                &format!("{tag}.json"),
            ],
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (
            fs::read(dir.path().join(format!("{tag}.csv"))).unwrap(),
            fs::read(dir.path().join(format!("{tag}.json"))).unwrap(),
        )
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let text = String::from_utf8(a.0).unwrap();
    assert!(text.starts_with("x1,x2\n"));
    assert_eq!(text.lines().count(), 100_001);

    let s = json(&dir.path().join("a.json"));
    let se = f(&s["global"]["standard_error"]);
    assert!(se > 0.0 && se < 0.05);
    assert!((f(&s["global"]["value"]) - f(&s["grid_global"])).abs() < 5.0 * se);

    let other = phasecorr(
        dir.path(),
        &[
            "sample",
            "--state",
            "g.toml",
            "--samples",
            "1000",
            "--seed",
            "8",
            "--out",
            "c.csv",
        ],
    );
    assert!(other.status.success());
    assert_ne!(
        fs::read(dir.path().join("c.csv")).unwrap()[..200],
        text.as_bytes()[..200]
    );
}

#[test]
fn sample_rejects_tiny_runs() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.toml", GAUSSIAN);
    let out = phasecorr(
        dir.path(),
        &["sample", "--state", "g.toml", "--samples", "50", "--out", "s.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("s.csv").exists());
}

#[test]
fn composite_epr() {
    let dir = TempDir::new().unwrap();
    let r = stdout_json(&phasecorr(
        dir.path(),
        &[
            "composite",
            "--kind",
            "epr",
            "--alpha1",
            "1",
            "--alpha2",
            "1",
            "--q0",
            "1",
        ],
    ));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["listed_pairs"].as_array().unwrap().len(), 4);
    assert!(f(&r["max_residual"]) < 1e-5);
    assert_eq!(r["factors"][0]["coordinates"]["position"], "q1-q2");
}

#[test]
fn composite_entangled_coherent() {
    let dir = TempDir::new().unwrap();
    let r = stdout_json(&phasecorr(
        dir.path(),
        &[
            "composite",
            "--kind",
            "entangled-coherent",
            "--m",
            "2",
            "--n",
            "1",
            "--alpha",
            "0.5,-0.2",
            "--pair",
            "(q1+q2)/sqrt2,(q1-q2)/sqrt2",
        ],
    ));
    for factor in r["factors"].as_array().unwrap() {
        assert!((f(&factor["lambda_plus"]) - 0.5).abs() < 1e-9);
    }
    assert_eq!(r["requested_pairs"].as_array().unwrap().len(), 1);
    assert!(f(&r["max_residual"]) < 1e-5);
}

#[test]
fn composite_from_config() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.toml",
        "[composite]\nkind = \"epr\"\nalpha1 = 1.5\nalpha2 = 0.8\npairs = [[\"q1-q2\", \"p1+p2\"]]\n",
    );
    let out = phasecorr(dir.path(), &["composite", "--config", "c.toml", "--out", "out.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("out.json"));
    assert_eq!(r["composite"]["alpha1"], 1.5);
    assert!(f(&r["max_residual"]) < 1e-5);
}

#[test]
fn composite_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = phasecorr(dir.path(), &["composite", "--kind", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = phasecorr(dir.path(), &["composite", "--kind", "epr", "--pair", "q1,p1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = phasecorr(dir.path(), &["composite", "--kind", "epr", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn no_subcommand_is_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(phasecorr(dir.path(), &[]).status.code(), Some(2));
}
