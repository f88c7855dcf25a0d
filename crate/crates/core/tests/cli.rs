use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sofic::systems;

fn sofic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sofic"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn validate_rejects_duplicate_label() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "dup.json",
        r#"{"bases": [2, 2], "vertices": 3, "edges": [
            {"from": 2, "to": 0, "label": [1, 1]},
            {"from": 2, "to": 1, "label": [1, 1]}]}"#,
    );
    let out = sofic(&["validate", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("vertex 2"), "{msg}");
    assert!(out.stdout.is_empty());
}

#[test]
fn validate_reports_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "fig4.json", systems::FIG4);
    let r = report(&sofic(&["validate", "--input", p.to_str().unwrap()]));
    assert_eq!(r["schema"], "sofic-report/1");
    assert_eq!(r["input"]["bases"], serde_json::json!([2, 5]));
    assert_eq!(r["validation"]["primitive"], true);
    assert!(r.get("hausdorff").is_none());
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(
        sofic(&["hausdorff", "--input", "/nonexistent/x.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(sofic(&["hausdorff"]).status.code(), Some(1));
    assert_eq!(sofic(&["explode"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "bad.json",
        r#"{"bases": [3, 2], "vertices": 1, "edges": []}"#,
    );
    let out = sofic(&["validate", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nondecreasing"));
}

#[test]
fn budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "fig2.json", systems::FIG2);
    let out = sofic(&[
        "hausdorff",
        "--input",
        p.to_str().unwrap(),
        "--node-budget",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn beta_on_direction_example() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "ex2_11.json", systems::EX2_11);
    let r = report(&sofic(&[
        "beta",
        "--input",
        p.to_str().unwrap(),
        "--nmax",
        "8",
    ]));
    let b = &r["beta"];
    assert_eq!(b["case"], "direction-classes");
    let beta = b["beta"].as_f64().unwrap();
    assert!((beta.log2() - b["dimension"].as_f64().unwrap()).abs() < 1e-12);
    assert!((1.195..=1.205).contains(&beta.log2()));
    assert!(b["solution"]["trace"].as_array().unwrap().len() >= 2);
}

#[test]
fn beta_on_ray_example_flags_log_base() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "ex2_12.json", systems::EX2_12);
    let r = report(&sofic(&[
        "beta",
        "--input",
        p.to_str().unwrap(),
        "--nmax",
        "6",
    ]));
    assert_eq!(r["beta"]["case"], "ray-classes");
    assert_eq!(r["beta"]["log_base"], 3);
}

#[test]
fn all_on_fig2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "fig2.json", systems::FIG2);
    let out = dir.path().join("report.json");
    let status = sofic(&[
        "all",
        "--input",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let r: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let target = 1.0 + 2f64.ln() / 5f64.ln();
    assert!((r["minkowski"]["dimension"].as_f64().unwrap() - target).abs() < 1e-9);
    assert!((r["hausdorff"]["estimate"].as_f64().unwrap() - target).abs() < 0.02);
    assert_eq!(r["uniform_complexity"]["certificate"]["verdict"], "holds");
    assert_eq!(r["beta"]["value"], Value::Null);
    assert!(r["beta"]["reason"].as_str().unwrap().contains("r = 3"));
    assert!(r.get("timings").is_none());
}

#[test]
fn report_embeds_input_hash() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", systems::FIG2);
    let b = write(dir.path(), "b.json", &format!("{}\n", systems::FIG2));
    let ra = report(&sofic(&["minkowski", "--input", a.to_str().unwrap()]));
    let rb = report(&sofic(&["minkowski", "--input", b.to_str().unwrap()]));
    assert_ne!(ra["input"]["sha256"], rb["input"]["sha256"]);
    assert_eq!(ra["minkowski"], rb["minkowski"]);
}

#[test]
fn reports_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "fig4.json", systems::FIG4);
    let runs: Vec<Vec<u8>> = ["1", "2", "8", "8"]
        .iter()
        .map(|w| {
            let out = sofic(&[
                "all",
                "--input",
                p.to_str().unwrap(),
                "--mode",
                "surrogate",
                "--workers",
                w,
            ]);
            assert!(out.status.success());
            out.stdout
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn render_pgm_and_voxels() {
    let dir = tempfile::tempdir().unwrap();
    let fig2 = write(dir.path(), "fig2.json", systems::FIG2);
    let pgm = dir.path().join("fig2.pgm");
    let r = report(&sofic(&[
        "render",
        "--input",
        fig2.to_str().unwrap(),
        "--out",
        pgm.to_str().unwrap(),
        "--depth",
        "3",
        "--width",
        "64",
        "--height",
        "125",
    ]));
    assert_eq!(r["render"]["format"], "pgm");
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n64 125\n255\n"));
    assert_eq!(bytes.len(), "P5\n64 125\n255\n".len() + 64 * 125);

    let ex = write(dir.path(), "ex2_11.json", systems::EX2_11);
    let csv = dir.path().join("ex2_11.csv");
    let r = report(&sofic(&[
        "render",
        "--input",
        ex.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--depth",
        "2",
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,z,sx,sy,sz\n"));
    assert_eq!(
        r["render"]["cells"].as_u64().unwrap() as usize,
        text.lines().count() - 1
    );
}

#[test]
fn boxcount_series_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "fig4.json", systems::FIG4);
    let r = report(&sofic(&[
        "boxcount",
        "--input",
        p.to_str().unwrap(),
        "--depth",
        "30",
    ]));
    let series = r["boxcount"]["series"].as_array().unwrap();
    assert_eq!(series.len(), 30);
    assert!(r["boxcount"]["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["holds"] == true));
}
