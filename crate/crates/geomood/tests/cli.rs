//! End-to-end checks of the `geomood` binary.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::OnceLock;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geomood"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "geomood {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("UTF-8 stdout")
}

/// One generated city plus one finished pipeline run, shared by every test.
struct Workspace {
    city: PathBuf,
    run: PathBuf,
    _dir: tempfile::TempDir,
}

fn workspace() -> &'static Workspace {
    static WS: OnceLock<Workspace> = OnceLock::new();
    WS.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let city = dir.path().join("city");
        let run = dir.path().join("run");
        run_ok(&[
            "fixtures",
            "generate",
            "--out-dir",
            city.to_str().unwrap(),
            "--cols",
            "8",
            "--rows",
            "6",
            "--venue-tracts",
            "5",
            "--low-tier-tracts",
            "2",
            "--baseline-messages-per-tract",
            "8",
            "--venue-messages-per-tract",
            "8",
        ]);
        run_ok(&[
            "run",
            "--messages",
            city.join("messages.jsonl").to_str().unwrap(),
            "--tracts",
            city.join("tracts.geojson").to_str().unwrap(),
            "--out-dir",
            run.to_str().unwrap(),
            "--workers",
            "2",
        ]);
        Workspace {
            city,
            run,
            _dir: dir,
        }
    })
}

fn city_file(name: &str) -> String {
    workspace().city.join(name).to_str().unwrap().to_string()
}

fn run_dir() -> String {
    workspace().run.to_str().unwrap().to_string()
}

#[test]
fn run_writes_the_manifest_and_all_stage_outputs() {
    let ws = workspace();
    for name in [
        "manifest.json",
        "localized.tsv",
        "checkins.tsv",
        "scores.tsv",
        "mobility_users.tsv",
        "mobility_tracts.tsv",
        "tract_aggregates.tsv",
        "summary.csv",
    ] {
        assert!(ws.run.join(name).is_file(), "missing {name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ws.run.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["error"], serde_json::Value::Null);
    assert_eq!(manifest["config"]["workers"], 2);
    assert!(manifest["stages"]["ingest"]["accepted"].as_u64().unwrap() > 0);
    assert!(manifest["inputs"]["messages"]["sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn stage_subcommands_emit_headed_tsv() {
    let messages = city_file("messages.jsonl");
    let tracts = city_file("tracts.geojson");

    let out = run_ok(&["localize", "--messages", &messages, "--tracts", &tracts]);
    let text = stdout_of(&out);
    assert!(text.starts_with("message_id\ttract_id\n"));
    assert!(text.lines().count() > 100);

    let out = run_ok(&["checkins", "--messages", &messages, "--tracts", &tracts]);
    let text = stdout_of(&out);
    assert!(text.starts_with("message_id\tvenue_name\tvenue_handle\tcity\tregion\ttract_id\n"));
    assert!(text.lines().skip(1).all(|l| l.split('\t').count() == 6));

    let out = run_ok(&["score", "--messages", &messages]);
    let text = stdout_of(&out);
    assert!(text
        .starts_with("message_id\tpositive\tnegative\tvalence\tarousal\tdominance\tmatched_terms\n"));

    let out = run_ok(&["mobility", "--messages", &messages, "--tracts", &tracts]);
    let text = stdout_of(&out);
    assert!(text.starts_with("user_id\tn_points\tr_g_m\n"));
    assert!(text.contains("\ntract_id\tn_users\tmean_r_g_m\n"));

    let out = run_ok(&["ingest", "--messages", &messages]);
    let text = stdout_of(&out);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with('{') && first.contains("\"message_id\""));
}

#[test]
fn test_subcommand_reports_the_planted_difference() {
    let out = run_ok(&[
        "test",
        "--run-dir",
        &run_dir(),
        "--metric",
        "mean_V",
        "--cohort-a",
        "with-checkins",
        "--cohort-b",
        "all",
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("metric:    mean_V"));
    assert!(text.contains("U = "));
    assert!(text.contains("z = "));
    assert!(text.contains("p = "));
    assert!(text.contains("significant at alpha 0.05: yes"), "got:\n{text}");

    let pooled = run_ok(&[
        "test",
        "--run-dir",
        &run_dir(),
        "--metric",
        "mean_P",
        "--pooled",
        "--welch",
    ]);
    let text = stdout_of(&pooled);
    assert!(text.contains("messages)"), "pooled mode compares messages:\n{text}");
    assert!(text.contains("Welch t = "));
}

#[test]
fn report_subcommands_render_each_format() {
    let summary = stdout_of(&run_ok(&["report", "summary", "--run-dir", &run_dir()]));
    assert!(summary.starts_with("Tracts,#Tracts,Valence,Arousal,Dominance,Positive,Negative\n"));
    assert!(summary.contains("\nTracts,#Tracts,R_g\n"));

    let geojson = stdout_of(&run_ok(&[
        "report",
        "geojson",
        "--run-dir",
        &run_dir(),
        "--tracts",
        &city_file("tracts.geojson"),
        "--metric",
        "mean_V",
    ]));
    let parsed: serde_json::Value = serde_json::from_str(&geojson).expect("valid JSON overlay");
    assert_eq!(parsed["type"], "FeatureCollection");
    assert!(parsed["features"].as_array().unwrap().len() == 48);

    let terms = stdout_of(&run_ok(&[
        "report",
        "terms",
        "--run-dir",
        &run_dir(),
        "--messages",
        &city_file("messages.jsonl"),
        "--tract",
        "T0000",
        "--top",
        "3",
    ]));
    assert!(terms.starts_with("term\tcount\n"));
    assert_eq!(terms.lines().count(), 4, "header plus three rows:\n{terms}");

    let matrix = stdout_of(&run_ok(&[
        "report",
        "correlations",
        "--run-dir",
        &run_dir(),
        "--fields",
        "mean_V,r_g,n_checkins",
    ]));
    assert!(matrix.starts_with("field,mean_V,r_g,n_checkins\n"));
    assert!(matrix.lines().count() == 4);
}

#[test]
fn config_file_drives_run_and_flags_override_it() {
    let ws = workspace();
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("job.toml");
    let out_a = dir.path().join("out_a");
    std::fs::write(
        &config_path,
        format!(
            "messages = {:?}\ntracts = {:?}\nout_dir = {:?}\nworkers = 1\ncohort_threshold = 2\n",
            ws.city.join("messages.jsonl"),
            ws.city.join("tracts.geojson"),
            out_a
        ),
    )
    .unwrap();
    run_ok(&["run", "--config", config_path.to_str().unwrap()]);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["cohort_threshold"], 2);

    // The same file, with the out dir and threshold overridden on the line.
    let out_b = dir.path().join("out_b");
    run_ok(&[
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--out-dir",
        out_b.to_str().unwrap(),
        "--threshold",
        "4",
    ]);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_b.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["cohort_threshold"], 4);
}

#[test]
fn failures_exit_1_with_a_diagnostic_and_usage_errors_exit_1() {
    let output = bin()
        .args(["run", "--messages", "/no/such.jsonl", "--tracts", "/no/such.geojson", "--out-dir", "/tmp/never"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("error:"), "stderr: {stderr}");

    let output = bin().args(["--definitely-not-a-flag"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));

    let output = bin().args(["--help"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));

    let output = bin()
        .args(["test", "--run-dir", &run_dir(), "--metric", "not_a_metric"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown metric"));
}

#[test]
fn ingest_rejects_bad_lines_and_strict_mode_aborts() {
    let ws = workspace();
    let dir = tempfile::tempdir().unwrap();
    let mixed = dir.path().join("mixed.jsonl");
    let good = std::fs::read_to_string(ws.city.join("messages.jsonl")).unwrap();
    let mut lines: Vec<&str> = good.lines().take(10).collect();
    lines.insert(3, "this is not json");
    std::fs::write(&mixed, lines.join("\n")).unwrap();

    let output = bin()
        .args(["ingest", "--messages", mixed.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("10 accepted, 1 rejected"), "stderr: {stderr}");

    let output = bin()
        .args(["ingest", "--strict", "--messages", mixed.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "strict mode must abort");
}
