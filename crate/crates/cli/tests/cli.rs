use std::path::Path;
use std::process::{Command, Output};

use poset_screen::{AuditReport, SelectionResult};
use poset_screen_cli::{ingest_candidates, run_pipeline, write_outputs, IngestError, PipelineConfig, Schema};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poset-screen")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn ingest_check_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pool.csv", "id,group,score\nA,x,82\nB,y,68\nC,y,67\n");
    let out = cli(&["ingest-check", "--input", &input, "--schema", "scores"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("ok: 3 candidates (scores)"), "{text}");
    assert!(text.contains("  y: 2"));
}

#[test]
fn ingest_errors_are_located_and_total() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.csv", "id,group,low,high\nA,x,1,2\nB,x,9,3\nC,x,1,2\n");
    let err = ingest_candidates(Path::new(&input), Schema::Intervals).unwrap_err();
    assert!(matches!(err, IngestError::Cell { line: 3, column: 4, .. }), "{err}");

    let out = cli(&["ingest-check", "--input", &input, "--schema", "intervals"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 3, column 4 (high)"), "{stderr}");

    let missing = dir.path().join("absent.csv");
    assert!(matches!(ingest_candidates(&missing, Schema::Scores), Err(IngestError::Io { .. })));
}

#[test]
fn construct_writes_dot_for_regions() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "regions.csv",
        "id,group,low_1,high_1,low_2,high_2\nlow,x,0,1,0,1\nhigh,y,2,3,2,3\nside,y,2,3,0,0.5\n",
    );
    let config = write(dir.path(), "c.json", r#"{"method":"as_given","selection":"cutoff","cutoff":[1,1]}"#);
    let out = cli(&["construct", "--input", &input, "--schema", "regions", "--config", &config]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph hasse {"));
    assert!(dot.contains("\"low\" -> \"high\";"));
    assert!(!dot.contains("\"side\" ->"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pool.csv", "id,group,low,high\nA,x,79,85\nB,y,65,71\nC,y,64,70\n");
    let config = write(dir.path(), "c.json", r#"{"method":"as_given","selection":"cutoff","cutoff":100}"#);
    let out = cli(&["select", "--input", &input, "--schema", "intervals", "--config", &config, "--cutoff", "70.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sel: SelectionResult = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(sel.ids(), vec!["A", "B"]);

    let out = cli(&["select", "--input", &input, "--schema", "intervals", "--config", &config, "--k", "2"]);
    assert!(!out.status.success(), "top-k without a seed must be rejected");
    let out = cli(&[
        "select", "--input", &input, "--schema", "intervals", "--config", &config, "--k", "2", "--seed", "4",
    ]);
    assert!(out.status.success());
    let sel: SelectionResult = serde_json::from_slice(&out.stdout).unwrap();
    assert!(sel.contains("A") && sel.len() == 2 && sel.seed == Some(4));
}

#[test]
fn report_round_trips_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pool.csv", "id,group,score\na,x,1\nb,x,5\nc,y,2\nd,y,9\n");
    let config = PipelineConfig::from_json(
        r#"{"method":"count_based","params":{"c":2,"mode":"uniform_min"},"floor":0.5,
            "selection":"cutoff","cutoff":4.6}"#,
    )
    .unwrap();
    let pool = ingest_candidates(Path::new(&input), Schema::Scores).unwrap();
    let run = run_pipeline(&config, &pool).unwrap();
    let out = dir.path().join("out");
    write_outputs(&run, &out).unwrap();

    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    let parsed: AuditReport = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed, run.report);
    let echoed: PipelineConfig = serde_json::from_value(parsed.config_echo).unwrap();
    assert_eq!(echoed, config);

    let rates = std::fs::read_to_string(out.join("rates.csv")).unwrap();
    assert_eq!(rates.lines().next(), Some("group,pool,selected,rate"));
    assert_eq!(rates.lines().count(), 3);
}

#[test]
fn empty_selection_still_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pool.csv", "id,group,score\na,x,1\nb,y,2\n");
    let config = write(dir.path(), "c.json", r#"{"method":"as_given","selection":"cutoff","cutoff":10}"#);
    let out_dir = dir.path().join("out");
    let out = cli(&[
        "audit", "--input", &input, "--config", &config, "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sel = std::fs::read_to_string(out_dir.join("selection.csv")).unwrap();
    assert_eq!(sel, "id,rationale\n");
    let dot = std::fs::read_to_string(out_dir.join("hasse.dot")).unwrap();
    assert!(dot.contains("\"a\" -> \"b\";"));
}

#[test]
fn stage_errors_reach_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pool.csv", "id,group,score\na,x,1\nb,y,2\n");
    let config = write(dir.path(), "c.json", r#"{"method":"as_given","selection":"top_k","k":5,"seed":1}"#);
    let out = cli(&["audit", "--input", &input, "--config", &config]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("selection: "), "{stderr}");
}

#[test]
fn workforce_composition() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "wf.csv", "group,level\nx,junior\ny,senior\nx,senior\nx,junior\n");
    let out = cli(&["audit", "--workforce", &input]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table: poset_screen::CompositionTable = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table.get("x", "junior"), 2);
    assert_eq!(table.total, 4);
}

#[test]
fn scenario_command_lists_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["scenario", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["minority-gain", "majority-gain", "separated", "parity-loss"] {
        assert!(text.contains(name), "{text}");
        assert!(dir.path().join(format!("{name}.json")).exists());
    }
    assert!(!cli(&["scenario", "--name", "nope"]).status.success());
}

#[test]
fn simulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"groups":[{"label":"a","size":5,"mean":10,"sd":2}],"noise_sd":1,"seed":3}"#,
    );
    let a = cli(&["simulate", "--config", &spec]);
    let b = cli(&["simulate", "--config", &spec]);
    let c = cli(&["simulate", "--config", &spec, "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("id,group,score\na-0,a,"));
}
