mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use tesex::cli::{cmd_analyze, AnalysisConfig, Dump};
use tesex::synthesis::ExampleSet;

use common::{fixture, load, run};

fn tesex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tesex")).args(args).env("TESEX_LOG", "error").output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_corpus_writes_reports() {
    let out = tempfile::tempdir().unwrap();
    let dest = out.path().join("nested/out");
    let o = tesex(&["analyze", "--project", path(&fixture("corpus")), "--out", path(&dest)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["focal_report.json", "examples.json", "examples.md"] {
        assert!(dest.join(f).is_file(), "{f}");
    }
    let set: ExampleSet = serde_json::from_str(&std::fs::read_to_string(dest.join("examples.json")).unwrap()).unwrap();
    // Every test with a focal method contributes at least one example.
    let model = load("corpus");
    let a = run(&model);
    let with_focal = a.focal.tests.iter().filter(|t| !t.fm_tm.is_empty()).count();
    assert!(with_focal >= 10, "{with_focal}");
    assert!(set.examples.len() >= with_focal);
    assert_eq!(set.project, "corpus");
    assert_eq!(set.examples, a.examples.examples);
}

#[test]
fn empty_project_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("src/main/java")).unwrap();
    let o = tesex(&["analyze", "--project", path(dir.path()), "--out", path(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    let bare = tempfile::tempdir().unwrap();
    let o = tesex(&["focal", "--project", path(bare.path()), "--out", path(&bare.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn focal_command_writes_report() {
    let out = tempfile::tempdir().unwrap();
    let o = tesex(&["focal", "--project", path(&fixture("corpus")), "--out", path(out.path())]);
    assert_eq!(o.status.code(), Some(0));
    let report: tesex::focal::FocalReport =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("focal_report.json")).unwrap()).unwrap();
    assert_eq!(report, run(&load("corpus")).focal);
    assert!(!out.path().join("examples.json").exists());
}

#[test]
fn graph_dump_has_usage_model_nodes() {
    let out = tempfile::tempdir().unwrap();
    let o = tesex(&[
        "analyze",
        "--project",
        path(&fixture("corpus")),
        "--out",
        path(out.path()),
        "--format",
        "json",
        "--dump",
        "graph:ControllerTest#testRegisterAndExecuteCommand",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.path().join("examples.md").exists());
    let dot = std::fs::read_to_string(out.path().join("graph_org.puremvc.ControllerTest_testRegisterAndExecuteCommand.dot")).unwrap();
    let labels: BTreeSet<&str> = dot
        .lines()
        .filter_map(|l| l.split_once("[label=\"").map(|(_, r)| r.split('"').next().unwrap()))
        .filter(|l| *l != "ENTRY")
        .collect();
    let want: BTreeSet<&str> = [
        "Controller.getInstance",
        "ControllerTestCommand.<init>",
        "IController.registerCommand",
        "IController.hasCommand",
        "CONTROL(IF)",
        "Assert.fail",
        "ControllerTestVO.<init>",
        "Notification.<init>",
        "IController.executeCommand",
        "ControllerTestVO.result",
        "Assert.assertTrue",
    ]
    .into();
    assert_eq!(labels, want);
    // registerCommand feeds executeCommand through the command map.
    let id = |label: &str| dot.lines().find(|l| l.contains(&format!("\"{label}\""))).unwrap().split_whitespace().next().unwrap().to_string();
    let edge = format!("{} -> {} [style=dashed", id("IController.registerCommand"), id("IController.executeCommand"));
    assert!(dot.contains(&edge), "{dot}");
}

#[test]
fn other_dumps() {
    let out = tempfile::tempdir().unwrap();
    let mut config = AnalysisConfig::new(fixture("corpus"), out.path());
    config.dumps = ["callgraph", "effects", "tests", "graph"].iter().map(|d| d.parse::<Dump>().unwrap()).collect();
    let a = cmd_analyze(&config).unwrap();
    assert!(std::fs::read_to_string(out.path().join("callgraph.dot")).unwrap().starts_with("digraph"));
    assert!(std::fs::read_to_string(out.path().join("effects.tsv")).unwrap().contains("MUT"));
    let tests: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.path().join("tests.json")).unwrap()).unwrap();
    assert_eq!(tests.as_array().unwrap().len(), a.tests.len());
    let graphs = std::fs::read_dir(out.path()).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("graph_")).count();
    assert_eq!(graphs, a.graphs.len());
    assert!("graph:".parse::<Dump>().is_err());
    assert!("bogus".parse::<Dump>().is_err());
}

#[test]
fn eval_self_check_and_schema_error() {
    let out = tempfile::tempdir().unwrap();
    let o = tesex(&["analyze", "--project", path(&fixture("corpus")), "--out", path(out.path()), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let examples = out.path().join("examples.json");
    let o = tesex(&["eval", "--generated", path(&examples), "--reference", path(&examples)]);
    assert_eq!(o.status.code(), Some(0));
    let report: tesex::cli::EvalReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((report.fitness, report.completeness, report.conciseness), (1.0, 1.0, 1.0));

    let bad = out.path().join("bad.json");
    std::fs::write(&bad, r#"{"entries": [{"test_id": 3}]}"#).unwrap();
    let o = tesex(&["eval", "--generated", path(&examples), "--reference", path(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(&bad, "not json").unwrap();
    let o = tesex(&["eval", "--generated", path(&bad), "--reference", path(&examples)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn diagnostics_follow_log_level() {
    let out = tempfile::tempdir().unwrap();
    let run_with = |level: &str| {
        Command::new(env!("CARGO_BIN_EXE_tesex"))
            .args(["focal", "--project", path(&fixture("syntax_error")), "--out", path(out.path())])
            .env("TESEX_LOG", level)
            .output()
            .unwrap()
    };
    let quiet = run_with("off");
    assert!(quiet.stderr.is_empty(), "{}", String::from_utf8_lossy(&quiet.stderr));
    let loud = String::from_utf8(run_with("info").stderr).unwrap();
    let line = loud.lines().find(|l| l.contains(".java:")).expect("a file diagnostic");
    let (level, rest) = line.split_once(' ').unwrap();
    assert!(["ERROR", "WARN", "INFO"].contains(&level), "{line}");
    let (file, _) = rest.split_once(' ').unwrap();
    assert!(file.rsplit_once(':').unwrap().1.parse::<u32>().is_ok(), "{line}");
}
