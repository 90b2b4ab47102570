#![allow(dead_code, unused_imports, unused_macros)]

pub mod gen;
pub mod oracles;
pub mod random;

use std::path::PathBuf;

use tesex::ingest::{load_project, ProjectModel};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load(name: &str) -> ProjectModel {
    let root = fixture(name);
    load_project(&root.join("src/main/java"), &root.join("src/test/java")).expect("fixture loads")
}

/// Method id for `pkg.Class#name`, first declaration.
pub fn method(model: &ProjectModel, class: &str, name: &str) -> tesex::ingest::MethodId {
    model.find_method(class, name).unwrap_or_else(|| panic!("no {class}#{name}"))
}

/// Writes `(relative path, source)` pairs under a temp dir with `main/` and
/// `test/` roots and loads it.
pub fn project(files: &[(&str, &str)]) -> (tempfile::TempDir, ProjectModel) {
    let dir = tempfile::tempdir().unwrap();
    for (rel, src) in files {
        let p = dir.path().join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, src).unwrap();
    }
    std::fs::create_dir_all(dir.path().join("main")).unwrap();
    std::fs::create_dir_all(dir.path().join("test")).unwrap();
    let model = load_project(&dir.path().join("main"), &dir.path().join("test")).expect("project loads");
    (dir, model)
}

pub const FIXTURES: &[&str] = &["corpus", "commons_email", "syntax_error"];

/// Call graph, effect table, analyzed tests, and focal report of a model.
pub fn analyze(
    model: &ProjectModel,
) -> (tesex::callgraph::CallGraphModel, tesex::effects::EffectTable, Vec<tesex::testmodel::TestMethod>, tesex::focal::FocalReport) {
    let g = tesex::callgraph::build_call_graph(model);
    let acc = tesex::effects::collect_accesses(model, &g);
    let eff = tesex::effects::classify_effects(model, &g, &acc);
    let (tests, _) = tesex::testmodel::analyze_tests(model);
    let report = tesex::focal::focal_report(model, &eff, &tests);
    (g, eff, tests, report)
}

/// Simple names of a test's focal methods.
pub fn focal_names(model: &ProjectModel, report: &tesex::focal::FocalReport, test: &str) -> std::collections::BTreeSet<String> {
    let t = report.test(test).unwrap_or_else(|| panic!("no focal entry for {test}"));
    t.sub_scenarios.iter().flat_map(|s| &s.focal_actions).map(|f| model.method(f.method).name.clone()).collect()
}

/// The full pipeline with default options.
pub fn run(model: &ProjectModel) -> tesex::pipeline::Analysis {
    tesex::pipeline::run(model, &Default::default())
}
