//! The whole analysis over a loaded project.

use std::collections::BTreeMap;

use crate::callgraph::{build_call_graph, CallGraphModel};
use crate::effects::{classify_effects, collect_accesses, EffectTable};
use crate::focal::{focal_report, FocalReport};
use crate::ingest::ProjectModel;
use crate::synthesis::{inline_fixtures, synthesize, ExampleSet};
use crate::testmodel::{analyze_tests, TestMethod, TestModelError};
use crate::usagegraph::{build_usage_graph, UsageGraph};

#[derive(Debug)]
pub struct Analysis {
    pub callgraph: CallGraphModel,
    pub effects: EffectTable,
    pub tests: Vec<TestMethod>,
    pub test_errors: Vec<TestModelError>,
    pub focal: FocalReport,
    /// Usage graph of every test with at least one focal method.
    pub graphs: BTreeMap<String, UsageGraph>,
    pub examples: ExampleSet,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub project_name: String,
    pub inline_fixtures: bool,
}

pub fn run(model: &ProjectModel, opts: &Options) -> Analysis {
    let callgraph = build_call_graph(model);
    let accesses = collect_accesses(model, &callgraph);
    let effects = classify_effects(model, &callgraph, &accesses);
    let (tests, test_errors) = analyze_tests(model);
    let focal = focal_report(model, &effects, &tests);
    let mut graphs = BTreeMap::new();
    let mut examples = ExampleSet { project: opts.project_name.clone(), examples: Vec::new() };
    for tf in focal.tests.iter().filter(|t| !t.fm_tm.is_empty()) {
        let Some(test) = tests.iter().find(|t| t.id == tf.test_id) else { continue };
        let g = build_usage_graph(model, &effects, test);
        for mut ex in synthesize(model, &g, test, tf) {
            if opts.inline_fixtures {
                inline_fixtures(model, test, &mut ex);
            }
            examples.examples.push(ex);
        }
        graphs.insert(tf.test_id.clone(), g);
    }
    log::info!("{} tests, {} examples", tests.len(), examples.examples.len());
    Analysis { callgraph, effects, tests, test_errors, focal, graphs, examples }
}
