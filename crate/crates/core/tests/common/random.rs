//! Oracle equivalence on randomly generated small programs.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tesex::ingest::{FieldId, MethodId, ProjectModel};
use tesex::usagegraph::build_usage_graph;

use super::gen::{generate, Program, FIELDS, METHODS};
use super::oracles::{self, ensure, Check};
use super::{project, run};

pub const INSTANCES: usize = 200;
pub const SEED: u64 = 0x7e5e;

fn ids(model: &ProjectModel) -> (Vec<MethodId>, Vec<FieldId>) {
    let ms = (0..METHODS).map(|i| model.find_method("g.Box", &format!("m{i}")).unwrap()).collect();
    let c = model.class_by_name("g.Box").unwrap();
    let fs = FIELDS.iter().map(|f| model.find_field(c, f).unwrap()).collect();
    (ms, fs)
}

#[derive(Debug, Default)]
pub struct Stats {
    pub examples: usize,
    pub with_control: usize,
}

fn check_instance(k: usize, p: &Program, stats: &mut Stats) -> Check {
    ensure!(p.statements <= 12 && p.branches <= 2, "#{k}: generator bounds");
    let (_d, model) = project(&p.files());
    let (ms, fs) = ids(&model);
    let a = run(&model);
    // only methods reachable from the test are part of the call graph
    for i in (0..METHODS).filter(|i| a.callgraph.contains(ms[*i])) {
        let chain = a.callgraph.call_chain(ms[i]).map_err(|e| e.to_string())?;
        let want: BTreeSet<MethodId> = p.reachable(i).into_iter().map(|j| ms[j]).collect();
        ensure!(chain == want, "#{k}: call_chain(m{i}) {chain:?} vs {want:?}\n{}", p.box_src);
        let field_set = |s: BTreeSet<usize>| -> BTreeSet<FieldId> { s.into_iter().map(|f| fs[f]).collect() };
        let mods: BTreeSet<FieldId> = a.effects.mod_set(ms[i]).collect();
        ensure!(mods == field_set(p.path_union(i, &p.writes)), "#{k}: mod set of m{i}\n{}", p.box_src);
        let reads: BTreeSet<FieldId> = a.effects.read_set(ms[i]).collect();
        ensure!(reads == field_set(p.path_union(i, &p.reads)), "#{k}: read set of m{i}\n{}", p.box_src);
    }
    stats.examples += a.examples.examples.len();
    oracles::analysis_invariants(&model, &a).map_err(|e| format!("#{k}: {e}\n{}", p.test_src))?;
    // graph oracles on every analyzed test, with or without a focal method
    for t in a.tests.iter().filter(|t| t.excluded.is_none()) {
        let g = build_usage_graph(&model, &a.effects, t);
        let fail = |e: String| format!("#{k}: {e}\n{}", p.test_src);
        oracles::cf_complete_and_acyclic(&t.id, &g).map_err(fail)?;
        oracles::cd_innermost(&model, &t.id, &g).map_err(fail)?;
        oracles::dd_matches_paths(&t.id, &g).map_err(fail)?;
        stats.with_control += g.control_nodes().next().is_some() as usize;
    }
    oracles::deterministic(&model).map_err(|e| format!("#{k}: {e}"))
}

/// Runs every instance, returning the first failure.
pub fn run_all() -> Result<Stats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut stats = Stats::default();
    for k in 0..INSTANCES {
        let p = generate(&mut rng);
        check_instance(k, &p, &mut stats)?;
    }
    Ok(stats)
}
