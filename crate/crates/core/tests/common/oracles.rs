//! Independent oracles and invariant checks shared by the test targets.

use std::collections::{BTreeMap, BTreeSet};

use tesex::callgraph::{CallGraphModel, CgNode};
use tesex::effects::AccessRecord;
use tesex::ingest::{Acc, BranchKind, MethodId, ProjectModel, StatementModel, StmtKindTag, VarRef};
use tesex::pipeline::Analysis;
use tesex::synthesis::Example;
use tesex::usagegraph::{NodeId, SymbolicCondition, UsageGraph};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}
pub(crate) use ensure;

/// Every branching node's outgoing conditions cover all cases, and temporal
/// edges only go forward in node order.
pub fn cf_complete_and_acyclic(id: &str, g: &UsageGraph) -> Check {
    let pos: BTreeMap<NodeId, usize> = g.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    for n in &g.nodes {
        let out: Vec<NodeId> = g.successors(n.id).collect();
        for s in &out {
            ensure!(pos[&n.id] < pos[s], "{id}: back edge {:?} -> {s:?}", n.id);
        }
        if out.len() > 1 {
            let any = out.iter().fold(SymbolicCondition::False, |acc, s| acc.or(g.cf_of(n.id, *s)));
            ensure!(any.is_tautology(), "{id}: {:?} outgoing {any}", n.id);
        }
    }
    Ok(())
}

/// Innermost enclosing control statement of every action, from the statement tree.
pub fn innermost_controls(stmts: &[StatementModel], enclosing: Option<usize>, out: &mut BTreeMap<usize, Option<usize>>) {
    for s in stmts {
        let is_ctrl = matches!(s.kind, StmtKindTag::If | StmtKindTag::For | StmtKindTag::While);
        let has_catch = s.branches.iter().any(|b| b.kind == BranchKind::Catch);
        for a in &s.actions {
            let own = is_ctrl && s.update_actions.contains(a);
            out.insert(*a, if own { Some(s.id) } else { enclosing });
        }
        for b in &s.branches {
            let inner = match b.kind {
                BranchKind::Then | BranchKind::Else | BranchKind::LoopBody if is_ctrl => Some(s.id),
                BranchKind::Catch if has_catch => Some(s.id),
                _ => enclosing,
            };
            innermost_controls(&b.stmts, inner, out);
        }
    }
}

/// Control edges into actions equal the innermost-enclosing-predicate relation.
pub fn cd_innermost(model: &ProjectModel, id: &str, g: &UsageGraph) -> Check {
    let mm = model.method(g.method.unwrap());
    let mut want = BTreeMap::new();
    innermost_controls(&mm.body, None, &mut want);
    for (a, c) in want {
        let got: Vec<usize> = g
            .control_edges
            .iter()
            .filter(|(_, to)| *to == NodeId::Action(a))
            .filter_map(|(c, _)| match c {
                NodeId::Control(s) => Some(*s),
                _ => None,
            })
            .collect();
        ensure!(got == c.into_iter().collect::<Vec<_>>(), "{id}: action {a} ({}) controlled by {got:?}", mm.actions[a].label());
    }
    Ok(())
}

fn all_paths(g: &UsageGraph) -> Vec<Vec<usize>> {
    fn go(g: &UsageGraph, n: NodeId, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if let NodeId::Action(a) = n {
            cur.push(a);
        }
        let succ: Vec<NodeId> = g.successors(n).collect();
        if succ.is_empty() {
            out.push(cur.clone());
        }
        for s in succ {
            go(g, s, cur, out);
        }
        if let NodeId::Action(_) = n {
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(g, NodeId::Entry, &mut Vec::new(), &mut out);
    out
}

/// Reaching definitions by enumerating every complete path of the DAG.
pub fn brute_force_dd(g: &UsageGraph) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for p in all_paths(g) {
        for (x, &i) in p.iter().enumerate() {
            for (y, &j) in p.iter().enumerate().skip(x + 1) {
                let hit = g.writes[&i]
                    .intersection(&g.reads[&j])
                    .any(|v| !p[x + 1..y].iter().any(|k| g.writes[k].contains(v)));
                if hit {
                    out.insert((i, j));
                }
            }
        }
    }
    out
}

pub fn dd_matches_paths(id: &str, g: &UsageGraph) -> Check {
    let want = brute_force_dd(g);
    let ids: Vec<usize> = g.action_ids().collect();
    for &i in &ids {
        for &j in &ids {
            ensure!(g.data_dependency(i, j) == want.contains(&(i, j)), "{id}: DD({i}, {j})");
        }
    }
    for (i, j) in &want {
        ensure!(g.data_edges.contains_key(&(*i, *j)), "{id}: missing data edge {i} -> {j}");
    }
    for (i, j) in g.data_edges.keys() {
        ensure!(i < j, "{id}: data edge {i} -> {j} against order");
    }
    Ok(())
}

/// Dependency closure by naive iteration over the explicit edge relations:
/// data edges, control edges, and a control node's own statement actions.
pub fn brute_force_closure(g: &UsageGraph, f: usize) -> BTreeSet<usize> {
    let mut rel: Vec<(NodeId, NodeId)> = g.data_edges.keys().map(|(i, j)| (NodeId::Action(*i), NodeId::Action(*j))).collect();
    rel.extend(g.control_edges.iter().copied());
    let mut set = BTreeSet::from([NodeId::Action(f)]);
    loop {
        let before = set.len();
        for (from, to) in &rel {
            if set.contains(to) {
                set.insert(*from);
            }
        }
        let ctrl: Vec<usize> = set.iter().filter_map(|n| if let NodeId::Control(s) = n { Some(*s) } else { None }).collect();
        for s in ctrl {
            for a in g.control_actions.get(&s).into_iter().flatten() {
                set.insert(NodeId::Action(*a));
            }
        }
        if set.len() == before {
            break;
        }
    }
    set.into_iter().filter_map(|n| if let NodeId::Action(a) = n { Some(a) } else { None }).collect()
}

/// Whether `text` calls an assertion method (`assertX(` or `fail(`).
pub fn calls_assert(text: &str) -> bool {
    let b = text.as_bytes();
    let ident = |c: u8| c.is_ascii_alphanumeric() || c == b'_';
    let at_word = |i: usize| i == 0 || !ident(b[i - 1]) || b[i - 1] == b'.';
    let mut i = 0;
    while i < b.len() {
        let rest = &text[i..];
        if at_word(i) {
            if let Some(r) = rest.strip_prefix("assert") {
                if r.as_bytes().first().is_some_and(|c| c.is_ascii_uppercase()) {
                    return true;
                }
            }
            if rest.starts_with("fail(") || rest.starts_with("fail (") {
                return true;
            }
        }
        i += 1;
    }
    false
}

/// Slice soundness, closure, oracle freedom and source order of one example.
pub fn example_invariants(model: &ProjectModel, g: &UsageGraph, ex: &Example) -> Check {
    let id = format!("{} {}", ex.source_test, ex.focal);
    let want = brute_force_closure(g, ex.focal_action);
    ensure!(ex.included_actions == want, "{id}: slice {:?} vs oracle {want:?}", ex.included_actions);
    for a in &ex.included_actions {
        for d in g.dependencies(NodeId::Action(*a)) {
            if let NodeId::Action(d) = d {
                ensure!(ex.included_actions.contains(&d), "{id}: {d} missing from closure of {a}");
            }
        }
    }
    let src = model.source_of(g.method.unwrap());
    let mut last = 0;
    for s in &ex.statements {
        ensure!(!calls_assert(&s.text), "{id}: assertion in example: {}", s.text);
        ensure!(s.span.0 >= last, "{id}: statement out of order: {}", s.text);
        last = s.span.0;
        let norm = |t: &str| t.split_whitespace().collect::<String>();
        let verbatim = norm(&src[s.span.0..s.span.1]);
        ensure!(norm(&s.text).trim_end_matches(';') == verbatim.trim_end_matches(';'), "{id}: not verbatim: {}", s.text);
    }
    Ok(())
}

/// Every graph and example invariant over one analysis.
pub fn analysis_invariants(model: &ProjectModel, a: &Analysis) -> Check {
    for (id, g) in &a.graphs {
        cf_complete_and_acyclic(id, g)?;
        cd_innermost(model, id, g)?;
    }
    for ex in &a.examples.examples {
        example_invariants(model, &a.graphs[&ex.source_test], ex)?;
    }
    Ok(())
}

/// Two runs over the same model serialize identically.
pub fn deterministic(model: &ProjectModel) -> Check {
    let run = || {
        let a = tesex::pipeline::run(model, &Default::default());
        (serde_json::to_string(&a.focal).unwrap(), serde_json::to_string(&a.examples).unwrap())
    };
    ensure!(run() == run(), "two runs differ");
    Ok(())
}

/// Naive BFS over the public edge set.
pub fn bfs(g: &CallGraphModel, m: MethodId) -> BTreeSet<MethodId> {
    let mut out = BTreeSet::new();
    let mut frontier = vec![m];
    while let Some(x) = frontier.pop() {
        for (a, b) in &g.edges {
            if *a == CgNode::Method(x) {
                if let CgNode::Method(b) = b {
                    if out.insert(*b) {
                        frontier.push(*b);
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive oracle: union the records of every method on every simple call
/// path from `m`, then apply the visibility filter.
pub fn exhaustive(model: &ProjectModel, g: &CallGraphModel, acc: &BTreeSet<AccessRecord>, m: MethodId) -> (BTreeSet<VarRef>, BTreeSet<VarRef>) {
    fn walk(g: &CallGraphModel, path: &mut Vec<MethodId>, seen: &mut BTreeSet<MethodId>) {
        let last = *path.last().unwrap();
        seen.insert(last);
        for (a, b) in &g.edges {
            if let (CgNode::Method(a), CgNode::Method(b)) = (a, b) {
                if *a == last && !path.contains(b) {
                    path.push(*b);
                    walk(g, path, seen);
                    path.pop();
                } else if *a == last {
                    seen.insert(*b);
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    walk(g, &mut vec![m], &mut seen);
    let mm = model.method(m);
    let fields = model.class_fields(mm.owner);
    let mut w = BTreeSet::new();
    let mut r = BTreeSet::new();
    for rec in acc.iter().filter(|x| seen.contains(&x.action.method)) {
        let visible = match rec.var {
            VarRef::Field(f) => fields.contains(&f),
            VarRef::Local(k, i) => k == m && i < mm.param_types.len(),
        };
        if visible {
            if rec.acc == Acc::W {
                w.insert(rec.var);
            } else {
                r.insert(rec.var);
            }
        }
    }
    let ins = r.difference(&w).copied().collect();
    (w, ins)
}
