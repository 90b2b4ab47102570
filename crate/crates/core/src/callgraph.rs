//! System call graph over the methods involved in testing.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::ingest::{Callee, MethodId, ProjectModel};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CallGraphError {
    #[error("unknown method {0}")]
    UnknownMethod(String),
}

/// A call-graph node: a project method, or an unresolved callee kept as a sink.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CgNode {
    Method(MethodId),
    External(String),
}

#[derive(Debug, Clone, Default)]
pub struct CallGraphModel {
    pub nodes: BTreeSet<CgNode>,
    pub edges: BTreeSet<(CgNode, CgNode)>,
    succ: BTreeMap<MethodId, BTreeSet<MethodId>>,
}

fn sink_name(callee: &Callee) -> Option<String> {
    match callee {
        Callee::Ambiguous { owner, name } => Some(format!("{owner}.{name}")),
        Callee::External { owner, name } => Some(match owner {
            Some(o) => format!("{o}.{name}"),
            None => name.clone(),
        }),
        Callee::System(_) | Callee::Field(_) | Callee::None => None,
    }
}

/// Builds the graph rooted at every method of a test-root class; classes
/// outside that reach are not part of the analysis scope.
pub fn build_call_graph(model: &ProjectModel) -> CallGraphModel {
    let mut g = CallGraphModel::default();
    let mut queue: VecDeque<MethodId> = model
        .classes
        .iter()
        .filter(|c| c.in_test_root)
        .flat_map(|c| c.methods.iter().copied())
        .collect();
    let mut seen: BTreeSet<MethodId> = queue.iter().copied().collect();
    while let Some(m) = queue.pop_front() {
        g.nodes.insert(CgNode::Method(m));
        g.succ.entry(m).or_default();
        for a in &model.method(m).actions {
            if let Callee::System(callee) = a.callee {
                g.edges.insert((CgNode::Method(m), CgNode::Method(callee)));
                g.succ.entry(m).or_default().insert(callee);
                if seen.insert(callee) {
                    queue.push_back(callee);
                }
            } else if let Some(name) = sink_name(&a.callee) {
                g.nodes.insert(CgNode::External(name.clone()));
                g.edges.insert((CgNode::Method(m), CgNode::External(name)));
            }
        }
    }
    g
}

impl CallGraphModel {
    pub fn contains(&self, m: MethodId) -> bool {
        self.succ.contains_key(&m)
    }

    pub fn methods(&self) -> impl Iterator<Item = MethodId> + '_ {
        self.succ.keys().copied()
    }

    /// Direct project callees of `m`.
    pub fn callees(&self, m: MethodId) -> impl Iterator<Item = MethodId> + '_ {
        self.succ.get(&m).into_iter().flatten().copied()
    }

    /// Methods reachable from `m` by one or more edges. External sinks are
    /// excluded since they carry no modeled actions.
    pub fn call_chain(&self, m: MethodId) -> Result<BTreeSet<MethodId>, CallGraphError> {
        if !self.contains(m) {
            return Err(CallGraphError::UnknownMethod(format!("#{}", m.0)));
        }
        let mut out = BTreeSet::new();
        let mut work: Vec<MethodId> = self.callees(m).collect();
        while let Some(n) = work.pop() {
            if out.insert(n) {
                work.extend(self.callees(n));
            }
        }
        Ok(out)
    }

    pub fn to_dot(&self, model: &ProjectModel) -> String {
        let label = |n: &CgNode| match n {
            CgNode::Method(m) => model.method_ref(*m),
            CgNode::External(s) => s.clone(),
        };
        let mut out = String::from("digraph callgraph {\n");
        for n in &self.nodes {
            let shape = if matches!(n, CgNode::External(_)) { "box" } else { "ellipse" };
            let _ = writeln!(out, "  \"{}\" [shape={shape}];", escape(&label(n)));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(&label(a)), escape(&label(b)));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
