//! Per-test object usage graph: temporal, control and data edges between actions.

mod cond;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

pub use cond::{SymbolicCondition, MAX_TABLE_ATOMS};

use crate::callgraph::escape;
use crate::effects::EffectTable;
use crate::ingest::{
    Acc, ActionKind, ActionModel, BranchKind, Callee, FieldId, MethodId, MethodModel, ProjectModel, StatementModel,
    StmtKindTag, VarRef,
};
use crate::testmodel::TestMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NodeId {
    Entry,
    Action(usize),
    /// Branching point of the control statement with this statement id.
    Control(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ControlKind {
    If,
    For,
    While,
    Catch,
}

#[derive(Debug, Clone, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    pub line: u32,
}

/// Something an action reads or writes, as seen from the test body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DataVar {
    /// A local binding, or a field accessed directly (static or on the test object).
    Var(VarRef),
    /// Field `f` of the object held by the variable.
    Attr(VarRef, FieldId),
    /// Unspecified state of the object held by the variable.
    Whole(VarRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DataRelation {
    RR,
    RW,
    WR,
    WW,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    Intra,
    Inter,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UsageGraphError {
    #[error("data relation needs i < j, got {0} >= {1}")]
    OrderViolation(usize, usize),
}

#[derive(Debug, Clone, Default)]
pub struct UsageGraph {
    pub method: Option<MethodId>,
    pub nodes: Vec<Node>,
    /// Control-flow condition of every temporal edge.
    pub cf: BTreeMap<(NodeId, NodeId), SymbolicCondition>,
    pub reachability: BTreeMap<NodeId, SymbolicCondition>,
    /// Control node to dependent node.
    pub control_edges: BTreeSet<(NodeId, NodeId)>,
    /// Earlier action to dependent action.
    pub data_edges: BTreeMap<(usize, usize), EdgeKind>,
    pub control_kinds: BTreeMap<usize, ControlKind>,
    /// Atom to control statement id and predicate text.
    pub atoms: Vec<(usize, String)>,
    pub reads: BTreeMap<usize, BTreeSet<DataVar>>,
    pub writes: BTreeMap<usize, BTreeSet<DataVar>>,
    /// Own actions of each control statement (predicate, init, update).
    pub control_actions: BTreeMap<usize, Vec<usize>>,
}

struct Builder<'a> {
    mm: &'a MethodModel,
    g: UsageGraph,
    pending: Vec<(NodeId, SymbolicCondition)>,
}

impl Builder<'_> {
    fn add(&mut self, id: NodeId, label: String, line: u32) {
        for (p, c) in std::mem::take(&mut self.pending) {
            let e = self.g.cf.entry((p, id)).or_insert(SymbolicCondition::False);
            *e = std::mem::replace(e, SymbolicCondition::False).or(c);
        }
        self.g.nodes.push(Node { id, label, line });
        self.pending = vec![(id, SymbolicCondition::True)];
    }

    fn actions(&mut self, ids: &[usize]) {
        for &a in ids {
            let act = &self.mm.actions[a];
            self.add(NodeId::Action(a), action_label(self.mm, act), act.span.start_line);
        }
    }

    fn new_atom(&mut self, stmt: usize, text: String) -> u32 {
        self.g.atoms.push((stmt, text));
        (self.g.atoms.len() - 1) as u32
    }

    fn control(&mut self, s: &StatementModel, kind: ControlKind, src: &str) -> u32 {
        self.g.control_kinds.insert(s.id, kind);
        self.g.control_actions.insert(s.id, s.actions.clone());
        let label = format!("CONTROL({})", format!("{kind:?}").to_uppercase());
        self.add(NodeId::Control(s.id), label, s.span.start_line);
        let text = predicate_text(s, src);
        self.new_atom(s.id, text)
    }

    fn seq(&mut self, stmts: &[StatementModel], src: &str) {
        for s in stmts {
            self.stmt(s, src);
        }
    }

    fn branch(&mut self, s: &StatementModel, kind: BranchKind, src: &str) {
        for b in s.branches.iter().filter(|b| b.kind == kind) {
            self.seq(&b.stmts, src);
        }
    }

    fn stmt(&mut self, s: &StatementModel, src: &str) {
        use SymbolicCondition as C;
        match s.kind {
            StmtKindTag::If => {
                self.actions(&s.predicate_actions);
                let c = self.control(s, ControlKind::If, src);
                self.pending = vec![(NodeId::Control(s.id), C::atom(c))];
                self.branch(s, BranchKind::Then, src);
                let mut exits = std::mem::replace(&mut self.pending, vec![(NodeId::Control(s.id), C::atom(c).not())]);
                self.branch(s, BranchKind::Else, src);
                exits.append(&mut self.pending);
                self.pending = exits;
            }
            StmtKindTag::While | StmtKindTag::For => {
                let pred: BTreeSet<usize> = s.predicate_actions.iter().copied().collect();
                let upd: BTreeSet<usize> = s.update_actions.iter().copied().collect();
                let init: Vec<usize> = s.actions.iter().copied().filter(|a| !pred.contains(a) && !upd.contains(a)).collect();
                self.actions(&init);
                self.actions(&s.predicate_actions);
                let kind = if s.kind == StmtKindTag::For { ControlKind::For } else { ControlKind::While };
                let c = self.control(s, kind, src);
                self.pending = vec![(NodeId::Control(s.id), C::atom(c))];
                self.branch(s, BranchKind::LoopBody, src);
                self.actions(&s.update_actions);
                self.pending.push((NodeId::Control(s.id), C::atom(c).not()));
            }
            StmtKindTag::Try => {
                self.branch(s, BranchKind::TryBody, src);
                let catches: Vec<_> = s.branches.iter().filter(|b| b.kind == BranchKind::Catch).collect();
                if !catches.is_empty() {
                    self.g.control_kinds.insert(s.id, ControlKind::Catch);
                    self.g.control_actions.insert(s.id, Vec::new());
                    self.add(NodeId::Control(s.id), "CONTROL(CATCH)".into(), s.span.start_line);
                    let atoms: Vec<u32> =
                        (0..catches.len()).map(|i| self.new_atom(s.id, format!("exception #{}", i + 1))).collect();
                    let mut exits = Vec::new();
                    let mut none_before = C::True;
                    for (b, a) in catches.iter().zip(&atoms) {
                        self.pending = vec![(NodeId::Control(s.id), none_before.clone().and(C::atom(*a)))];
                        self.seq(&b.stmts, src);
                        exits.append(&mut self.pending);
                        none_before = none_before.and(C::atom(*a).not());
                    }
                    exits.push((NodeId::Control(s.id), none_before));
                    self.pending = exits;
                }
                self.branch(s, BranchKind::Finally, src);
            }
            _ => {
                self.actions(&s.actions);
                for b in &s.branches {
                    self.seq(&b.stmts, src);
                }
            }
        }
    }
}

fn predicate_text(s: &StatementModel, src: &str) -> String {
    let text = src.get(s.span.start..s.span.end).unwrap_or("");
    let head = text.split(['{', '\n']).next().unwrap_or("").trim();
    head.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn action_label(mm: &MethodModel, a: &ActionModel) -> String {
    match a.kind {
        ActionKind::Def => match a.assigned_to {
            Some(VarRef::Local(_, i)) => format!("DEF({})", mm.locals[i].name),
            _ => "DEF".into(),
        },
        _ => a.label(),
    }
}

/// Locals that are plain copies (possibly cast) of another variable map to it.
fn copy_roots(mm: &MethodModel) -> HashMap<VarRef, VarRef> {
    let mut out = HashMap::new();
    for a in &mm.actions {
        if let (ActionKind::Def, Some(to @ VarRef::Local(..)), Some(src), false) =
            (a.kind, a.assigned_to, a.value_root, a.mutates_target)
        {
            out.entry(to).or_insert(src);
        }
    }
    out
}

fn canon(copies: &HashMap<VarRef, VarRef>, mut v: VarRef) -> VarRef {
    for _ in 0..copies.len() {
        match copies.get(&v) {
            Some(s) if *s != v => v = *s,
            _ => break,
        }
    }
    v
}

fn param_index(callee: &MethodModel, i: usize) -> Option<usize> {
    let n = callee.param_types.len();
    if i < n {
        Some(i)
    } else if callee.varargs && n > 0 {
        Some(n - 1)
    } else {
        None
    }
}

/// Reads and writes of one test action, with callee effects mapped onto the
/// caller's variables.
fn access_sets(
    model: &ProjectModel,
    effects: &EffectTable,
    mm: &MethodModel,
    copies: &HashMap<VarRef, VarRef>,
    a: &ActionModel,
) -> (BTreeSet<DataVar>, BTreeSet<DataVar>) {
    let mut r = BTreeSet::new();
    let mut w = BTreeSet::new();
    let recv = a.receiver_var.map(|v| canon(copies, v));
    for v in a.uses.iter().chain(a.receiver_var.iter()).chain(a.arg_vars.iter().flatten()) {
        r.insert(DataVar::Var(*v));
    }
    if let Some(to) = a.assigned_to {
        if a.mutates_target {
            r.insert(DataVar::Var(to));
            w.insert(DataVar::Whole(canon(copies, to)));
        } else {
            w.insert(DataVar::Var(to));
        }
    }
    // Field key as seen from the test: direct for static fields and fields of
    // the test object, per object otherwise.
    let key = |f: FieldId, obj: Option<VarRef>, on_this: bool| -> Option<DataVar> {
        if model.field(f).is_static || on_this {
            Some(DataVar::Var(VarRef::Field(f)))
        } else {
            obj.map(|o| DataVar::Attr(o, f))
        }
    };
    match (&a.kind, &a.callee) {
        (ActionKind::FieldAccess, Callee::Field(f)) => {
            let on_this = a.on_this || (a.receiver_var.is_none() && a.receiver_action.is_none());
            if let Some(k) = key(*f, recv, on_this) {
                match a.access {
                    Some(Acc::W) => w.insert(k),
                    _ => r.insert(k),
                };
            }
        }
        (ActionKind::Invocation | ActionKind::Instantiation, Callee::System(m)) => {
            let callee = model.method(*m);
            let inst = a.kind == ActionKind::Instantiation;
            let obj = if inst { a.assigned_to.map(|v| canon(copies, v)) } else { recv };
            let on_this = !inst && a.on_this && model.is_subtype(mm.owner, callee.owner);
            for f in effects.mod_set(*m) {
                if let Some(k) = key(f, obj, on_this) {
                    w.insert(k);
                }
            }
            let mut any_read = false;
            for f in effects.read_set(*m) {
                // a constructor reads instance fields of the fresh object only
                if inst && !model.field(f).is_static {
                    continue;
                }
                if let Some(k) = key(f, obj, on_this) {
                    any_read = true;
                    r.insert(k);
                }
            }
            if let (Some(o), true, false) = (obj, any_read, inst) {
                r.insert(DataVar::Whole(o));
            }
            for (i, v) in a.arg_vars.iter().enumerate() {
                let (Some(v), Some(p)) = (v, param_index(callee, i)) else { continue };
                let pv = VarRef::Local(*m, p);
                let root = canon(copies, *v);
                if effects.is_mut(*m, pv) {
                    w.insert(DataVar::Whole(root));
                }
                if effects.is_mut(*m, pv) || effects.is_ins(*m, pv) {
                    r.insert(DataVar::Whole(root));
                }
            }
        }
        (ActionKind::Invocation | ActionKind::Instantiation, _) => {
            if let Some(o) = recv {
                r.insert(DataVar::Whole(o));
                if crate::effects::is_mutating_name(&a.name) {
                    w.insert(DataVar::Whole(o));
                }
            }
            for v in a.arg_vars.iter().flatten() {
                r.insert(DataVar::Whole(canon(copies, *v)));
            }
        }
        _ => {}
    }
    (r, w)
}

/// Builds the graph for one test: nodes, control flow, reachability and
/// control dependencies, data dependencies.
pub fn build_usage_graph(model: &ProjectModel, effects: &EffectTable, test: &TestMethod) -> UsageGraph {
    build_for_method(model, effects, test.method)
}

pub fn build_for_method(model: &ProjectModel, effects: &EffectTable, m: MethodId) -> UsageGraph {
    let mm = model.method(m);
    let src = model.source_of(m);
    let mut b = Builder { mm, g: UsageGraph { method: Some(m), ..Default::default() }, pending: Vec::new() };
    b.g.nodes.push(Node { id: NodeId::Entry, label: "ENTRY".into(), line: mm.span.start_line });
    b.pending = vec![(NodeId::Entry, SymbolicCondition::True)];
    b.seq(&mm.body, src);
    let mut g = b.g;
    let copies = copy_roots(mm);
    for a in &mm.actions {
        let (r, w) = access_sets(model, effects, mm, &copies, a);
        g.reads.insert(a.id, r);
        g.writes.insert(a.id, w);
    }
    compute_cd(&mut g);
    compute_dd(&mut g, mm);
    g
}

impl UsageGraph {
    pub fn successors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.cf.range((n, NodeId::Entry)..).take_while(move |((a, _), _)| *a == n).map(|((_, b), _)| *b)
    }

    pub fn predecessors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.cf.keys().filter(move |(_, b)| *b == n).map(|(a, _)| *a)
    }

    pub fn cf_of(&self, a: NodeId, b: NodeId) -> SymbolicCondition {
        self.cf.get(&(a, b)).cloned().unwrap_or(SymbolicCondition::False)
    }

    pub fn control_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.control_kinds.keys().copied()
    }

    /// Atoms that belong to the control statement `stmt`.
    pub fn atoms_of(&self, stmt: usize) -> impl Iterator<Item = u32> + '_ {
        self.atoms.iter().enumerate().filter(move |(_, (s, _))| *s == stmt).map(|(i, _)| i as u32)
    }

    pub fn action_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().filter_map(|n| match n.id {
            NodeId::Action(a) => Some(a),
            _ => None,
        })
    }

    /// Classification of the accesses of `i` and `j` to `v`; `None` when they
    /// do not share it. A write takes precedence when an action both reads
    /// and writes.
    pub fn data_relation(&self, i: usize, j: usize, v: DataVar) -> Result<Option<DataRelation>, UsageGraphError> {
        if i >= j {
            return Err(UsageGraphError::OrderViolation(i, j));
        }
        let acc = |a: usize| -> Option<Acc> {
            if self.writes.get(&a).is_some_and(|s| s.contains(&v)) {
                Some(Acc::W)
            } else if self.reads.get(&a).is_some_and(|s| s.contains(&v)) {
                Some(Acc::R)
            } else {
                None
            }
        };
        let read_j = self.reads.get(&j).is_some_and(|s| s.contains(&v));
        Ok(match (acc(i), acc(j)) {
            (Some(Acc::W), Some(_)) if read_j => Some(DataRelation::WR),
            (Some(Acc::W), Some(_)) => Some(DataRelation::WW),
            (Some(Acc::R), Some(Acc::W)) => Some(DataRelation::RW),
            (Some(Acc::R), Some(Acc::R)) => Some(DataRelation::RR),
            _ => None,
        })
    }

    /// For each action, the actions reachable from it along temporal edges.
    pub fn action_paths(&self) -> BTreeMap<usize, BTreeSet<usize>> {
        let mut out: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        // nodes were added in a topological order
        let mut desc: HashMap<NodeId, BTreeSet<usize>> = HashMap::new();
        for n in self.nodes.iter().rev() {
            let mut d = BTreeSet::new();
            for s in self.successors(n.id) {
                if let NodeId::Action(a) = s {
                    d.insert(a);
                }
                if let Some(x) = desc.get(&s) {
                    d.extend(x.iter().copied());
                }
            }
            if let NodeId::Action(a) = n.id {
                out.insert(a, d.clone());
            }
            desc.insert(n.id, d);
        }
        out
    }

    /// Writers of `v` with a temporal path to `j` on which no other action
    /// writes `v` (reaching definitions).
    fn reaching_writers(&self, preds: &BTreeMap<NodeId, Vec<NodeId>>, v: DataVar, j: usize) -> BTreeSet<usize> {
        let writes = |a: usize| self.writes.get(&a).is_some_and(|w| w.contains(&v));
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = preds.get(&NodeId::Action(j)).cloned().unwrap_or_default();
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            if let NodeId::Action(k) = n {
                if writes(k) {
                    out.insert(k);
                    continue;
                }
            }
            stack.extend(preds.get(&n).into_iter().flatten().copied());
        }
        out
    }

    fn predecessor_map(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut m: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for (a, b) in self.cf.keys() {
            m.entry(*b).or_default().push(*a);
        }
        m
    }

    /// Actions whose write of `v` reaches `j`.
    pub fn reaching_definitions(&self, v: DataVar, j: usize) -> BTreeSet<usize> {
        self.reaching_writers(&self.predecessor_map(), v, j)
    }

    /// `i` writes something `j` reads and reaches it along some path free of
    /// other writes.
    pub fn data_dependency(&self, i: usize, j: usize) -> bool {
        if i >= j {
            return false;
        }
        let preds = self.predecessor_map();
        self.reads.get(&j).into_iter().flatten().any(|v| self.reaching_writers(&preds, *v, j).contains(&i))
    }

    /// Actions `a` depends on through data: last writers of what it reads,
    /// actions whose results it consumes, and the declaration of a local it
    /// reassigns.
    pub fn dd_set(&self, a: usize) -> BTreeSet<usize> {
        self.data_edges.keys().filter(|(_, to)| *to == a).map(|(from, _)| *from).collect()
    }

    /// Control nodes `n` depends on, with the actions of their statements.
    pub fn cd_set(&self, n: NodeId) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for (c, _) in self.control_edges.iter().filter(|(_, to)| *to == n) {
            out.insert(*c);
            if let NodeId::Control(s) = c {
                out.extend(self.control_actions.get(s).into_iter().flatten().map(|a| NodeId::Action(*a)));
            }
        }
        out
    }

    /// Union of data and control dependencies of a node.
    pub fn dependencies(&self, n: NodeId) -> BTreeSet<NodeId> {
        let mut out = self.cd_set(n);
        if let NodeId::Action(a) = n {
            out.extend(self.dd_set(a).into_iter().map(NodeId::Action));
        }
        out
    }

    pub fn to_dot(&self, model: &ProjectModel) -> String {
        let name = |n: &NodeId| match n {
            NodeId::Entry => "entry".to_string(),
            NodeId::Action(a) => format!("a{a}"),
            NodeId::Control(s) => format!("c{s}"),
        };
        let title = self.method.map(|m| model.test_id(m)).unwrap_or_default();
        let mut out = format!("digraph \"{}\" {{\n", escape(&title));
        for n in &self.nodes {
            let shape = match n.id {
                NodeId::Control(_) => "diamond",
                NodeId::Entry => "point",
                NodeId::Action(_) => "box",
            };
            let _ = writeln!(out, "  {} [label=\"{}\", shape={shape}];", name(&n.id), escape(&n.label));
        }
        for ((a, b), c) in &self.cf {
            let label = match c {
                SymbolicCondition::True => String::new(),
                c => format!(", label=\"{}\"", escape(&c.to_string())),
            };
            let _ = writeln!(out, "  {} -> {} [style=solid{label}];", name(a), name(b));
        }
        for (a, b) in &self.control_edges {
            let _ = writeln!(out, "  {} -> {} [style=solid, penwidth=0.5, color=gray40];", name(a), name(b));
        }
        for ((a, b), k) in &self.data_edges {
            let style = match k {
                EdgeKind::Inter => "dashed",
                EdgeKind::Intra => "dotted",
            };
            let _ = writeln!(out, "  a{a} -> a{b} [style={style}, constraint=false];");
        }
        out.push_str("}\n");
        out
    }
}

/// Reachability conditions by worklist from the entry, then control edges:
/// a node depends on a control node when the reachability formula depends on
/// one of its atoms and no control node nested inside it does as well.
pub fn compute_cd(g: &mut UsageGraph) {
    let mut reach: BTreeMap<NodeId, SymbolicCondition> = BTreeMap::new();
    reach.insert(NodeId::Entry, SymbolicCondition::True);
    let mut work: VecDeque<NodeId> = g.successors(NodeId::Entry).collect();
    while let Some(n) = work.pop_front() {
        let r = g
            .predecessors(n)
            .map(|p| reach.get(&p).cloned().unwrap_or(SymbolicCondition::False).and(g.cf_of(p, n)))
            .fold(SymbolicCondition::False, SymbolicCondition::or)
            .simplify();
        let changed = reach.get(&n).is_none_or(|old| !old.equivalent(&r));
        if changed {
            reach.insert(n, r);
            work.extend(g.successors(n));
        }
    }
    let atom_owner: Vec<usize> = g.atoms.iter().map(|(s, _)| *s).collect();
    let essential = |f: &SymbolicCondition| -> BTreeSet<usize> {
        f.atoms().into_iter().filter(|a| f.depends_on(*a)).map(|a| atom_owner[a as usize]).collect()
    };
    let ctrl_essential: BTreeMap<usize, BTreeSet<usize>> = g
        .control_nodes()
        .map(|s| (s, reach.get(&NodeId::Control(s)).map(&essential).unwrap_or_default()))
        .collect();
    let mut edges = BTreeSet::new();
    for n in &g.nodes {
        let Some(f) = reach.get(&n.id) else { continue };
        let ess = essential(f);
        for c in &ess {
            if NodeId::Control(*c) == n.id {
                continue;
            }
            let shadowed = ess.iter().any(|c2| c2 != c && ctrl_essential.get(c2).is_some_and(|e| e.contains(c)));
            if !shadowed {
                edges.insert((NodeId::Control(*c), n.id));
            }
        }
    }
    g.reachability = reach;
    g.control_edges = edges;
}

fn compute_dd(g: &mut UsageGraph, mm: &MethodModel) {
    let mut edges: BTreeMap<(usize, usize), EdgeKind> = BTreeMap::new();
    let preds = g.predecessor_map();
    for j in 0..mm.actions.len() {
        for v in g.reads.get(&j).into_iter().flatten() {
            for i in g.reaching_writers(&preds, *v, j) {
                let kind = match v {
                    DataVar::Var(VarRef::Local(..)) => EdgeKind::Intra,
                    _ => EdgeKind::Inter,
                };
                let e = edges.entry((i, j)).or_insert(kind);
                *e = (*e).max(kind);
            }
        }
    }
    for a in &mm.actions {
        for i in a.inputs.iter().chain(a.receiver_action.iter()) {
            if *i < a.id {
                edges.entry((*i, a.id)).or_insert(EdgeKind::Intra);
            }
        }
        if let (Some(v @ VarRef::Local(..)), false) = (a.assigned_to, a.declares) {
            if let Some(d) = mm.actions[..a.id].iter().find(|d| d.declares && d.assigned_to == Some(v)) {
                edges.entry((d.id, a.id)).or_insert(EdgeKind::Intra);
            }
        }
    }
    g.data_edges = edges;
}
