//! Usage example synthesis: dependency closure of each focal action, rendered
//! back to the test's own source text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::focal::{FocalAction, TestFocal};
use crate::ingest::{ActionKind, BranchKind, Callee, MethodId, MethodModel, ProjectModel, StatementModel, StmtKindTag, VarRef};
use crate::testmodel::TestMethod;
use crate::usagegraph::{DataVar, NodeId, UsageGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompletenessHint {
    SelfContained,
    UsesFixtureState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    ReadRead,
    WriteRead,
    WriteWrite,
    Independent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedStatement {
    pub line: u32,
    pub text: String,
    /// Byte range in the test's source file.
    #[serde(default)]
    pub span: (usize, usize),
    /// Nesting depth inside rendered control statements.
    #[serde(default)]
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub focal: String,
    pub source_test: String,
    /// Action id of the focal call within the test method.
    #[serde(default)]
    pub focal_action: usize,
    #[serde(default)]
    pub focal_line: u32,
    #[serde(default)]
    pub included_actions: BTreeSet<usize>,
    pub merged_focals: Vec<String>,
    pub statements: Vec<RenderedStatement>,
    pub completeness_hint: CompletenessHint,
    pub undeclared_identifiers: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSet {
    pub project: String,
    pub examples: Vec<Example>,
}

/// Non-local state an action touches.
fn state(vars: Option<&BTreeSet<DataVar>>) -> BTreeSet<DataVar> {
    vars.into_iter().flatten().copied().filter(|v| !matches!(v, DataVar::Var(VarRef::Local(..)))).collect()
}

/// How the later focal `f2` relates to the earlier `f1` through the state
/// both touch. A write read by `f2` without being rewritten by it links the
/// two uses; an earlier read followed by a write does not.
pub fn classify_sequence(g: &UsageGraph, f1: usize, f2: usize) -> SequenceKind {
    let (f1, f2) = (f1.min(f2), f1.max(f2));
    let (r1, w1) = (state(g.reads.get(&f1)), state(g.writes.get(&f1)));
    let (r2, w2) = (state(g.reads.get(&f2)), state(g.writes.get(&f2)));
    let consumed = w1.intersection(&r2).any(|v| !w2.contains(v) && g.reaching_definitions(*v, f2).contains(&f1));
    if consumed {
        SequenceKind::WriteRead
    } else if !w1.is_disjoint(&w2) {
        SequenceKind::WriteWrite
    } else if !r1.is_disjoint(&r2) && w1.is_disjoint(&r2) && r1.is_disjoint(&w2) {
        SequenceKind::ReadRead
    } else {
        SequenceKind::Independent
    }
}

/// Slice of one focal action: closure of `{f}` under the data and
/// control dependency sets.
pub fn closure(g: &UsageGraph, f: usize) -> BTreeSet<NodeId> {
    let mut result = BTreeSet::from([NodeId::Action(f)]);
    let mut work = vec![NodeId::Action(f)];
    while let Some(n) = work.pop() {
        for d in g.dependencies(n) {
            if result.insert(d) {
                work.push(d);
            }
        }
    }
    result
}

pub fn action_set(nodes: &BTreeSet<NodeId>) -> BTreeSet<usize> {
    nodes
        .iter()
        .filter_map(|n| match n {
            NodeId::Action(a) => Some(*a),
            _ => None,
        })
        .collect()
}

/// One example per distinct focal action of the test.
pub fn synthesize(model: &ProjectModel, g: &UsageGraph, test: &TestMethod, focal: &TestFocal) -> Vec<Example> {
    let focals: Vec<&FocalAction> = focal.focal_actions();
    let slices: Vec<BTreeSet<usize>> = focals.iter().map(|f| action_set(&closure(g, f.action))).collect();
    let mut out = Vec::new();
    for (k, f) in focals.iter().enumerate() {
        let merged: BTreeSet<String> = focals[..k]
            .iter()
            .filter(|f1| {
                f1.method_ref != f.method_ref
                    && slices[k].contains(&f1.action)
                    && classify_sequence(g, f1.action, f.action) == SequenceKind::WriteRead
            })
            .map(|f1| f1.method_ref.clone())
            .collect();
        let mut ex = render(model, test, &slices[k]);
        ex.focal = f.method_ref.clone();
        ex.focal_action = f.action;
        ex.focal_line = f.line;
        ex.merged_focals = merged.into_iter().collect();
        out.push(ex);
    }
    out
}

struct Item {
    line: u32,
    span: (usize, usize),
    depth: usize,
    actions: Vec<usize>,
    /// Name bound by a rendered catch clause.
    binds: Option<String>,
}

struct Renderer<'a> {
    mm: &'a MethodModel,
    src: &'a str,
    slice: &'a BTreeSet<usize>,
    /// Consuming action of each action's result.
    parent: BTreeMap<usize, usize>,
}

impl Renderer<'_> {
    fn item(&self, start: usize, end: usize, depth: usize, actions: Vec<usize>) -> Item {
        let line = line_at(self.src, start);
        Item { line, span: (start, end), depth, actions, binds: None }
    }

    /// The action plus everything that flows into it.
    fn subtree(&self, a: usize) -> Vec<usize> {
        let mut out = vec![a];
        let mut i = 0;
        while i < out.len() {
            let act = &self.mm.actions[out[i]];
            out.extend(act.inputs.iter().chain(act.receiver_action.iter()).copied());
            i += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Sliced actions of `actions` that are not part of another sliced action,
    /// each as a standalone expression statement.
    fn extract(&self, actions: &[usize], depth: usize, out: &mut Vec<Item>) {
        for &a in actions.iter().filter(|a| self.slice.contains(a)) {
            let mut p = self.parent.get(&a);
            let mut nested = false;
            while let Some(x) = p {
                if self.slice.contains(x) {
                    nested = true;
                    break;
                }
                p = self.parent.get(x);
            }
            if !nested {
                let sp = self.mm.actions[a].span;
                out.push(self.item(sp.start, sp.end, depth, self.subtree(a)));
            }
        }
    }

    fn block(&self, stmts: &[StatementModel], depth: usize, out: &mut Vec<Item>) {
        for s in stmts {
            self.stmt(s, depth, out);
        }
    }

    fn stmt(&self, s: &StatementModel, depth: usize, out: &mut Vec<Item>) {
        let any = |ids: &[usize]| ids.iter().any(|a| self.slice.contains(a));
        match s.kind {
            StmtKindTag::Assert | StmtKindTag::Fail => self.extract(&s.all_actions(), depth, out),
            _ if s.branches.is_empty() => {
                let all = s.all_actions();
                if any(&all) {
                    out.push(self.item(s.span.start, s.span.end, depth, all));
                }
            }
            _ => {
                let mut body = Vec::new();
                self.compound(s, depth, &mut body);
                if !body.is_empty() {
                    out.append(&mut body);
                } else {
                    self.extract(&s.actions, depth, out);
                }
            }
        }
    }

    /// A control statement with its branches pruned to rendered statements;
    /// nothing when no branch renders anything.
    fn compound(&self, s: &StatementModel, depth: usize, out: &mut Vec<Item>) {
        let rendered: Vec<Vec<Item>> = s
            .branches
            .iter()
            .map(|b| {
                let mut v = Vec::new();
                self.block(&b.stmts, depth + 1, &mut v);
                v
            })
            .collect();
        if rendered.iter().all(|r| r.is_empty()) {
            return;
        }
        let mut prev_end = s.span.start;
        let mut first = true;
        for (b, items) in s.branches.iter().zip(rendered) {
            // then branches and try clauses keep their header even when empty
            let keep = first || b.kind == BranchKind::Then || s.kind == StmtKindTag::Try;
            if items.is_empty() && !keep {
                prev_end = b.span.end;
                continue;
            }
            let open = if b.braced { b.span.start + 1 } else { b.span.start };
            let header_start = if first { s.span.start } else { prev_end };
            let own = if first { s.actions.clone() } else { Vec::new() };
            let mut head = self.item(header_start, open, depth, own);
            head.line = if first { s.span.start_line } else { line_at(self.src, skip_ws(self.src, header_start)) };
            head.span.0 = skip_ws(self.src, header_start);
            if b.kind == BranchKind::Catch {
                head.binds = catch_param(&self.src[head.span.0..head.span.1]);
            }
            if head.span.0 < head.span.1 {
                out.push(head);
            }
            out.extend(items);
            if b.braced {
                let close = b.span.end.saturating_sub(1);
                out.push(Item { line: b.span.end_line, span: (close, b.span.end), depth, actions: Vec::new(), binds: None });
            }
            prev_end = b.span.end;
            first = false;
        }
    }
}

fn skip_ws(src: &str, mut i: usize) -> usize {
    let b = src.as_bytes();
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

fn line_at(src: &str, offset: usize) -> u32 {
    src.as_bytes()[..offset.min(src.len())].iter().filter(|c| **c == b'\n').count() as u32 + 1
}

fn catch_param(header: &str) -> Option<String> {
    let inner = header.split_once('(')?.1.rsplit_once(')')?.0;
    inner.split_whitespace().last().map(str::to_string)
}

/// Source text with indentation removed from every line; a standalone
/// expression gets its terminating semicolon.
fn clean(text: &str, expression: bool) -> String {
    let lines: Vec<&str> = text.trim().lines().map(str::trim).collect();
    let mut out = lines.join("\n");
    if expression && !out.ends_with(';') {
        out.push(';');
    }
    out
}

/// Classes whose fields a test reaches without qualification.
fn fixture_classes(model: &ProjectModel, test: MethodId) -> Vec<crate::ingest::ClassId> {
    model.superclass_chain(model.method(test).owner)
}

fn undeclared(model: &ProjectModel, mm: &MethodModel, items: &[Item]) -> Vec<String> {
    let fixture = fixture_classes(model, mm.id);
    let mut declared: BTreeSet<String> = items.iter().filter_map(|i| i.binds.clone()).collect();
    let mut used: Vec<VarRef> = Vec::new();
    for a in items.iter().flat_map(|i| &i.actions) {
        let act = &mm.actions[*a];
        if act.declares {
            if let Some(VarRef::Local(_, i)) = act.assigned_to {
                declared.insert(mm.locals[i].name.clone());
            }
        } else {
            used.extend(act.assigned_to);
        }
        used.extend(act.uses.iter().chain(act.receiver_var.iter()).chain(act.arg_vars.iter().flatten()));
        if let (ActionKind::FieldAccess, Callee::Field(f), None, None) = (act.kind, &act.callee, act.receiver_var, act.receiver_action) {
            used.push(VarRef::Field(*f));
        }
    }
    let mut out = BTreeSet::new();
    for v in used {
        match v {
            VarRef::Local(m, i) if m == mm.id => {
                let name = &mm.locals[i].name;
                if !declared.contains(name) {
                    out.insert(name.clone());
                }
            }
            VarRef::Field(f) if fixture.contains(&model.field(f).owner) => {
                out.insert(model.field(f).name.clone());
            }
            _ => {}
        }
    }
    out.into_iter().collect()
}

/// Renders the statements of `test` that contain sliced actions, in source
/// order, as an example (focal fields left empty).
pub fn render(model: &ProjectModel, test: &TestMethod, slice: &BTreeSet<usize>) -> Example {
    let mm = model.method(test.method);
    let mut parent = BTreeMap::new();
    for a in &mm.actions {
        for i in a.inputs.iter().chain(a.receiver_action.iter()) {
            parent.insert(*i, a.id);
        }
    }
    let r = Renderer { mm, src: model.source_of(mm.id), slice, parent };
    let mut items = Vec::new();
    r.block(&mm.body, 0, &mut items);
    let undeclared_identifiers = undeclared(model, mm, &items);
    let statements = items
        .iter()
        .map(|i| {
            let expression = mm.actions.iter().any(|a| (a.span.start, a.span.end) == i.span);
            RenderedStatement { line: i.line, text: clean(&r.src[i.span.0..i.span.1], expression), span: i.span, depth: i.depth }
        })
        .collect();
    Example {
        focal: String::new(),
        source_test: test.id.clone(),
        focal_action: 0,
        focal_line: 0,
        included_actions: slice.clone(),
        merged_focals: Vec::new(),
        statements,
        completeness_hint: if undeclared_identifiers.is_empty() {
            CompletenessHint::SelfContained
        } else {
            CompletenessHint::UsesFixtureState
        },
        undeclared_identifiers,
    }
}

/// Statements of the fixture methods (`setUp` or `@Before`) the test runs
/// first, nearest class last so they appear in execution order.
pub fn fixture_prelude(model: &ProjectModel, test: &TestMethod) -> (Vec<RenderedStatement>, BTreeSet<String>) {
    let mut out = Vec::new();
    let mut assigned = BTreeSet::new();
    for c in fixture_classes(model, test.method).into_iter().rev() {
        for &m in &model.class(c).methods {
            let mm = model.method(m);
            let is_fixture = (mm.name == "setUp" && mm.param_types.is_empty()) || mm.annotations.iter().any(|a| a.name == "Before");
            if !is_fixture {
                continue;
            }
            let src = model.source_of(m);
            for s in &mm.body {
                let text = clean(&src[s.span.start..s.span.end], false);
                if text.starts_with("super.") {
                    continue;
                }
                out.push(RenderedStatement { line: s.span.start_line, text, span: (s.span.start, s.span.end), depth: 0 });
            }
            for a in &mm.actions {
                if let (Callee::Field(f), Some(crate::ingest::Acc::W)) = (&a.callee, a.access) {
                    assigned.insert(model.field(*f).name.clone());
                }
            }
        }
    }
    (out, assigned)
}

/// Prepends the fixture statements and drops the identifiers they assign.
pub fn inline_fixtures(model: &ProjectModel, test: &TestMethod, ex: &mut Example) {
    let (prelude, assigned) = fixture_prelude(model, test);
    if prelude.is_empty() {
        return;
    }
    ex.statements.splice(0..0, prelude);
    ex.undeclared_identifiers.retain(|n| !assigned.contains(n));
    if ex.undeclared_identifiers.is_empty() {
        ex.completeness_hint = CompletenessHint::SelfContained;
    }
}

/// `pkg.Class#name(T)` to `Class#name`.
pub fn short_ref(method_ref: &str) -> String {
    let head = method_ref.split('(').next().unwrap_or(method_ref);
    let (class, name) = head.split_once('#').unwrap_or((head, ""));
    let simple = class.rsplit('.').next().unwrap_or(class);
    let name = if name == "<init>" { simple } else { name };
    format!("{simple}#{name}")
}

pub fn to_markdown(set: &ExampleSet) -> String {
    let mut out = String::new();
    if !set.project.is_empty() {
        let _ = writeln!(out, "# Usage examples for {}\n", set.project);
    }
    for ex in &set.examples {
        let _ = writeln!(out, "### {}\n", short_ref(&ex.focal));
        let _ = writeln!(out, "from {}\n", short_ref(&ex.source_test));
        if !ex.merged_focals.is_empty() {
            let names: Vec<String> = ex.merged_focals.iter().map(|m| short_ref(m)).collect();
            let _ = writeln!(out, "also shows {}\n", names.join(", "));
        }
        out.push_str("```java\n");
        for s in &ex.statements {
            for line in s.text.lines() {
                let _ = writeln!(out, "{}{line}", "    ".repeat(s.depth));
            }
        }
        out.push_str("```\n\n");
    }
    out
}
