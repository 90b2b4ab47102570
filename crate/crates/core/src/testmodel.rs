//! JUnit test discovery, sub-scenario slicing, and asserted-expression resolution.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::ingest::{ActionModel, Callee, MethodId, MethodModel, ProjectModel, StatementModel, StmtKindTag, VarRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestStyle {
    JUnit3,
    JUnit4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Exclusion {
    NegativeBehavior,
    InheritedFixture,
    NonStandardAssert,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TestModelError {
    #[error("{test}: no assert statements")]
    NoAssertions { test: String },
    #[error("{test}:{line}: assertion does not reach a system expression")]
    UnresolvableAssertion { test: String, line: u32 },
}

/// Helper-variable chasing gives up after this many hops.
pub const MAX_HOPS: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct AssertedExpression {
    /// Statement id of the assert (or fail guard) this comes from.
    pub origin_assert: usize,
    pub raw_vars: Vec<VarRef>,
    /// System invocation, instantiation, or field access that is actually asserted.
    pub resolved_action: usize,
    /// Helper definitions chased to reach `resolved_action`, in chase order.
    pub resolution_path: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubScenario {
    pub index: usize,
    /// Top-level statement ids.
    pub action_statements: Vec<usize>,
    pub assert_statements: Vec<usize>,
    pub asserted: Vec<AssertedExpression>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestMethod {
    pub method: MethodId,
    pub id: String,
    pub style: TestStyle,
    pub sub_scenarios: Vec<SubScenario>,
    /// Top-level statements after the last oracle.
    pub trailing: Vec<usize>,
    pub excluded: Option<Exclusion>,
}

fn annotation<'a>(mm: &'a MethodModel, name: &str) -> Option<&'a crate::java::ast::Annotation> {
    mm.annotations.iter().find(|a| a.name == name || a.name.rsplit('.').next() == Some(name))
}

fn is_void(mm: &MethodModel) -> bool {
    mm.ret.as_ref().is_some_and(|t| t.name == "void" && t.dims == 0)
}

pub fn discover_tests(model: &ProjectModel) -> Vec<TestMethod> {
    let mut out = Vec::new();
    for c in model.classes.iter().filter(|c| c.in_test_root && !c.is_interface) {
        let inherited = c
            .superclass
            .as_deref()
            .and_then(|s| model.class_by_name(s))
            .is_some_and(|s| model.class(s).in_test_root);
        for &m in &c.methods {
            let mm = model.method(m);
            if mm.is_constructor || mm.ast.is_none() {
                continue;
            }
            let style = if annotation(mm, "Test").is_some() {
                TestStyle::JUnit4
            } else if mm.name.starts_with("test") && mm.is_public && !mm.is_static && is_void(mm) && mm.param_types.is_empty() {
                TestStyle::JUnit3
            } else {
                continue;
            };
            out.push(TestMethod {
                method: m,
                id: model.test_id(m),
                style,
                sub_scenarios: Vec::new(),
                trailing: Vec::new(),
                excluded: inherited.then_some(Exclusion::InheritedFixture),
            });
        }
    }
    out
}

fn try_fail_pattern(mm: &MethodModel, stmts: &[StatementModel]) -> bool {
    stmts.iter().any(|s| {
        let here = s.kind == StmtKindTag::Try
            && s.branches.iter().filter(|b| b.kind == crate::ingest::BranchKind::TryBody).any(|b| {
                b.stmts.windows(2).any(|w| {
                    w[1].kind == StmtKindTag::Fail
                        && w[0].all_actions().iter().any(|a| {
                            matches!(mm.actions[*a].kind, crate::ingest::ActionKind::Invocation | crate::ingest::ActionKind::Instantiation)
                        })
                })
            });
        here || s.branches.iter().any(|b| try_fail_pattern(mm, &b.stmts))
    })
}

/// Marks tests that check exceptional behavior: `@Test(expected = ...)`, or a
/// `fail(...)` right after a call inside a `try` block.
pub fn filter_negative(model: &ProjectModel, mut tests: Vec<TestMethod>) -> Vec<TestMethod> {
    for t in tests.iter_mut().filter(|t| t.excluded.is_none()) {
        let mm = model.method(t.method);
        let expected = annotation(mm, "Test").is_some_and(|a| a.args.iter().any(|(k, _)| k == "expected"));
        if expected || try_fail_pattern(mm, &mm.body) {
            t.excluded = Some(Exclusion::NegativeBehavior);
        }
    }
    tests
}

/// `if (...) fail(...)` with nothing else in the branch.
fn is_fail_guard(s: &StatementModel) -> bool {
    s.kind == StmtKindTag::If
        && s.branches.len() == 1
        && !s.branches[0].stmts.is_empty()
        && s.branches[0].stmts.iter().all(|c| c.kind == StmtKindTag::Fail)
}

/// Top-level statements that belong to the oracle part.
pub fn is_oracle(s: &StatementModel) -> bool {
    matches!(s.kind, StmtKindTag::Assert | StmtKindTag::Fail) || is_fail_guard(s) || s.contains_kind(StmtKindTag::Assert)
}

/// Greedy partition of the top-level statements into runs of action
/// statements each closed by a run of oracle statements. A control statement
/// with nested asserts closes a run like a plain assert.
pub fn slice_sub_scenarios(model: &ProjectModel, test: &TestMethod) -> Result<(Vec<SubScenario>, Vec<usize>), TestModelError> {
    let mm = model.method(test.method);
    let mut out = Vec::new();
    let mut actions = Vec::new();
    let mut asserts: Vec<usize> = Vec::new();
    for s in &mm.body {
        if is_oracle(s) {
            asserts.push(s.id);
        } else {
            if !asserts.is_empty() {
                out.push(SubScenario {
                    index: out.len(),
                    action_statements: std::mem::take(&mut actions),
                    assert_statements: std::mem::take(&mut asserts),
                    asserted: Vec::new(),
                });
            }
            actions.push(s.id);
        }
    }
    if !asserts.is_empty() {
        out.push(SubScenario { index: out.len(), action_statements: std::mem::take(&mut actions), assert_statements: asserts, asserted: Vec::new() });
    }
    if out.is_empty() {
        return Err(TestModelError::NoAssertions { test: test.id.clone() });
    }
    Ok((out, actions))
}

fn find_stmt(stmts: &[StatementModel], id: usize) -> Option<&StatementModel> {
    for s in stmts {
        if s.id == id {
            return Some(s);
        }
        if let Some(f) = s.branches.iter().find_map(|b| find_stmt(&b.stmts, id)) {
            return Some(f);
        }
    }
    None
}

/// Statement by id anywhere in the body.
pub fn statement(mm: &MethodModel, id: usize) -> Option<&StatementModel> {
    find_stmt(&mm.body, id)
}

/// Assertion sites inside an oracle statement: asserts and fail guards,
/// including nested ones.
fn assert_sites<'a>(s: &'a StatementModel, out: &mut Vec<&'a StatementModel>) {
    if s.kind == StmtKindTag::Assert || is_fail_guard(s) {
        out.push(s);
        return;
    }
    for c in s.children() {
        assert_sites(c, out);
    }
}

fn is_system(a: &ActionModel) -> bool {
    a.callee.is_system()
}

struct Resolver<'a> {
    mm: &'a MethodModel,
}

impl Resolver<'_> {
    /// Outermost system actions in the subtrees rooted at `roots`, and the
    /// variables read inside subtrees that contain none.
    fn scan(&self, roots: &[usize]) -> (Vec<usize>, Vec<VarRef>) {
        let mut found = Vec::new();
        let mut vars = Vec::new();
        let mut queue: VecDeque<usize> = roots.iter().copied().collect();
        let mut seen = BTreeSet::new();
        while let Some(a) = queue.pop_front() {
            if !seen.insert(a) {
                continue;
            }
            let act = &self.mm.actions[a];
            if is_system(act) {
                found.push(a);
                continue;
            }
            for v in &act.uses {
                if !vars.contains(v) {
                    vars.push(*v);
                }
            }
            queue.extend(act.inputs.iter().copied());
        }
        (found, vars)
    }

    /// Last definition of `v` before action `point`.
    fn last_def(&self, v: VarRef, point: usize) -> Option<usize> {
        self.mm.actions[..point.min(self.mm.actions.len())].iter().rev().find(|a| a.assigned_to == Some(v)).map(|a| a.id)
    }

    fn chase(&self, v: VarRef, point: usize, path: &mut Vec<usize>, visited: &mut BTreeSet<usize>, out: &mut Vec<(usize, Vec<usize>)>) {
        if path.len() >= MAX_HOPS {
            return;
        }
        let Some(d) = self.last_def(v, point) else { return };
        if !visited.insert(d) {
            return;
        }
        path.push(d);
        let act = &self.mm.actions[d];
        if is_system(act) {
            out.push((d, path[..path.len() - 1].to_vec()));
        } else {
            let (found, vars) = self.scan(&act.inputs);
            let mut vars = vars;
            for u in &act.uses {
                if !vars.contains(u) {
                    vars.push(*u);
                }
            }
            if !found.is_empty() {
                for f in found {
                    out.push((f, path.clone()));
                }
            } else {
                for u in vars {
                    if u != v || self.last_def(u, d).is_some() {
                        self.chase(u, d, path, visited, out);
                    }
                }
            }
        }
        path.pop();
    }
}

/// Resolves every assertion of `ss` to the system expressions it inspects.
/// Assertions whose helper chain never reaches a system class are reported
/// as errors and contribute nothing.
pub fn resolve_asserted(model: &ProjectModel, test: &TestMethod, ss: &SubScenario) -> (Vec<AssertedExpression>, Vec<TestModelError>) {
    let mm = model.method(test.method);
    let r = Resolver { mm };
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for sid in &ss.assert_statements {
        let Some(top) = statement(mm, *sid) else { continue };
        let mut sites = Vec::new();
        assert_sites(top, &mut sites);
        for site in sites {
            // roots: the assert call's direct inputs, or a guard's outermost predicate actions
            let (roots, direct_vars, point) = if site.kind == StmtKindTag::Assert {
                let Some(&call) = site.actions.last() else { continue };
                let act = &mm.actions[call];
                let first = site.actions.first().copied().unwrap_or(call);
                (act.inputs.clone(), act.uses.clone(), first)
            } else {
                let inner: BTreeSet<usize> = site.predicate_actions.iter().flat_map(|a| mm.actions[*a].inputs.iter().copied()).collect();
                let roots: Vec<usize> = site.predicate_actions.iter().copied().filter(|a| !inner.contains(a)).collect();
                let first = site.all_actions().first().copied().unwrap_or(0);
                (roots, site.predicate_uses.clone(), first)
            };
            let (found, mut vars) = r.scan(&roots);
            for v in direct_vars {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            let mut resolved: Vec<(usize, Vec<usize>)> = found.into_iter().map(|a| (a, Vec::new())).collect();
            if resolved.is_empty() {
                let mut visited = BTreeSet::new();
                for v in &vars {
                    r.chase(*v, point, &mut Vec::new(), &mut visited, &mut resolved);
                }
            }
            if resolved.is_empty() {
                errors.push(TestModelError::UnresolvableAssertion { test: test.id.clone(), line: site.span.start_line });
            }
            let mut seen = BTreeSet::new();
            for (a, path) in resolved {
                if seen.insert(a) {
                    out.push(AssertedExpression { origin_assert: site.id, raw_vars: vars.clone(), resolved_action: a, resolution_path: path });
                }
            }
        }
    }
    (out, errors)
}

fn uses_assert_that(mm: &MethodModel) -> bool {
    mm.actions.iter().any(|a| a.name == "assertThat" && !matches!(a.callee, Callee::System(_)))
}

/// Discovery, exclusion, slicing, and resolution for every test of the project.
pub fn analyze_tests(model: &ProjectModel) -> (Vec<TestMethod>, Vec<TestModelError>) {
    let mut tests = filter_negative(model, discover_tests(model));
    let mut errors = Vec::new();
    for t in tests.iter_mut() {
        if t.excluded.is_some() {
            continue;
        }
        if uses_assert_that(model.method(t.method)) {
            t.excluded = Some(Exclusion::NonStandardAssert);
            continue;
        }
        match slice_sub_scenarios(model, t) {
            Ok((subs, trailing)) => {
                t.sub_scenarios = subs;
                t.trailing = trailing;
            }
            Err(e) => {
                t.excluded = Some(Exclusion::NonStandardAssert);
                errors.push(e);
                continue;
            }
        }
        let snapshot = t.clone();
        for ss in t.sub_scenarios.iter_mut() {
            let (asserted, errs) = resolve_asserted(model, &snapshot, ss);
            ss.asserted = asserted;
            errors.extend(errs);
        }
    }
    (tests, errors)
}
