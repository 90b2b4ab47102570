//! Focal method detection: the last mutator whose state change an assertion inspects.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::effects::EffectTable;
use crate::ingest::{ActionKind, ActionModel, Callee, MethodId, MethodModel, ProjectModel, VarRef};
use crate::testmodel::{AssertedExpression, SubScenario, TestMethod};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FocalAction {
    /// Action id within the test method.
    pub action: usize,
    pub method: MethodId,
    pub method_ref: String,
    /// Variable whose mutation the assertion observes: an inspected field, or
    /// the focal method's parameter that receives the inspected object.
    pub witness_var: VarRef,
    pub witness_var_name: String,
    /// Statement id of the witnessing assertion.
    pub witness_assert: usize,
    /// The resolved asserted action that reads the witnessed state.
    pub inspector_action: usize,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubScenarioFocal {
    pub index: usize,
    pub focal_actions: Vec<FocalAction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestFocal {
    pub test_id: String,
    pub method: MethodId,
    pub sub_scenarios: Vec<SubScenarioFocal>,
    pub fm_tm: BTreeSet<String>,
}

impl TestFocal {
    /// Distinct focal actions of the test, in action order.
    pub fn focal_actions(&self) -> Vec<&FocalAction> {
        let mut seen = BTreeSet::new();
        let mut out: Vec<&FocalAction> =
            self.sub_scenarios.iter().flat_map(|s| &s.focal_actions).filter(|f| seen.insert(f.action)).collect();
        out.sort_by_key(|f| f.action);
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocalReport {
    pub tests: Vec<TestFocal>,
    /// `NoMutatorFound` notes, one per assertion without a preceding mutator.
    pub diagnostics: Vec<String>,
}

impl FocalReport {
    pub fn test(&self, id: &str) -> Option<&TestFocal> {
        self.tests.iter().find(|t| t.test_id == id)
    }
}

/// Root variable of the object an action operates on, following receiver
/// chains such as `a.b().c()` back to `a`.
fn receiver_root(mm: &MethodModel, a: &ActionModel) -> Option<VarRef> {
    let mut cur = a;
    loop {
        if let Some(v) = cur.receiver_var {
            return Some(v);
        }
        cur = &mm.actions[cur.receiver_action?];
    }
}

/// Variables that may hold (or contain) the object rooted at `seed`: the seed,
/// the variables it was copied or derived from, and objects constructed with
/// it as an argument.
pub fn lineage(mm: &MethodModel, seed: VarRef) -> BTreeSet<VarRef> {
    let mut l = BTreeSet::from([seed]);
    loop {
        let mut changed = false;
        for a in &mm.actions {
            let Some(to) = a.assigned_to else { continue };
            if l.contains(&to) {
                if let Some(src) = a.value_root {
                    changed |= l.insert(src);
                }
            }
            if a.kind == ActionKind::Instantiation && a.arg_vars.iter().flatten().any(|v| l.contains(v)) {
                changed |= l.insert(to);
            }
        }
        if !changed {
            return l;
        }
    }
}

/// Fields (and, for a direct field read, the field itself) that the resolved
/// action inspects.
fn inspected(effects: &EffectTable, a: &ActionModel) -> Vec<VarRef> {
    match a.callee {
        Callee::Field(f) => vec![VarRef::Field(f)],
        Callee::System(m) => effects.use_sets.get(&m).into_iter().flatten().map(|f| VarRef::Field(*f)).collect(),
        _ => Vec::new(),
    }
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

/// Why `a` counts as a mutator of the inspected state, if it does.
fn witness(
    model: &ProjectModel,
    effects: &EffectTable,
    a: &ActionModel,
    vars: &[VarRef],
    lin: &BTreeSet<VarRef>,
) -> Option<VarRef> {
    let Callee::System(m) = a.callee else { return None };
    if !matches!(a.kind, ActionKind::Invocation | ActionKind::Instantiation) {
        return None;
    }
    let on_lineage = match a.kind {
        ActionKind::Instantiation => a.assigned_to.is_some_and(|v| lin.contains(&v)),
        _ => a.receiver_var.is_some_and(|v| lin.contains(&v)),
    };
    for v in vars {
        let is_static = matches!(v, VarRef::Field(f) if model.field(*f).is_static);
        if (on_lineage || is_static) && effects.is_mut(m, *v) {
            return Some(*v);
        }
    }
    let callee = model.method(m);
    a.arg_vars.iter().enumerate().find_map(|(i, v)| {
        let p = param_index(callee, i)?;
        (v.is_some_and(|v| lin.contains(&v)) && effects.mutates_param(m, p)).then_some(VarRef::Local(m, p))
    })
}

/// Last mutator, over the whole test body before the inspecting action, of
/// the state that `ae` reads.
pub fn focal_of_assertion(
    model: &ProjectModel,
    effects: &EffectTable,
    test: &TestMethod,
    ae: &AssertedExpression,
) -> Option<FocalAction> {
    let mm = model.method(test.method);
    let r = &mm.actions[ae.resolved_action];
    let vars = inspected(effects, r);
    let lin = receiver_root(mm, r).map(|v| lineage(mm, v)).unwrap_or_default();
    mm.actions[..r.id].iter().rev().find_map(|a| {
        let w = witness(model, effects, a, &vars, &lin)?;
        let Callee::System(m) = a.callee else { return None };
        Some(FocalAction {
            action: a.id,
            method: m,
            method_ref: model.method_ref(m),
            witness_var: w,
            witness_var_name: model.var_name(w),
            witness_assert: ae.origin_assert,
            inspector_action: r.id,
            line: a.span.start_line,
        })
    })
}

/// Focal actions of one sub-scenario, one per assertion that has a mutator,
/// deduplicated by action.
pub fn focal_of_subscenario(
    model: &ProjectModel,
    effects: &EffectTable,
    test: &TestMethod,
    ss: &SubScenario,
    diagnostics: &mut Vec<String>,
) -> Vec<FocalAction> {
    let mut out: BTreeMap<usize, FocalAction> = BTreeMap::new();
    for ae in &ss.asserted {
        match focal_of_assertion(model, effects, test, ae) {
            Some(f) => {
                out.entry(f.action).or_insert(f);
            }
            None => {
                let mm = model.method(test.method);
                diagnostics.push(format!(
                    "NoMutatorFound {} line {}: {}",
                    test.id,
                    mm.actions[ae.resolved_action].span.start_line,
                    mm.actions[ae.resolved_action].label()
                ));
            }
        }
    }
    out.into_values().collect()
}

pub fn focal_of_test(model: &ProjectModel, effects: &EffectTable, test: &TestMethod, diagnostics: &mut Vec<String>) -> TestFocal {
    let sub_scenarios: Vec<SubScenarioFocal> = test
        .sub_scenarios
        .iter()
        .map(|ss| SubScenarioFocal { index: ss.index, focal_actions: focal_of_subscenario(model, effects, test, ss, diagnostics) })
        .collect();
    let fm_tm = sub_scenarios.iter().flat_map(|s| s.focal_actions.iter().map(|f| f.method_ref.clone())).collect();
    TestFocal { test_id: test.id.clone(), method: test.method, sub_scenarios, fm_tm }
}

/// Focal methods of every analyzed (non-excluded) test.
pub fn focal_report(model: &ProjectModel, effects: &EffectTable, tests: &[TestMethod]) -> FocalReport {
    let mut report = FocalReport::default();
    for t in tests.iter().filter(|t| t.excluded.is_none()) {
        let tf = focal_of_test(model, effects, t, &mut report.diagnostics);
        report.tests.push(tf);
    }
    report
}
