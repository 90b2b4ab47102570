//! Field-access tracing and mutator/inspector classification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::callgraph::{CallGraphError, CallGraphModel};
use crate::ingest::{Acc, ActionKind, ActionModel, Callee, FieldId, MethodId, MethodModel, ProjectModel, VarRef};

/// Reference to one action of one method body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ActionRef {
    pub method: MethodId,
    pub action: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessRecord {
    pub action: ActionRef,
    pub var: VarRef,
    pub acc: Acc,
}

/// Name prefixes of library methods assumed to modify their receiver
/// (`map.put`, `list.add`, ...). Other external calls only read it.
pub const MUTATING_PREFIXES: &[&str] = &[
    "put", "add", "remove", "clear", "set", "append", "insert", "delete", "push", "pop", "poll", "offer", "retain",
    "replace", "fill", "sort",
];

pub fn is_mutating_name(name: &str) -> bool {
    MUTATING_PREFIXES.iter().any(|p| {
        name.strip_prefix(p).is_some_and(|rest| rest.is_empty() || rest.starts_with(|c: char| c.is_uppercase()))
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EffectTable {
    #[serde(rename = "mut")]
    pub mut_: BTreeSet<(MethodId, VarRef)>,
    pub ins: BTreeSet<(MethodId, VarRef)>,
    pub mod_sets: BTreeMap<MethodId, BTreeSet<FieldId>>,
    pub use_sets: BTreeMap<MethodId, BTreeSet<FieldId>>,
    /// Every class field the method chain reads, whether or not it also writes it.
    pub read_sets: BTreeMap<MethodId, BTreeSet<FieldId>>,
}

/// Locals that alias a field or parameter of `m`: assigned (possibly through
/// casts or calls) from an expression rooted at one. Flow-insensitive; the
/// first rooted assignment wins.
pub fn aliases(mm: &MethodModel) -> HashMap<usize, VarRef> {
    let nparams = mm.param_types.len();
    let mut out: HashMap<usize, VarRef> = HashMap::new();
    loop {
        let mut changed = false;
        for a in &mm.actions {
            let (Some(VarRef::Local(_, idx)), Some(src)) = (a.assigned_to, a.value_root) else { continue };
            if idx < nparams || out.contains_key(&idx) || a.mutates_target {
                continue;
            }
            let root = match src {
                VarRef::Field(_) => Some(src),
                VarRef::Local(_, j) if j < nparams => Some(src),
                VarRef::Local(_, j) => out.get(&j).copied(),
            };
            if let Some(r) = root {
                out.insert(idx, r);
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

struct Roots<'a> {
    mm: &'a MethodModel,
    alias: HashMap<usize, VarRef>,
}

impl Roots<'_> {
    /// The field or parameter a variable stands for, if any.
    fn root(&self, v: VarRef) -> Option<VarRef> {
        match v {
            VarRef::Field(_) => Some(v),
            VarRef::Local(_, i) if i < self.mm.param_types.len() => Some(v),
            VarRef::Local(_, i) => self.alias.get(&i).copied(),
        }
    }

    fn is_param(&self, v: VarRef) -> bool {
        self.mm.is_param(v)
    }
}

fn direct(roots: &Roots, a: &ActionModel, out: &mut Vec<(VarRef, Acc)>) {
    let recv_root = a.receiver_var.and_then(|v| roots.root(v));
    match a.kind {
        ActionKind::FieldAccess => {
            let (Callee::Field(f), Some(acc)) = (&a.callee, a.access) else { return };
            out.push((VarRef::Field(*f), acc));
            if let Some(r) = recv_root {
                out.push((r, acc));
            }
        }
        ActionKind::Def => {
            if a.mutates_target {
                if let Some(r) = a.assigned_to.and_then(|v| roots.root(v)) {
                    out.push((r, Acc::W));
                }
            }
        }
        ActionKind::Invocation | ActionKind::Instantiation => {
            if let Some(r) = recv_root {
                match &a.callee {
                    Callee::System(_) => out.push((r, Acc::R)),
                    _ => out.push((r, if is_mutating_name(&a.name) { Acc::W } else { Acc::R })),
                }
            }
            for v in a.arg_vars.iter().flatten() {
                if roots.is_param(*v) {
                    out.push((*v, Acc::R));
                }
            }
        }
    }
}

/// Index of the callee parameter that receives argument `i`.
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

/// Records every read and write of a class field or parameter by each action
/// of the methods in `g`. Besides direct accesses, a call to a project method
/// that mutates its receiver (or one of its parameters) counts as a write on
/// the caller-side root of that receiver (or argument); these derived records
/// depend on the callee's classification, so they are computed to a fixpoint.
pub fn collect_accesses(model: &ProjectModel, g: &CallGraphModel) -> BTreeSet<AccessRecord> {
    let mut records = BTreeSet::new();
    let roots: BTreeMap<MethodId, Roots> = g
        .methods()
        .map(|m| {
            let mm = model.method(m);
            (m, Roots { mm, alias: aliases(mm) })
        })
        .collect();
    for (m, r) in &roots {
        for a in &r.mm.actions {
            let mut acc = Vec::new();
            direct(r, a, &mut acc);
            for (var, acc) in acc {
                records.insert(AccessRecord { action: ActionRef { method: *m, action: a.id }, var, acc });
            }
        }
    }
    loop {
        let table = classify_effects(model, g, &records);
        let mut added = false;
        for (m, r) in &roots {
            for a in &r.mm.actions {
                let Callee::System(c) = a.callee else { continue };
                let here = ActionRef { method: *m, action: a.id };
                let callee = model.method(c);
                let mut derived = Vec::new();
                if !a.on_this && a.kind == ActionKind::Invocation {
                    if let Some(root) = a.receiver_var.and_then(|v| r.root(v)) {
                        if table.mod_sets.get(&c).is_some_and(|s| !s.is_empty()) {
                            derived.push(root);
                        }
                    }
                }
                for (i, v) in a.arg_vars.iter().enumerate() {
                    let (Some(v), Some(p)) = (v, param_index(callee, i)) else { continue };
                    if let Some(root) = r.root(*v) {
                        if table.mut_.contains(&(c, VarRef::Local(c, p))) {
                            derived.push(root);
                        }
                    }
                }
                for var in derived {
                    added |= records.insert(AccessRecord { action: here, var, acc: Acc::W });
                }
            }
        }
        if !added {
            return records;
        }
    }
}

/// Actions of `m` and of every method in its call chain.
pub fn method_chain_actions(
    model: &ProjectModel,
    g: &CallGraphModel,
    m: MethodId,
) -> Result<BTreeSet<ActionRef>, CallGraphError> {
    let mut chain = g.call_chain(m)?;
    chain.insert(m);
    Ok(chain
        .into_iter()
        .flat_map(|k| (0..model.method(k).actions.len()).map(move |action| ActionRef { method: k, action }))
        .collect())
}

/// `(m, v)` is a mutator pair when some action in `m`'s chain writes `v`, an
/// instance or static field visible in `m`'s class or a parameter of `m`; an
/// inspector pair when such an action reads `v` and the pair is not a mutator.
pub fn classify_effects(model: &ProjectModel, g: &CallGraphModel, accesses: &BTreeSet<AccessRecord>) -> EffectTable {
    let mut by_method: BTreeMap<MethodId, Vec<(VarRef, Acc)>> = BTreeMap::new();
    for r in accesses {
        by_method.entry(r.action.method).or_default().push((r.var, r.acc));
    }
    let mut t = EffectTable::default();
    for m in g.methods() {
        let mm = model.method(m);
        let fields: BTreeSet<FieldId> = model.class_fields(mm.owner).into_iter().collect();
        let visible = |v: &VarRef| match v {
            VarRef::Field(f) => fields.contains(f),
            VarRef::Local(..) => mm.is_param(*v),
        };
        let mut chain = g.call_chain(m).unwrap_or_default();
        chain.insert(m);
        let mut writes = BTreeSet::new();
        let mut reads = BTreeSet::new();
        for k in chain {
            for (v, acc) in by_method.get(&k).into_iter().flatten() {
                if visible(v) {
                    match acc {
                        Acc::W => writes.insert(*v),
                        Acc::R => reads.insert(*v),
                    };
                }
            }
        }
        let mods = t.mod_sets.entry(m).or_default();
        for v in &writes {
            t.mut_.insert((m, *v));
            if let VarRef::Field(f) = v {
                mods.insert(*f);
            }
        }
        let uses = t.use_sets.entry(m).or_default();
        let all_reads = t.read_sets.entry(m).or_default();
        for v in &reads {
            if let VarRef::Field(f) = v {
                all_reads.insert(*f);
            }
            if !writes.contains(v) {
                t.ins.insert((m, *v));
                if let VarRef::Field(f) = v {
                    uses.insert(*f);
                }
            }
        }
    }
    t
}

impl EffectTable {
    pub fn is_mut(&self, m: MethodId, v: VarRef) -> bool {
        self.mut_.contains(&(m, v))
    }

    pub fn is_ins(&self, m: MethodId, v: VarRef) -> bool {
        self.ins.contains(&(m, v))
    }

    /// Whether `m` mutates anything: a field of its class or a parameter.
    pub fn is_mutator(&self, m: MethodId) -> bool {
        self.mut_.range((m, VarRef::Field(FieldId(0)))..).next().is_some_and(|(k, _)| *k == m)
    }

    pub fn mutates_param(&self, m: MethodId, i: usize) -> bool {
        self.is_mut(m, VarRef::Local(m, i))
    }

    pub fn mod_set(&self, m: MethodId) -> impl Iterator<Item = FieldId> + '_ {
        self.mod_sets.get(&m).into_iter().flatten().copied()
    }

    pub fn read_set(&self, m: MethodId) -> impl Iterator<Item = FieldId> + '_ {
        self.read_sets.get(&m).into_iter().flatten().copied()
    }

    /// One `method<TAB>variable<TAB>MUT|INS` line per pair, sorted.
    pub fn to_tsv(&self, model: &ProjectModel) -> String {
        let mut lines: Vec<String> = self
            .mut_
            .iter()
            .map(|(m, v)| (m, v, "MUT"))
            .chain(self.ins.iter().map(|(m, v)| (m, v, "INS")))
            .map(|(m, v, k)| format!("{}\t{}\t{k}", model.method_ref(*m), var_label(model, *v)))
            .collect();
        lines.sort();
        let mut out = String::from("method\tvariable\tkind\n");
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

fn var_label(model: &ProjectModel, v: VarRef) -> String {
    match v {
        VarRef::Field(f) => model.field_ref(f),
        VarRef::Local(m, i) => format!("param:{}", model.method(m).locals[i].name),
    }
}
