//! Class-name resolution and class-hierarchy-analysis call binding.

use crate::java::ast::TypeRef;

use super::model::{ClassId, MethodId, ProjectModel};

/// Resolves a type name as written inside `ctx` to a project class.
pub fn resolve_class(model: &ProjectModel, ctx: ClassId, name: &str) -> Option<ClassId> {
    if let Some(c) = model.class_by_name(name) {
        return Some(c);
    }
    let cls = model.class(ctx);
    let (first, rest) = match name.split_once('.') {
        Some((f, r)) => (f, Some(r)),
        None => (name, None),
    };
    let with_rest = |base: String| match rest {
        Some(r) => format!("{base}.{r}"),
        None => base,
    };
    for imp in &cls.imports {
        if imp.starts_with("static ") {
            continue;
        }
        if let Some(pkg) = imp.strip_suffix(".*") {
            if let Some(c) = model.class_by_name(&with_rest(format!("{pkg}.{first}"))) {
                return Some(c);
            }
        } else if imp.rsplit('.').next() == Some(first) {
            if let Some(c) = model.class_by_name(&with_rest(imp.clone())) {
                return Some(c);
            }
        }
    }
    if let Some(pkg) = &cls.package {
        if let Some(c) = model.class_by_name(&format!("{pkg}.{name}")) {
            return Some(c);
        }
    }
    if rest.is_none() {
        return model.find_class_simple(name);
    }
    None
}

/// Qualifies a type written in `ctx` when it names a project class.
pub fn resolve_type(model: &ProjectModel, ctx: ClassId, ty: &TypeRef) -> TypeRef {
    if ty.is_primitive() {
        return ty.clone();
    }
    match resolve_class(model, ctx, &ty.name) {
        Some(c) => TypeRef { name: model.class(c).qualified_name.clone(), dims: ty.dims },
        None => ty.clone(),
    }
}

/// Project class denoted by an already-resolved type (arrays are not classes).
pub fn class_of_type(model: &ProjectModel, ty: &TypeRef) -> Option<ClassId> {
    if ty.dims > 0 {
        return None;
    }
    model.class_by_name(&ty.name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    System(MethodId),
    Ambiguous,
    External,
}

fn arity_matches(model: &ProjectModel, m: MethodId, nargs: usize) -> bool {
    let mm = model.method(m);
    let n = mm.param_types.len();
    n == nargs || (mm.varargs && nargs + 1 >= n)
}

fn score(model: &ProjectModel, m: MethodId, args: &[Option<TypeRef>]) -> usize {
    let mm = model.method(m);
    let mut s = 0;
    for (i, a) in args.iter().enumerate() {
        let Some(a) = a else { continue };
        let Some(p) = mm.param_types.get(i).or(mm.param_types.last()) else { continue };
        if p.simple_name() == a.simple_name() && (p.dims == a.dims || mm.varargs) {
            s += 2;
        } else if p.name == "Object" || p.name == "java.lang.Object" {
            s += 1;
        }
    }
    // exact arity beats varargs expansion
    if mm.param_types.len() == args.len() {
        s += 1;
    }
    s
}

fn pick(model: &ProjectModel, cands: &[MethodId], args: &[Option<TypeRef>]) -> Option<MethodId> {
    let mut best: Option<(usize, MethodId)> = None;
    for &m in cands {
        let s = score(model, m, args);
        if best.is_none_or(|(bs, _)| s > bs) {
            best = Some((s, m));
        }
    }
    best.map(|(_, m)| m)
}

/// Finds the declaration `name(args)` visible from `c`, nearest supertype first.
pub fn lookup_method(model: &ProjectModel, c: ClassId, name: &str, args: &[Option<TypeRef>]) -> Option<MethodId> {
    let mut order = model.superclass_chain(c);
    for s in model.supertypes(c) {
        if !order.contains(&s) {
            order.push(s);
        }
    }
    // prefer a concrete declaration anywhere in the chain over an abstract one
    let mut abstract_hit = None;
    for k in order {
        let cands: Vec<MethodId> = model
            .class(k)
            .methods
            .iter()
            .copied()
            .filter(|m| {
                let mm = model.method(*m);
                mm.name == name && !mm.is_constructor && arity_matches(model, *m, args.len())
            })
            .collect();
        if let Some(m) = pick(model, &cands, args) {
            if model.method(m).ast.is_some() {
                return Some(m);
            }
            abstract_hit.get_or_insert(m);
        }
    }
    abstract_hit
}

/// Binds a virtual call on a receiver statically typed `recv`.
pub fn bind_method(model: &ProjectModel, recv: ClassId, name: &str, args: &[Option<TypeRef>]) -> Binding {
    let cls = model.class(recv);
    if !cls.is_interface && !cls.is_abstract {
        return match lookup_method(model, recv, name, args) {
            Some(m) => Binding::System(m),
            None => Binding::External,
        };
    }
    let impls = model.concrete_implementors(recv);
    let declared = lookup_method(model, recv, name, args);
    match impls.len() {
        0 => declared.map_or(Binding::External, Binding::System),
        1 => match lookup_method(model, impls[0], name, args) {
            Some(m) => Binding::System(m),
            None => declared.map_or(Binding::External, Binding::System),
        },
        _ => {
            let targets: Vec<Option<MethodId>> = impls.iter().map(|i| lookup_method(model, *i, name, args)).collect();
            let first = targets[0];
            if first.is_some() && targets.iter().all(|t| *t == first) {
                Binding::System(first.unwrap())
            } else if declared.is_none() && targets.iter().all(|t| t.is_none()) {
                Binding::External
            } else {
                Binding::Ambiguous
            }
        }
    }
}

/// Binds `new C(args)` to one of `C`'s constructors.
pub fn bind_constructor(model: &ProjectModel, c: ClassId, args: &[Option<TypeRef>]) -> Option<MethodId> {
    let cands: Vec<MethodId> = model
        .class(c)
        .methods
        .iter()
        .copied()
        .filter(|m| model.method(*m).is_constructor && arity_matches(model, *m, args.len()))
        .collect();
    pick(model, &cands, args)
}
