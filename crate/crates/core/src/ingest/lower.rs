//! Lowering of method bodies to statements and actions.

use std::collections::HashMap;

use crate::java::ast::{Block, Expr, ExprKind, Literal, Span, Stmt, StmtKind, TypeRef};

use super::model::*;
use super::resolve::{bind_constructor, bind_method, class_of_type, lookup_method, resolve_class, resolve_type, Binding};

/// Recognized JUnit assertion methods.
pub const ASSERT_NAMES: &[&str] = &[
    "assertEquals",
    "assertTrue",
    "assertFalse",
    "assertNull",
    "assertNotNull",
    "assertSame",
    "assertNotSame",
    "assertArrayEquals",
];

const ASSERT_OWNERS: &[&str] = &["Assert", "TestCase", "junit.framework.Assert", "junit.framework.TestCase", "org.junit.Assert"];

pub fn is_assert_name(name: &str) -> bool {
    ASSERT_NAMES.contains(&name)
}

pub(crate) struct Lowered {
    pub locals: Vec<LocalVar>,
    pub body: Vec<StatementModel>,
    pub actions: Vec<ActionModel>,
    pub diagnostics: Vec<Diagnostic>,
}

pub(crate) fn lower_method(model: &ProjectModel, m: MethodId) -> Lowered {
    let mm = model.method(m);
    let mut lw = Lowerer {
        model,
        method: m,
        class: mm.owner,
        locals: mm.locals.iter().filter(|l| l.is_param).cloned().collect(),
        scopes: vec![HashMap::new()],
        actions: Vec::new(),
        next_stmt: 0,
        diagnostics: Vec::new(),
    };
    for (i, l) in lw.locals.iter().enumerate() {
        lw.scopes[0].insert(l.name.clone(), i);
    }
    let body = match &mm.ast {
        Some(b) => lw.stmts(&b.stmts),
        None => Vec::new(),
    };
    Lowered { locals: lw.locals, body, actions: lw.actions, diagnostics: lw.diagnostics }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Value,
    Receiver,
}

#[derive(Debug, Clone)]
enum ClassRef {
    System(ClassId),
    External(String),
}

/// Result of lowering one expression.
#[derive(Debug, Clone, Default)]
struct Val {
    /// Action producing the value, when the (cast/paren-stripped) expression is one.
    action: Option<usize>,
    root: Option<VarRef>,
    uses: Vec<VarRef>,
    inputs: Vec<usize>,
    ty: Option<TypeRef>,
    this_ref: bool,
    is_super: bool,
    class_ref: Option<ClassRef>,
}

impl Val {
    fn feed(&self, uses: &mut Vec<VarRef>, inputs: &mut Vec<usize>) {
        match self.action {
            Some(a) => inputs.push(a),
            None => inputs.extend(self.inputs.iter().copied()),
        }
        for u in &self.uses {
            if !uses.contains(u) {
                uses.push(*u);
            }
        }
    }
}

enum Target {
    Local(usize),
    Field { f: FieldId, recv: Val, on_this: bool },
    Rooted(Option<VarRef>, Val),
    Other(Val),
}

struct Lowerer<'a> {
    model: &'a ProjectModel,
    method: MethodId,
    class: ClassId,
    locals: Vec<LocalVar>,
    scopes: Vec<HashMap<String, usize>>,
    actions: Vec<ActionModel>,
    next_stmt: usize,
    diagnostics: Vec<Diagnostic>,
}

fn literal_type(l: &Literal) -> Option<TypeRef> {
    Some(TypeRef::simple(match l {
        Literal::Int(s) if s.ends_with('L') || s.ends_with('l') => "long",
        Literal::Int(_) => "int",
        Literal::Float(s) if s.ends_with('f') || s.ends_with('F') => "float",
        Literal::Float(_) => "double",
        Literal::Char(_) => "char",
        Literal::Str(_) => "String",
        Literal::Bool(_) => "boolean",
        Literal::Null => return None,
    }))
}

fn merge(vals: &[Val], ty: Option<TypeRef>) -> Val {
    let mut out = Val { ty, ..Default::default() };
    for v in vals {
        v.feed(&mut out.uses, &mut out.inputs);
    }
    out
}

fn simple(name: &str) -> String {
    name.rsplit('.').next().unwrap_or(name).to_string()
}

impl<'a> Lowerer<'a> {
    fn class_type(&self) -> TypeRef {
        TypeRef::simple(&self.model.class(self.class).qualified_name)
    }

    fn super_class(&self) -> Option<ClassId> {
        self.model.class(self.class).superclass.as_deref().and_then(|s| self.model.class_by_name(s))
    }

    fn lookup_local(&self, name: &str) -> Option<usize> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn declare(&mut self, name: &str, ty: TypeRef) -> usize {
        let idx = self.locals.len();
        self.locals.push(LocalVar { name: name.to_string(), ty, is_param: false });
        self.scopes.last_mut().expect("scope").insert(name.to_string(), idx);
        idx
    }

    fn local(&self, idx: usize) -> VarRef {
        VarRef::Local(self.method, idx)
    }

    fn new_action(&mut self, kind: ActionKind, callee: Callee, name: &str, owner_label: String, span: Span) -> usize {
        let id = self.actions.len();
        self.actions.push(ActionModel {
            id,
            kind,
            callee,
            name: name.to_string(),
            owner_label,
            receiver_var: None,
            receiver_action: None,
            on_this: false,
            arg_vars: Vec::new(),
            inputs: Vec::new(),
            uses: Vec::new(),
            assigned_to: None,
            declares: false,
            value_root: None,
            mutates_target: false,
            access: None,
            span,
            result_type: None,
        });
        id
    }

    fn resolve_ty(&self, t: &TypeRef) -> TypeRef {
        resolve_type(self.model, self.class, t)
    }

    fn type_label(&self, t: &Option<TypeRef>) -> Option<String> {
        t.as_ref().map(|t| simple(&t.name))
    }

    // ---- expressions ---------------------------------------------------

    fn expr(&mut self, e: &Expr, pos: Pos) -> Val {
        match &e.kind {
            ExprKind::Literal(l) => Val { ty: literal_type(l), ..Default::default() },
            ExprKind::ClassLit(_) => Val { ty: Some(TypeRef::simple("Class")), ..Default::default() },
            ExprKind::Name(n) => self.name(n, e.span, pos),
            ExprKind::This => Val { this_ref: true, ty: Some(self.class_type()), ..Default::default() },
            ExprKind::Super => Val {
                this_ref: true,
                is_super: true,
                ty: self.model.class(self.class).superclass.as_deref().map(TypeRef::simple),
                ..Default::default()
            },
            ExprKind::FieldAccess { target, name } => self.field_access(target, name, e.span, pos),
            ExprKind::Call { target, name, args } => self.call(target.as_deref(), name, args, e.span),
            ExprKind::CtorCall { is_super, args } => {
                let argv: Vec<Val> = args.iter().map(|a| self.expr(a, Pos::Value)).collect();
                let types: Vec<Option<TypeRef>> = argv.iter().map(|v| v.ty.clone()).collect();
                let owner = if *is_super { self.super_class() } else { Some(self.class) };
                let callee = match owner.and_then(|c| bind_constructor(self.model, c, &types)) {
                    Some(m) => Callee::System(m),
                    None => Callee::External { owner: self.model.class(self.class).superclass.clone(), name: "<init>".into() },
                };
                let label = owner.map(|c| self.model.class(c).simple_name.clone()).unwrap_or_else(|| "Object".into());
                let a = self.new_action(ActionKind::Invocation, callee, "<init>", label, e.span);
                self.attach_args(a, &argv);
                self.actions[a].on_this = true;
                Val { action: Some(a), ..Default::default() }
            }
            ExprKind::New { ty, args } => self.instantiation(ty, args, e.span),
            ExprKind::NewArray { ty, dims, init } => {
                let mut vals: Vec<Val> = dims.iter().map(|d| self.expr(d, Pos::Value)).collect();
                if let Some(items) = init {
                    vals.extend(items.iter().map(|i| self.expr(i, Pos::Value)));
                }
                let rty = self.resolve_ty(ty);
                merge(&vals, Some(rty))
            }
            ExprKind::ArrayInit(items) => {
                let vals: Vec<Val> = items.iter().map(|i| self.expr(i, Pos::Value)).collect();
                merge(&vals, None)
            }
            ExprKind::Index { target, index } => {
                let t = self.expr(target, Pos::Value);
                let i = self.expr(index, Pos::Value);
                let ty = t.ty.as_ref().filter(|t| t.dims > 0).map(|t| TypeRef { name: t.name.clone(), dims: t.dims - 1 });
                let mut v = merge(&[t.clone(), i], ty);
                v.root = t.root;
                v
            }
            ExprKind::Assign { op, target, value } => self.assign(op, target, Some(value), e.span),
            ExprKind::Unary { op, operand } if matches!(*op, "++" | "--") => self.assign(op, operand, None, e.span),
            ExprKind::Postfix { operand, op } => self.assign(op, operand, None, e.span),
            ExprKind::Unary { op, operand } => {
                let v = self.expr(operand, Pos::Value);
                let ty = if *op == "!" { Some(TypeRef::simple("boolean")) } else { v.ty.clone() };
                merge(&[v], ty)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs, Pos::Value);
                let r = self.expr(rhs, Pos::Value);
                let is_str = |v: &Val| v.ty.as_ref().is_some_and(|t| t.name == "String" && t.dims == 0);
                let ty = match *op {
                    "==" | "!=" | "<" | ">" | "<=" | ">=" | "&&" | "||" => Some(TypeRef::simple("boolean")),
                    "+" if is_str(&l) || is_str(&r) => Some(TypeRef::simple("String")),
                    _ => l.ty.clone(),
                };
                merge(&[l, r], ty)
            }
            ExprKind::Conditional { cond, then, els } => {
                let c = self.expr(cond, Pos::Value);
                let t = self.expr(then, Pos::Value);
                let f = self.expr(els, Pos::Value);
                let ty = t.ty.clone().or(f.ty.clone());
                merge(&[c, t, f], ty)
            }
            ExprKind::InstanceOf { expr, .. } => {
                let v = self.expr(expr, Pos::Value);
                merge(&[v], Some(TypeRef::simple("boolean")))
            }
            ExprKind::Cast { ty, expr } => {
                let mut v = self.expr(expr, pos);
                v.ty = Some(self.resolve_ty(ty));
                v
            }
            ExprKind::Paren(inner) => self.expr(inner, pos),
        }
    }

    fn field_read(&mut self, f: FieldId, recv: &Val, static_ref: bool, span: Span) -> Val {
        let fm = self.model.field(f);
        let label = if static_ref || recv.this_ref {
            self.model.class(fm.owner).simple_name.clone()
        } else {
            self.type_label(&recv.ty).unwrap_or_else(|| self.model.class(fm.owner).simple_name.clone())
        };
        let a = self.new_action(ActionKind::FieldAccess, Callee::Field(f), &fm.name, label, span);
        let mut uses = Vec::new();
        let mut inputs = Vec::new();
        recv.feed(&mut uses, &mut inputs);
        let act = &mut self.actions[a];
        act.access = Some(Acc::R);
        act.on_this = recv.this_ref && !static_ref;
        act.receiver_var = if recv.this_ref { None } else { recv.root };
        act.receiver_action = recv.action;
        act.uses = uses;
        act.inputs = inputs;
        act.result_type = Some(fm.ty.clone());
        let root = if recv.this_ref || static_ref { Some(VarRef::Field(f)) } else { recv.root };
        Val { action: Some(a), root, ty: Some(fm.ty.clone()), ..Default::default() }
    }

    fn field_ref(&self, f: FieldId, recv: &Val, static_ref: bool) -> Val {
        let fm = self.model.field(f);
        let mut v = Val { ty: Some(fm.ty.clone()), ..Default::default() };
        recv.feed(&mut v.uses, &mut v.inputs);
        if recv.this_ref || static_ref {
            v.root = Some(VarRef::Field(f));
            v.uses.push(VarRef::Field(f));
        } else {
            v.root = recv.root;
        }
        v
    }

    fn name(&mut self, n: &str, span: Span, pos: Pos) -> Val {
        if let Some(idx) = self.lookup_local(n) {
            let v = self.local(idx);
            return Val { root: Some(v), uses: vec![v], ty: Some(self.locals[idx].ty.clone()), ..Default::default() };
        }
        if let Some(f) = self.model.find_field(self.class, n) {
            let this = Val { this_ref: true, ty: Some(self.class_type()), ..Default::default() };
            let is_static = self.model.field(f).is_static;
            return match pos {
                Pos::Receiver => self.field_ref(f, &this, is_static),
                Pos::Value => self.field_read(f, &this, is_static, span),
            };
        }
        if let Some(c) = resolve_class(self.model, self.class, n) {
            return Val { class_ref: Some(ClassRef::System(c)), ..Default::default() };
        }
        if n.chars().next().is_some_and(|c| c.is_uppercase()) {
            return Val { class_ref: Some(ClassRef::External(n.to_string())), ..Default::default() };
        }
        self.diagnostics.push(Diagnostic {
            level: Level::Info,
            file: self.model.file_of(self.method).path.clone(),
            line: span.start_line,
            message: format!("unresolved name `{n}` in {}", self.model.method_ref(self.method)),
        });
        Val::default()
    }

    fn field_access(&mut self, target: &Expr, name: &str, span: Span, pos: Pos) -> Val {
        let before = self.actions.len();
        let t = self.expr(target, Pos::Receiver);
        match &t.class_ref {
            Some(ClassRef::System(c)) => {
                if let Some(f) = self.model.find_field(*c, name) {
                    return match pos {
                        Pos::Receiver => self.field_ref(f, &t, true),
                        Pos::Value => self.field_read(f, &t, true, span),
                    };
                }
                let qualified = format!("{}.{}", self.model.class(*c).qualified_name, name);
                return match self.model.class_by_name(&qualified) {
                    Some(n) => Val { class_ref: Some(ClassRef::System(n)), ..Default::default() },
                    None => Val { class_ref: Some(ClassRef::External(qualified)), ..Default::default() },
                };
            }
            Some(ClassRef::External(x)) => {
                let dotted = format!("{x}.{name}");
                if let Some(c) = self.model.class_by_name(&dotted) {
                    return Val { class_ref: Some(ClassRef::System(c)), ..Default::default() };
                }
                return Val { class_ref: Some(ClassRef::External(dotted)), ..Default::default() };
            }
            None => {}
        }
        let recv_class = t.ty.as_ref().and_then(|ty| class_of_type(self.model, ty));
        if let Some(f) = recv_class.and_then(|c| self.model.find_field(c, name)) {
            let is_static = self.model.field(f).is_static;
            return match pos {
                Pos::Receiver => self.field_ref(f, &t, is_static && !t.this_ref),
                Pos::Value => self.field_read(f, &t, false, span),
            };
        }
        let ty = if name == "length" && t.ty.as_ref().is_some_and(|x| x.dims > 0) { Some(TypeRef::simple("int")) } else { None };
        // `f.length` on a project field: the field itself is read
        let t = if self.actions.len() == before && !t.this_ref && matches!(t.root, Some(VarRef::Field(_))) {
            self.expr(target, Pos::Value)
        } else {
            t
        };
        let mut v = merge(&[t.clone()], ty);
        v.root = t.root;
        v
    }

    fn attach_args(&mut self, a: usize, argv: &[Val]) {
        let mut uses = std::mem::take(&mut self.actions[a].uses);
        let mut inputs = std::mem::take(&mut self.actions[a].inputs);
        for v in argv {
            v.feed(&mut uses, &mut inputs);
        }
        let act = &mut self.actions[a];
        act.uses = uses;
        act.inputs = inputs;
        act.arg_vars = argv.iter().map(|v| v.root).collect();
    }

    fn call(&mut self, target: Option<&Expr>, name: &str, args: &[Expr], span: Span) -> Val {
        let t = match target {
            None => Val { this_ref: true, ty: Some(self.class_type()), ..Default::default() },
            Some(e) => self.expr(e, Pos::Receiver),
        };
        let argv: Vec<Val> = args.iter().map(|a| self.expr(a, Pos::Value)).collect();
        let types: Vec<Option<TypeRef>> = argv.iter().map(|v| v.ty.clone()).collect();
        let implicit = target.is_none();

        let (callee, label) = if let Some(cr) = &t.class_ref {
            match cr {
                ClassRef::System(c) => {
                    let label = self.model.class(*c).simple_name.clone();
                    match lookup_method(self.model, *c, name, &types) {
                        Some(m) => (Callee::System(m), label),
                        None => (Callee::External { owner: Some(self.model.class(*c).qualified_name.clone()), name: name.into() }, label),
                    }
                }
                ClassRef::External(x) => (Callee::External { owner: Some(x.clone()), name: name.into() }, simple(x)),
            }
        } else if t.this_ref {
            let lookup_in = if t.is_super { self.super_class() } else { Some(self.class) };
            match lookup_in.and_then(|c| lookup_method(self.model, c, name, &types)) {
                Some(m) => {
                    let owner = self.model.method(m).owner;
                    (Callee::System(m), self.model.class(owner).simple_name.clone())
                }
                None => {
                    let label = if is_assert_name(name) || name == "fail" || name == "assertThat" {
                        "Assert".to_string()
                    } else {
                        self.model.class(self.class).superclass.as_deref().map(simple).unwrap_or_else(|| self.model.class(self.class).simple_name.clone())
                    };
                    (Callee::External { owner: self.model.class(self.class).superclass.clone(), name: name.into() }, label)
                }
            }
        } else {
            let label = self.type_label(&t.ty).unwrap_or_else(|| "?".into());
            match t.ty.as_ref().and_then(|ty| class_of_type(self.model, ty)) {
                Some(c) => match bind_method(self.model, c, name, &types) {
                    Binding::System(m) => (Callee::System(m), label),
                    Binding::Ambiguous => {
                        self.diagnostics.push(Diagnostic {
                            level: Level::Info,
                            file: self.model.file_of(self.method).path.clone(),
                            line: span.start_line,
                            message: format!("ambiguous receiver type {} for `{name}`; treated as external", self.model.class(c).qualified_name),
                        });
                        (Callee::Ambiguous { owner: self.model.class(c).qualified_name.clone(), name: name.into() }, label)
                    }
                    Binding::External => (Callee::External { owner: t.ty.as_ref().map(|x| x.name.clone()), name: name.into() }, label),
                },
                None => (Callee::External { owner: t.ty.as_ref().map(|x| x.name.clone()), name: name.into() }, label),
            }
        };
        let result_type = match &callee {
            Callee::System(m) => self.model.method(*m).ret.clone(),
            _ => None,
        };
        let a = self.new_action(ActionKind::Invocation, callee, name, label, span);
        {
            let mut uses = Vec::new();
            let mut inputs = Vec::new();
            t.feed(&mut uses, &mut inputs);
            let act = &mut self.actions[a];
            act.uses = uses;
            act.inputs = inputs;
            act.on_this = t.this_ref;
            act.receiver_var = if t.this_ref { None } else { t.root };
            act.receiver_action = t.action;
            act.result_type = result_type.clone();
        }
        self.attach_args(a, &argv);
        let root = if t.this_ref || implicit { None } else { t.root };
        Val { action: Some(a), root, ty: result_type, ..Default::default() }
    }

    fn instantiation(&mut self, ty: &TypeRef, args: &[Expr], span: Span) -> Val {
        let rty = self.resolve_ty(ty);
        let argv: Vec<Val> = args.iter().map(|a| self.expr(a, Pos::Value)).collect();
        let types: Vec<Option<TypeRef>> = argv.iter().map(|v| v.ty.clone()).collect();
        let callee = match class_of_type(self.model, &rty).and_then(|c| bind_constructor(self.model, c, &types)) {
            Some(m) => Callee::System(m),
            None => Callee::External { owner: Some(rty.name.clone()), name: "<init>".into() },
        };
        let a = self.new_action(ActionKind::Instantiation, callee, "<init>", simple(&rty.name), span);
        self.attach_args(a, &argv);
        self.actions[a].result_type = Some(rty.clone());
        Val { action: Some(a), ty: Some(rty), ..Default::default() }
    }

    fn assign_target(&mut self, base: &Expr) -> Target {
        match &base.kind {
            ExprKind::Name(n) => {
                if let Some(idx) = self.lookup_local(n) {
                    return Target::Local(idx);
                }
                if let Some(f) = self.model.find_field(self.class, n) {
                    let this = Val { this_ref: true, ty: Some(self.class_type()), ..Default::default() };
                    let on_this = !self.model.field(f).is_static;
                    return Target::Field { f, recv: this, on_this };
                }
                Target::Other(Val::default())
            }
            ExprKind::FieldAccess { target, name } => {
                let t = self.expr(target, Pos::Receiver);
                if let Some(ClassRef::System(c)) = &t.class_ref {
                    if let Some(f) = self.model.find_field(*c, name) {
                        return Target::Field { f, recv: Val::default(), on_this: false };
                    }
                    return Target::Other(t);
                }
                if t.this_ref {
                    if let Some(f) = self.model.find_field(self.class, name) {
                        return Target::Field { f, recv: t, on_this: true };
                    }
                }
                let rc = t.ty.as_ref().and_then(|ty| class_of_type(self.model, ty));
                if let Some(f) = rc.and_then(|c| self.model.find_field(c, name)) {
                    return Target::Field { f, recv: t, on_this: false };
                }
                Target::Rooted(t.root, t)
            }
            ExprKind::Paren(inner) => self.assign_target(inner),
            _ => Target::Other(self.expr(base, Pos::Value)),
        }
    }

    fn assign(&mut self, op: &str, target: &Expr, value: Option<&Expr>, span: Span) -> Val {
        let v = value.map(|e| self.expr(e, Pos::Value)).unwrap_or_default();
        let mut base = target;
        let mut index_exprs = Vec::new();
        while let ExprKind::Index { target: t, index } = &base.kind {
            index_exprs.push(&**index);
            base = t;
        }
        let indexed = !index_exprs.is_empty();
        let idx_vals: Vec<Val> = index_exprs.into_iter().rev().map(|i| self.expr(i, Pos::Value)).collect();
        let compound = op != "=" || value.is_none();
        let tgt = self.assign_target(base);
        match tgt {
            Target::Local(idx) => {
                let var = self.local(idx);
                if let (false, false, Some(a)) = (indexed, compound, v.action) {
                    self.actions[a].assigned_to = Some(var);
                    self.actions[a].declares = false;
                    self.actions[a].value_root = v.root;
                    return Val { action: Some(a), root: Some(var), ty: v.ty, ..Default::default() };
                }
                let a = self.new_action(ActionKind::Def, Callee::None, &self.locals[idx].name.clone(), String::new(), span);
                let mut uses = Vec::new();
                let mut inputs = Vec::new();
                v.feed(&mut uses, &mut inputs);
                for iv in &idx_vals {
                    iv.feed(&mut uses, &mut inputs);
                }
                if (compound || indexed) && !uses.contains(&var) {
                    uses.push(var);
                }
                let act = &mut self.actions[a];
                act.uses = uses;
                act.inputs = inputs;
                act.assigned_to = Some(var);
                act.value_root = if indexed || compound { None } else { v.root };
                act.mutates_target = indexed;
                Val { action: Some(a), root: Some(var), ty: Some(self.locals[idx].ty.clone()), ..Default::default() }
            }
            Target::Field { f, recv, on_this } => {
                let fm = self.model.field(f);
                let label = if on_this || recv.ty.is_none() {
                    self.model.class(fm.owner).simple_name.clone()
                } else {
                    self.type_label(&recv.ty).unwrap_or_default()
                };
                let name = fm.name.clone();
                let a = self.new_action(ActionKind::FieldAccess, Callee::Field(f), &name, label, span);
                let mut uses = Vec::new();
                let mut inputs = Vec::new();
                recv.feed(&mut uses, &mut inputs);
                v.feed(&mut uses, &mut inputs);
                for iv in &idx_vals {
                    iv.feed(&mut uses, &mut inputs);
                }
                let act = &mut self.actions[a];
                act.access = Some(Acc::W);
                act.on_this = on_this;
                act.receiver_var = if recv.this_ref { None } else { recv.root };
                act.receiver_action = recv.action;
                act.uses = uses;
                act.inputs = inputs;
                act.value_root = v.root;
                Val { action: Some(a), root: Some(VarRef::Field(f)), ..Default::default() }
            }
            Target::Rooted(Some(root @ VarRef::Local(_, idx)), recv) => {
                let a = self.new_action(ActionKind::Def, Callee::None, &self.locals[idx].name.clone(), String::new(), span);
                let mut uses = Vec::new();
                let mut inputs = Vec::new();
                recv.feed(&mut uses, &mut inputs);
                v.feed(&mut uses, &mut inputs);
                for iv in &idx_vals {
                    iv.feed(&mut uses, &mut inputs);
                }
                let act = &mut self.actions[a];
                act.uses = uses;
                act.inputs = inputs;
                act.assigned_to = Some(root);
                act.mutates_target = true;
                Val { action: Some(a), root: Some(root), ..Default::default() }
            }
            Target::Rooted(_, recv) | Target::Other(recv) => {
                let mut all = vec![recv, v];
                all.extend(idx_vals);
                merge(&all, None)
            }
        }
    }

    // ---- statements ----------------------------------------------------

    fn stmts(&mut self, stmts: &[Stmt]) -> Vec<StatementModel> {
        self.scopes.push(HashMap::new());
        let out = stmts.iter().map(|s| self.stmt(s)).collect();
        self.scopes.pop();
        out
    }

    fn branch(&mut self, s: &Stmt, kind: BranchKind) -> Branch {
        match &s.kind {
            StmtKind::Block(b) => self.block_branch(b, kind),
            _ => {
                self.scopes.push(HashMap::new());
                let st = self.stmt(s);
                self.scopes.pop();
                Branch { kind, stmts: vec![st], span: s.span, braced: false }
            }
        }
    }

    fn block_branch(&mut self, b: &Block, kind: BranchKind) -> Branch {
        Branch { kind, stmts: self.stmts(&b.stmts), span: b.span, braced: true }
    }

    fn range(&self, from: usize) -> Vec<usize> {
        (from..self.actions.len()).collect()
    }

    fn local_decl(&mut self, ty: &TypeRef, decls: &[crate::java::ast::Declarator], span: Span) {
        let rty = self.resolve_ty(ty);
        for d in decls {
            let dty = TypeRef { name: rty.name.clone(), dims: rty.dims + d.dims };
            match &d.init {
                Some(init) => {
                    let v = self.expr(init, Pos::Value);
                    let idx = self.declare(&d.name, dty);
                    let var = self.local(idx);
                    match v.action {
                        Some(a) => {
                            self.actions[a].assigned_to = Some(var);
                            self.actions[a].declares = true;
                            self.actions[a].value_root = v.root;
                        }
                        None => {
                            let a = self.new_action(ActionKind::Def, Callee::None, &d.name, String::new(), init.span);
                            let mut uses = Vec::new();
                            let mut inputs = Vec::new();
                            v.feed(&mut uses, &mut inputs);
                            let act = &mut self.actions[a];
                            act.uses = uses;
                            act.inputs = inputs;
                            act.assigned_to = Some(var);
                            act.declares = true;
                            act.value_root = v.root;
                        }
                    }
                }
                None => {
                    let _ = span;
                    self.declare(&d.name, dty);
                }
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) -> StatementModel {
        let id = self.next_stmt;
        self.next_stmt += 1;
        let start = self.actions.len();
        let mut sm = StatementModel {
            id,
            kind: StmtKindTag::Other,
            span: s.span,
            actions: Vec::new(),
            predicate_actions: Vec::new(),
            update_actions: Vec::new(),
            predicate_uses: Vec::new(),
            branches: Vec::new(),
            is_opaque: false,
        };
        match &s.kind {
            StmtKind::LocalVar { ty, decls, .. } => {
                sm.kind = StmtKindTag::VarDecl;
                self.local_decl(ty, decls, s.span);
                sm.actions = self.range(start);
            }
            StmtKind::Expr(e) => {
                sm.kind = classify_expr_stmt(e);
                self.expr(e, Pos::Value);
                sm.actions = self.range(start);
            }
            StmtKind::Return(e) => {
                sm.kind = StmtKindTag::Return;
                if let Some(e) = e {
                    self.expr(e, Pos::Value);
                }
                sm.actions = self.range(start);
            }
            StmtKind::Throw(e) => {
                self.expr(e, Pos::Value);
                sm.actions = self.range(start);
            }
            StmtKind::If { cond, then, els } => {
                sm.kind = StmtKindTag::If;
                sm.predicate_uses = self.expr(cond, Pos::Value).uses;
                sm.actions = self.range(start);
                sm.predicate_actions = sm.actions.clone();
                sm.branches.push(self.branch(then, BranchKind::Then));
                if let Some(e) = els {
                    sm.branches.push(self.branch(e, BranchKind::Else));
                }
            }
            StmtKind::While { cond, body } => {
                sm.kind = StmtKindTag::While;
                sm.predicate_uses = self.expr(cond, Pos::Value).uses;
                sm.actions = self.range(start);
                sm.predicate_actions = sm.actions.clone();
                sm.branches.push(self.branch(body, BranchKind::LoopBody));
            }
            StmtKind::For { init, cond, update, body } => {
                sm.kind = StmtKindTag::For;
                self.scopes.push(HashMap::new());
                for i in init {
                    match &i.kind {
                        StmtKind::LocalVar { ty, decls, .. } => self.local_decl(ty, decls, i.span),
                        StmtKind::Expr(e) => {
                            self.expr(e, Pos::Value);
                        }
                        _ => {}
                    }
                }
                let cond_start = self.actions.len();
                if let Some(c) = cond {
                    sm.predicate_uses = self.expr(c, Pos::Value).uses;
                }
                sm.predicate_actions = self.range(cond_start);
                sm.actions = self.range(start);
                sm.branches.push(self.branch(body, BranchKind::LoopBody));
                let upd_start = self.actions.len();
                for u in update {
                    self.expr(u, Pos::Value);
                }
                sm.update_actions = self.range(upd_start);
                sm.actions.extend(sm.update_actions.iter().copied());
                self.scopes.pop();
            }
            StmtKind::ForEach { ty, name, iter, body, .. } => {
                sm.kind = StmtKindTag::For;
                self.scopes.push(HashMap::new());
                let it = self.expr(iter, Pos::Value);
                let rty = self.resolve_ty(ty);
                let idx = self.declare(name, rty);
                let var = self.local(idx);
                let a = self.new_action(ActionKind::Def, Callee::None, name, String::new(), iter.span);
                let mut uses = Vec::new();
                let mut inputs = Vec::new();
                it.feed(&mut uses, &mut inputs);
                let act = &mut self.actions[a];
                act.uses = uses;
                act.inputs = inputs;
                act.assigned_to = Some(var);
                act.declares = true;
                act.value_root = it.root;
                sm.actions = self.range(start);
                sm.predicate_actions = sm.actions.clone();
                sm.branches.push(self.branch(body, BranchKind::LoopBody));
                self.scopes.pop();
            }
            StmtKind::Block(b) => {
                sm.kind = StmtKindTag::Block;
                sm.branches.push(self.block_branch(b, BranchKind::Block));
            }
            StmtKind::Try { body, catches, finally } => {
                sm.kind = StmtKindTag::Try;
                sm.branches.push(self.block_branch(body, BranchKind::TryBody));
                for c in catches {
                    self.scopes.push(HashMap::new());
                    let cty = self.resolve_ty(&c.ty);
                    self.declare(&c.name, cty);
                    sm.branches.push(self.block_branch(&c.body, BranchKind::Catch));
                    self.scopes.pop();
                }
                if let Some(f) = finally {
                    sm.branches.push(self.block_branch(f, BranchKind::Finally));
                }
            }
            StmtKind::Opaque(_) => sm.is_opaque = true,
            StmtKind::Break | StmtKind::Continue | StmtKind::Empty => {}
        }
        sm
    }
}

fn dotted(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Name(n) => Some(n.clone()),
        ExprKind::FieldAccess { target, name } => Some(format!("{}.{}", dotted(target)?, name)),
        _ => None,
    }
}

/// Whether a call expression is a JUnit `Assert`-style call (`name` qualified by
/// an assertion class or unqualified).
pub(crate) fn is_junit_call(e: &Expr, pred: impl Fn(&str) -> bool) -> bool {
    match &e.kind {
        ExprKind::Call { target, name, .. } if pred(name) => match target {
            None => true,
            Some(t) => dotted(t).is_some_and(|d| ASSERT_OWNERS.contains(&d.as_str())),
        },
        _ => false,
    }
}

fn classify_expr_stmt(e: &Expr) -> StmtKindTag {
    if is_junit_call(e, is_assert_name) {
        StmtKindTag::Assert
    } else if is_junit_call(e, |n| n == "fail") {
        StmtKindTag::Fail
    } else {
        StmtKindTag::ExprStmt
    }
}
