//! Language-neutral project IR shared by every analysis.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::java::ast::{Annotation, Block, Expr, Span, TypeRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldId(pub usize);

/// A variable: a class field, or a parameter/local of a method body.
/// Parameters occupy the first local indices of their method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarRef {
    Field(FieldId),
    Local(MethodId, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Error,
    Warn,
    Info,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Error => "ERROR",
            Level::Warn => "WARN",
            Level::Info => "INFO",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub level: Level,
    pub file: PathBuf,
    pub line: u32,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}:{} {}", self.level, self.file.display(), self.line, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub in_test_root: bool,
}

#[derive(Debug, Clone)]
pub struct ClassModel {
    pub id: ClassId,
    pub qualified_name: String,
    pub simple_name: String,
    pub package: Option<String>,
    pub is_interface: bool,
    pub is_abstract: bool,
    pub fields: Vec<FieldId>,
    pub methods: Vec<MethodId>,
    /// Qualified when it names a project class, as written otherwise.
    pub superclass: Option<String>,
    pub interfaces: Vec<String>,
    /// Every class in the model comes from a file under one of the roots.
    pub is_system: bool,
    pub in_test_root: bool,
    pub file: usize,
    pub imports: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FieldModel {
    pub id: FieldId,
    pub owner: ClassId,
    pub name: String,
    pub ty: TypeRef,
    pub is_static: bool,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub struct LocalVar {
    pub name: String,
    pub ty: TypeRef,
    pub is_param: bool,
}

#[derive(Debug, Clone)]
pub struct MethodModel {
    pub id: MethodId,
    pub owner: ClassId,
    /// `<init>` for constructors.
    pub name: String,
    pub param_types: Vec<TypeRef>,
    pub varargs: bool,
    pub ret: Option<TypeRef>,
    pub is_static: bool,
    pub is_public: bool,
    pub is_abstract: bool,
    pub is_constructor: bool,
    /// Implicit default constructor added for classes that declare none.
    pub synthetic: bool,
    pub annotations: Vec<Annotation>,
    pub span: Span,
    pub ast: Option<Block>,
    /// Parameters first, then locals in declaration order.
    pub locals: Vec<LocalVar>,
    pub body: Vec<StatementModel>,
    /// Indexed by action id.
    pub actions: Vec<ActionModel>,
}

impl MethodModel {
    pub fn params(&self) -> Vec<VarRef> {
        (0..self.param_types.len()).map(|i| VarRef::Local(self.id, i)).collect()
    }

    pub fn is_param(&self, v: VarRef) -> bool {
        matches!(v, VarRef::Local(m, i) if m == self.id && i < self.param_types.len())
    }

    /// Statements in pre-order, children after their parent.
    pub fn all_statements(&self) -> Vec<&StatementModel> {
        fn go<'a>(s: &'a StatementModel, out: &mut Vec<&'a StatementModel>) {
            out.push(s);
            for b in &s.branches {
                for c in &b.stmts {
                    go(c, out);
                }
            }
        }
        let mut out = Vec::new();
        for s in &self.body {
            go(s, &mut out);
        }
        out
    }

    /// The statement whose own expressions contain `action`.
    pub fn statement_of(&self, action: usize) -> Option<&StatementModel> {
        self.all_statements().into_iter().find(|s| s.actions.contains(&action))
    }

    /// The top-level statement that contains `action` (directly or nested).
    pub fn top_statement_of(&self, action: usize) -> Option<&StatementModel> {
        self.body.iter().find(|s| s.contains_action(action))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StmtKindTag {
    VarDecl,
    ExprStmt,
    Assert,
    Fail,
    If,
    For,
    While,
    Return,
    Block,
    Try,
    /// throw, break, continue, empty, and opaque statements.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchKind {
    Then,
    Else,
    LoopBody,
    Block,
    TryBody,
    Catch,
    Finally,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub kind: BranchKind,
    pub stmts: Vec<StatementModel>,
    /// Byte span of the branch as written (block braces included).
    pub span: Span,
    /// Whether the branch was written as a braced block.
    pub braced: bool,
}

#[derive(Debug, Clone)]
pub struct StatementModel {
    /// Pre-order ordinal within the method body.
    pub id: usize,
    pub kind: StmtKindTag,
    pub span: Span,
    /// Actions of this statement's own expressions, in evaluation order.
    pub actions: Vec<usize>,
    /// Actions evaluated in a control predicate (if/while condition, for
    /// condition, foreach iterable and loop-variable definition).
    pub predicate_actions: Vec<usize>,
    /// For-loop update actions; these run inside the loop body.
    pub update_actions: Vec<usize>,
    /// Variables read by the control predicate outside any action.
    pub predicate_uses: Vec<VarRef>,
    pub branches: Vec<Branch>,
    pub is_opaque: bool,
}

impl StatementModel {
    pub fn children(&self) -> impl Iterator<Item = &StatementModel> {
        self.branches.iter().flat_map(|b| b.stmts.iter())
    }

    pub fn contains_action(&self, a: usize) -> bool {
        self.actions.contains(&a) || self.children().any(|c| c.contains_action(a))
    }

    /// All actions in this statement and nested statements.
    pub fn all_actions(&self) -> Vec<usize> {
        let mut out = self.actions.clone();
        for c in self.children() {
            out.extend(c.all_actions());
        }
        out.sort_unstable();
        out
    }

    pub fn contains_kind(&self, kind: StmtKindTag) -> bool {
        self.kind == kind || self.children().any(|c| c.contains_kind(kind))
    }

    pub fn is_control(&self) -> bool {
        matches!(self.kind, StmtKindTag::If | StmtKindTag::For | StmtKindTag::While)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Instantiation,
    Invocation,
    FieldAccess,
    /// Definition of a local from a value that is not itself an action
    /// (literal, arithmetic, array initializer, loop variable...).
    Def,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Acc {
    R,
    W,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Callee {
    System(MethodId),
    Field(FieldId),
    /// Receiver typed by an interface or abstract class with several project
    /// implementors; treated as external.
    Ambiguous { owner: String, name: String },
    External { owner: Option<String>, name: String },
    /// `Def` actions have no callee.
    None,
}

impl Callee {
    pub fn method(&self) -> Option<MethodId> {
        match self {
            Callee::System(m) => Some(*m),
            _ => None,
        }
    }

    pub fn is_system(&self) -> bool {
        matches!(self, Callee::System(_) | Callee::Field(_))
    }

    pub fn raw_name(&self) -> Option<&str> {
        match self {
            Callee::Ambiguous { name, .. } | Callee::External { name, .. } => Some(name),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ActionModel {
    pub id: usize,
    pub kind: ActionKind,
    pub callee: Callee,
    /// Member name as written (`<init>` for constructors).
    pub name: String,
    /// Simple name of the receiver's static type (or callee owner), for labels.
    pub owner_label: String,
    /// Root variable of the receiver expression.
    pub receiver_var: Option<VarRef>,
    /// Action whose result is the receiver.
    pub receiver_action: Option<usize>,
    /// Receiver is `this`, `super`, or implicit.
    pub on_this: bool,
    /// Root variable of each argument expression, positionally.
    pub arg_vars: Vec<Option<VarRef>>,
    /// Actions whose results flow directly into this one.
    pub inputs: Vec<usize>,
    /// Variables this action's own expression reads.
    pub uses: Vec<VarRef>,
    pub assigned_to: Option<VarRef>,
    /// The assignment is a declaration of `assigned_to`.
    pub declares: bool,
    /// Root variable of the assigned value (`x = y`, `x = (T) y`, `x = y.m()`).
    pub value_root: Option<VarRef>,
    /// A `Def` that stores into the object held by `assigned_to` (`a[i] = v`,
    /// `a.x = v` on an external type) instead of rebinding it.
    pub mutates_target: bool,
    /// Field read or write, for `FieldAccess` actions.
    pub access: Option<Acc>,
    pub span: Span,
    pub result_type: Option<TypeRef>,
}

impl ActionModel {
    pub fn label(&self) -> String {
        format!("{}.{}", self.owner_label, self.name)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProjectModel {
    pub classes: Vec<ClassModel>,
    pub methods: Vec<MethodModel>,
    pub fields: Vec<FieldModel>,
    pub files: Vec<SourceFile>,
    pub source_root: PathBuf,
    pub test_root: PathBuf,
    pub diagnostics: Vec<Diagnostic>,
    /// Whether method bodies have been lowered to statements and actions.
    pub resolved: bool,
    pub(crate) by_name: HashMap<String, ClassId>,
}

impl ProjectModel {
    pub fn class(&self, id: ClassId) -> &ClassModel {
        &self.classes[id.0]
    }

    pub fn method(&self, id: MethodId) -> &MethodModel {
        &self.methods[id.0]
    }

    pub fn field(&self, id: FieldId) -> &FieldModel {
        &self.fields[id.0]
    }

    pub fn class_by_name(&self, qualified: &str) -> Option<ClassId> {
        self.by_name.get(qualified).copied()
    }

    /// True iff the named class was loaded from one of the project roots.
    pub fn is_system(&self, qualified: &str) -> bool {
        self.by_name.contains_key(qualified)
    }

    pub fn source_of(&self, m: MethodId) -> &str {
        &self.files[self.class(self.method(m).owner).file].text
    }

    pub fn file_of(&self, m: MethodId) -> &SourceFile {
        &self.files[self.class(self.method(m).owner).file]
    }

    /// The class and its superclasses that are part of the project, nearest first.
    pub fn superclass_chain(&self, c: ClassId) -> Vec<ClassId> {
        let mut out = vec![c];
        let mut cur = c;
        while let Some(sup) = self.class(cur).superclass.as_deref().and_then(|s| self.class_by_name(s)) {
            if out.contains(&sup) {
                break;
            }
            out.push(sup);
            cur = sup;
        }
        out
    }

    /// All project supertypes (classes and interfaces), including `c`.
    pub fn supertypes(&self, c: ClassId) -> Vec<ClassId> {
        let mut out = Vec::new();
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            if out.contains(&x) {
                continue;
            }
            out.push(x);
            let cls = self.class(x);
            for s in cls.superclass.iter().chain(cls.interfaces.iter()) {
                if let Some(id) = self.class_by_name(s) {
                    stack.push(id);
                }
            }
        }
        out
    }

    pub fn is_subtype(&self, sub: ClassId, sup: ClassId) -> bool {
        self.supertypes(sub).contains(&sup)
    }

    /// Concrete project classes that are subtypes of `c` (including `c` itself when concrete).
    pub fn concrete_implementors(&self, c: ClassId) -> Vec<ClassId> {
        self.classes
            .iter()
            .filter(|k| !k.is_interface && !k.is_abstract && self.is_subtype(k.id, c))
            .map(|k| k.id)
            .collect()
    }

    /// Fields visible on instances of `c`: its own and inherited ones.
    pub fn class_fields(&self, c: ClassId) -> Vec<FieldId> {
        self.superclass_chain(c).iter().flat_map(|k| self.class(*k).fields.iter().copied()).collect()
    }

    pub fn find_field(&self, c: ClassId, name: &str) -> Option<FieldId> {
        for k in self.supertypes(c) {
            if let Some(f) = self.class(k).fields.iter().find(|f| self.field(**f).name == name) {
                return Some(*f);
            }
        }
        None
    }

    pub fn var_name(&self, v: VarRef) -> String {
        match v {
            VarRef::Field(f) => self.field(f).name.clone(),
            VarRef::Local(m, i) => self.method(m).locals[i].name.clone(),
        }
    }

    pub fn var_type(&self, v: VarRef) -> &TypeRef {
        match v {
            VarRef::Field(f) => &self.field(f).ty,
            VarRef::Local(m, i) => &self.method(m).locals[i].ty,
        }
    }

    /// `pkg.Class#name(T1,T2)`.
    pub fn method_ref(&self, m: MethodId) -> String {
        let mm = self.method(m);
        let params: Vec<String> = mm
            .param_types
            .iter()
            .map(|t| {
                let mut s = t.simple_name().to_string();
                for _ in 0..t.dims {
                    s.push_str("[]");
                }
                s
            })
            .collect();
        format!("{}#{}({})", self.class(mm.owner).qualified_name, mm.name, params.join(","))
    }

    /// `pkg.Class#name`.
    pub fn test_id(&self, m: MethodId) -> String {
        let mm = self.method(m);
        format!("{}#{}", self.class(mm.owner).qualified_name, mm.name)
    }

    pub fn field_ref(&self, f: FieldId) -> String {
        let ff = self.field(f);
        format!("{}.{}", self.class(ff.owner).qualified_name, ff.name)
    }

    pub fn var_ref_string(&self, v: VarRef) -> String {
        match v {
            VarRef::Field(f) => self.field_ref(f),
            VarRef::Local(m, i) => format!("{}:{}", self.method_ref(m), self.method(m).locals[i].name),
        }
    }

    pub fn find_method(&self, class_qualified: &str, name: &str) -> Option<MethodId> {
        let c = self.class_by_name(class_qualified)?;
        self.class(c).methods.iter().copied().find(|m| self.method(*m).name == name)
    }

    pub fn find_class_simple(&self, simple: &str) -> Option<ClassId> {
        let mut it = self.classes.iter().filter(|c| c.simple_name == simple);
        let first = it.next()?;
        if it.next().is_some() {
            None
        } else {
            Some(first.id)
        }
    }
}
