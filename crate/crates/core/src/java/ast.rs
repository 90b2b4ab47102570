//! Syntax tree for the supported Java subset.

/// Byte range plus 1-based line range in the originating file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub start_line: u32,
    pub end_line: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start,
            end: other.end,
            start_line: self.start_line,
            end_line: other.end_line,
        }
    }
}

/// A type as written, with generic arguments erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    /// Dotted name, e.g. `Map.Entry` or `int`.
    pub name: String,
    pub dims: usize,
}

impl TypeRef {
    pub fn simple(name: &str) -> TypeRef {
        TypeRef { name: name.to_string(), dims: 0 }
    }

    /// Last dotted segment of the name.
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    pub fn is_array(&self) -> bool {
        self.dims > 0
    }

    pub fn is_primitive(&self) -> bool {
        self.dims == 0
            && matches!(
                self.name.as_str(),
                "int" | "long" | "short" | "byte" | "char" | "boolean" | "float" | "double" | "void"
            )
    }

    pub fn display(&self) -> String {
        let mut s = self.name.clone();
        for _ in 0..self.dims {
            s.push_str("[]");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub name: String,
    /// `key = value` pairs; a single unnamed element is stored under `value`.
    pub args: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Modifiers {
    pub is_public: bool,
    pub is_private: bool,
    pub is_protected: bool,
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_final: bool,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    pub package: Option<String>,
    pub imports: Vec<String>,
    pub types: Vec<TypeDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub kind: TypeKind,
    pub modifiers: Modifiers,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeRef,
    pub modifiers: Modifiers,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
    pub varargs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub modifiers: Modifiers,
    /// `None` for constructors.
    pub ret: Option<TypeRef>,
    pub params: Vec<Param>,
    pub body: Option<Block>,
    pub is_constructor: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub dims: usize,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub ty: TypeRef,
    pub name: String,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    LocalVar {
        is_final: bool,
        ty: TypeRef,
        decls: Vec<Declarator>,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
    },
    For {
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    ForEach {
        is_final: bool,
        ty: TypeRef,
        name: String,
        iter: Expr,
        body: Box<Stmt>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Block(Block),
    Try {
        body: Block,
        catches: Vec<CatchClause>,
        finally: Option<Block>,
    },
    Break,
    Continue,
    Empty,
    /// Statement outside the modeled subset (switch, lambdas, local classes...).
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(String),
    Float(String),
    Char(String),
    Str(String),
    Bool(bool),
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Literal(Literal),
    Name(String),
    This,
    /// `target.name`; a dotted name like `a.b` parses as FieldAccess(Name a, b).
    FieldAccess {
        target: Box<Expr>,
        name: String,
    },
    /// `target.name(args)`; `target` is `None` for unqualified calls. `super.m()` uses
    /// `Some(Super)`.
    Call {
        target: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    Super,
    /// `this(...)` / `super(...)` inside constructors.
    CtorCall {
        is_super: bool,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
    },
    NewArray {
        ty: TypeRef,
        dims: Vec<Expr>,
        init: Option<Vec<Expr>>,
    },
    ArrayInit(Vec<Expr>),
    Index {
        target: Box<Expr>,
        index: Box<Expr>,
    },
    Assign {
        op: &'static str,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Binary {
        op: &'static str,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: &'static str,
        operand: Box<Expr>,
    },
    /// `x++` / `x--`.
    Postfix {
        op: &'static str,
        operand: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        expr: Box<Expr>,
    },
    Conditional {
        cond: Box<Expr>,
        then: Box<Expr>,
        els: Box<Expr>,
    },
    InstanceOf {
        expr: Box<Expr>,
        ty: TypeRef,
    },
    ClassLit(TypeRef),
    Paren(Box<Expr>),
}

impl Expr {
    /// Strips parentheses and casts.
    pub fn peel(&self) -> &Expr {
        match &self.kind {
            ExprKind::Paren(e) | ExprKind::Cast { expr: e, .. } => e.peel(),
            _ => self,
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.peel().kind {
            ExprKind::Literal(_) | ExprKind::ClassLit(_) => true,
            ExprKind::Unary { operand, .. } => operand.is_constant(),
            ExprKind::Binary { lhs, rhs, .. } => lhs.is_constant() && rhs.is_constant(),
            _ => false,
        }
    }

    /// Visits this expression and all nested sub-expressions, pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::This | ExprKind::Super | ExprKind::ClassLit(_) => {
                vec![]
            }
            ExprKind::FieldAccess { target, .. } => vec![target],
            ExprKind::Call { target, args, .. } => {
                let mut v: Vec<&Expr> = target.iter().map(|t| &**t).collect();
                v.extend(args.iter());
                v
            }
            ExprKind::CtorCall { args, .. } | ExprKind::New { args, .. } | ExprKind::ArrayInit(args) => {
                args.iter().collect()
            }
            ExprKind::NewArray { dims, init, .. } => {
                let mut v: Vec<&Expr> = dims.iter().collect();
                if let Some(init) = init {
                    v.extend(init.iter());
                }
                v
            }
            ExprKind::Index { target, index } => vec![target, index],
            ExprKind::Assign { target, value, .. } => vec![target, value],
            ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::Unary { operand, .. } | ExprKind::Postfix { operand, .. } => vec![operand],
            ExprKind::Cast { expr, .. } | ExprKind::Paren(expr) | ExprKind::InstanceOf { expr, .. } => vec![expr],
            ExprKind::Conditional { cond, then, els } => vec![cond, then, els],
        }
    }
}

impl Stmt {
    /// Directly nested statements (bodies of control statements and blocks).
    pub fn child_stmts(&self) -> Vec<&Stmt> {
        match &self.kind {
            StmtKind::If { then, els, .. } => {
                let mut v = vec![&**then];
                if let Some(e) = els {
                    v.push(e);
                }
                v
            }
            StmtKind::For { init, body, .. } => {
                let mut v: Vec<&Stmt> = init.iter().collect();
                v.push(body);
                v
            }
            StmtKind::ForEach { body, .. } | StmtKind::While { body, .. } => vec![body],
            StmtKind::Block(b) => b.stmts.iter().collect(),
            StmtKind::Try { body, catches, finally } => {
                let mut v: Vec<&Stmt> = body.stmts.iter().collect();
                for c in catches {
                    v.extend(c.body.stmts.iter());
                }
                if let Some(f) = finally {
                    v.extend(f.stmts.iter());
                }
                v
            }
            _ => vec![],
        }
    }
}
