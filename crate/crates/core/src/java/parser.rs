//! Recursive-descent parser for the supported Java subset.
//!
//! Constructs outside the subset (lambdas, anonymous/local classes, switch,
//! method references, enums) do not fail the file: the enclosing statement or
//! member is skipped and a diagnostic is recorded.

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub message: String,
    /// Set when the construct is valid Java but outside the modeled subset.
    pub unsupported: bool,
}

/// A non-fatal note produced while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNote {
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub unit: CompilationUnit,
    pub notes: Vec<ParseNote>,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_compilation_unit(src: &str) -> PResult<Parsed> {
    let tokens = tokenize(src).map_err(|e| ParseError { line: e.line, message: e.message, unsupported: false })?;
    let mut p = Parser { src, toks: tokens, pos: 0, notes: Vec::new() };
    let unit = p.compilation_unit()?;
    Ok(Parsed { unit, notes: p.notes })
}

/// Parses a sequence of statements (used for reference snippets and round-trips).
pub fn parse_statements(src: &str) -> PResult<Vec<Stmt>> {
    let tokens = tokenize(src).map_err(|e| ParseError { line: e.line, message: e.message, unsupported: false })?;
    let mut p = Parser { src, toks: tokens, pos: 0, notes: Vec::new() };
    let mut out = Vec::new();
    while !p.at_eof() {
        out.push(p.statement()?);
    }
    Ok(out)
}

pub fn parse_expression(src: &str) -> PResult<Expr> {
    let tokens = tokenize(src).map_err(|e| ParseError { line: e.line, message: e.message, unsupported: false })?;
    let mut p = Parser { src, toks: tokens, pos: 0, notes: Vec::new() };
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.err("trailing tokens after expression"));
    }
    Ok(e)
}

const MODIFIER_WORDS: &[&str] = &[
    "public", "private", "protected", "static", "final", "abstract", "synchronized", "native",
    "transient", "volatile", "strictfp", "default",
];

const PRIMITIVES: &[&str] = &["int", "long", "short", "byte", "char", "boolean", "float", "double", "void"];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="];

struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
    notes: Vec<ParseNote>,
}

impl<'s> Parser<'s> {
    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> &TokenKind {
        &self.toks[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].kind
    }

    fn tok(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), TokenKind::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), TokenKind::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), TokenKind::Keyword(q) if *q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Token> {
        if self.is_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.err(&format!("expected `{p}`, found {}", self.peek())))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.err(&format!("expected identifier, found {other}"))),
        }
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError { line: self.tok().line, message: msg.to_string(), unsupported: false }
    }

    fn unsupported(&self, what: &str) -> ParseError {
        ParseError { line: self.tok().line, message: format!("unsupported construct: {what}"), unsupported: true }
    }

    fn span_from(&self, start: usize) -> Span {
        let first = &self.toks[start];
        let last_idx = if self.pos > start { self.pos - 1 } else { start };
        let last = &self.toks[last_idx];
        Span {
            start: first.start,
            end: last.end,
            start_line: first.line,
            end_line: self.line_of_end(last),
        }
    }

    fn line_of_end(&self, t: &Token) -> u32 {
        t.line + self.src[t.start..t.end].matches('\n').count() as u32
    }

    fn text(&self, from_tok: usize) -> String {
        let s = self.span_from(from_tok);
        self.src[s.start..s.end].to_string()
    }

    /// `>` immediately followed (no whitespace) by the given punct.
    fn adjacent(&self, n: usize, p: &str) -> bool {
        let a = &self.toks[(self.pos + n).min(self.toks.len() - 1)];
        let b = &self.toks[(self.pos + n + 1).min(self.toks.len() - 1)];
        a.end == b.start && matches!(&b.kind, TokenKind::Punct(q) if *q == p)
    }

    // ---- recovery -------------------------------------------------------

    /// Skips a statement or member starting at the current token. Stops after a
    /// `;` at depth zero or a closing brace that returns to depth zero.
    fn skip_construct(&mut self) {
        let mut depth = 0i32;
        loop {
            match self.peek().clone() {
                TokenKind::Eof => return,
                TokenKind::Punct(p) => {
                    self.bump();
                    match p {
                        "(" | "[" | "{" => depth += 1,
                        ")" | "]" => depth -= 1,
                        "}" => {
                            depth -= 1;
                            if depth <= 0 {
                                let cont = matches!(self.peek(), TokenKind::Keyword("else") | TokenKind::Keyword("catch") | TokenKind::Keyword("finally") | TokenKind::Keyword("while"))
                                    || matches!(self.peek(), TokenKind::Punct(")") | TokenKind::Punct(",") | TokenKind::Punct(";") | TokenKind::Punct("."));
                                if depth < 0 || !cont {
                                    if depth == 0 && self.is_punct(";") {
                                        self.bump();
                                    }
                                    return;
                                }
                            }
                        }
                        ";" if depth <= 0 => return,
                        _ => {}
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect_punct(open)?;
        let mut depth = 1;
        while depth > 0 {
            if self.at_eof() {
                return Err(self.err(&format!("unbalanced `{open}`")));
            }
            if self.is_punct(open) {
                depth += 1;
            } else if self.is_punct(close) {
                depth -= 1;
            }
            self.bump();
        }
        Ok(())
    }

    // ---- declarations ---------------------------------------------------

    fn compilation_unit(&mut self) -> PResult<CompilationUnit> {
        let mut package = None;
        let mut imports = Vec::new();
        if self.is_kw("package") {
            self.bump();
            package = Some(self.qualified_name()?);
            self.expect_punct(";")?;
        }
        while self.is_kw("import") {
            self.bump();
            let is_static = self.eat_kw("static");
            let mut name = self.qualified_name()?;
            if self.eat_punct(".") {
                self.expect_punct("*")?;
                name.push_str(".*");
            }
            if is_static {
                name = format!("static {name}");
            }
            imports.push(name);
            self.expect_punct(";")?;
        }
        let mut types = Vec::new();
        while !self.at_eof() {
            if self.eat_punct(";") {
                continue;
            }
            let start = self.pos;
            let mods = self.modifiers()?;
            if self.is_kw("class") || self.is_kw("interface") {
                types.push(self.type_decl(mods, start)?);
            } else if self.is_kw("enum") || self.is_punct("@") {
                let line = self.tok().line;
                self.notes.push(ParseNote { line, message: "unsupported construct: enum or annotation type skipped".into() });
                while !self.is_punct("{") && !self.at_eof() {
                    self.bump();
                }
                self.skip_balanced("{", "}")?;
            } else {
                return Err(self.err(&format!("expected type declaration, found {}", self.peek())));
            }
        }
        Ok(CompilationUnit { package, imports, types })
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.expect_ident()?;
        while self.is_punct(".") && matches!(self.peek_at(1), TokenKind::Ident(_)) {
            self.bump();
            name.push('.');
            name.push_str(&self.expect_ident()?);
        }
        Ok(name)
    }

    fn modifiers(&mut self) -> PResult<Modifiers> {
        let mut m = Modifiers::default();
        loop {
            match self.peek().clone() {
                TokenKind::Keyword(k) if MODIFIER_WORDS.contains(&k) => {
                    // `default` inside switch never reaches here; in interfaces it is a modifier.
                    self.bump();
                    match k {
                        "public" => m.is_public = true,
                        "private" => m.is_private = true,
                        "protected" => m.is_protected = true,
                        "static" => m.is_static = true,
                        "abstract" => m.is_abstract = true,
                        "final" => m.is_final = true,
                        _ => {}
                    }
                }
                TokenKind::Punct("@") if !matches!(self.peek_at(1), TokenKind::Keyword("interface")) => {
                    m.annotations.push(self.annotation()?);
                }
                _ => return Ok(m),
            }
        }
    }

    fn annotation(&mut self) -> PResult<Annotation> {
        self.expect_punct("@")?;
        let name = self.qualified_name()?;
        let mut args = Vec::new();
        if self.eat_punct("(") {
            while !self.is_punct(")") {
                let key = if matches!(self.peek(), TokenKind::Ident(_)) && matches!(self.peek_at(1), TokenKind::Punct("=")) {
                    let k = self.expect_ident()?;
                    self.bump();
                    k
                } else {
                    "value".to_string()
                };
                let start = self.pos;
                if self.is_punct("{") {
                    self.skip_balanced("{", "}")?;
                } else if self.is_punct("@") {
                    self.annotation()?;
                } else {
                    self.ternary()?;
                }
                args.push((key, self.text(start)));
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        Ok(Annotation { name, args })
    }

    fn type_decl(&mut self, modifiers: Modifiers, start: usize) -> PResult<TypeDecl> {
        let kind = if self.eat_kw("class") {
            TypeKind::Class
        } else {
            self.bump();
            TypeKind::Interface
        };
        let name = self.expect_ident()?;
        if self.is_punct("<") {
            self.skip_type_params()?;
        }
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_kw("extends") {
            extends.push(self.parse_type()?);
            while self.eat_punct(",") {
                extends.push(self.parse_type()?);
            }
        }
        if self.eat_kw("implements") {
            implements.push(self.parse_type()?);
            while self.eat_punct(",") {
                implements.push(self.parse_type()?);
            }
        }
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return Err(self.err("unterminated class body"));
            }
            let member_start = self.pos;
            match self.member(&name, kind) {
                Ok(Member::Fields(fs)) => fields.extend(fs),
                Ok(Member::Method(m)) => methods.push(m),
                Ok(Member::Skipped) => {}
                Err(e) if e.unsupported => {
                    self.notes.push(ParseNote { line: e.line, message: e.message });
                    self.pos = member_start;
                    self.skip_construct();
                }
                Err(e) => return Err(e),
            }
        }
        self.expect_punct("}")?;
        Ok(TypeDecl { name, kind, modifiers, extends, implements, fields, methods, span: self.span_from(start) })
    }

    fn skip_type_params(&mut self) -> PResult<()> {
        self.expect_punct("<")?;
        let mut depth = 1;
        while depth > 0 {
            if self.at_eof() {
                return Err(self.err("unbalanced type parameters"));
            }
            if self.is_punct("<") {
                depth += 1;
            } else if self.is_punct(">") {
                depth -= 1;
            }
            self.bump();
        }
        Ok(())
    }

    fn member(&mut self, class_name: &str, kind: TypeKind) -> PResult<Member> {
        if self.eat_punct(";") {
            return Ok(Member::Skipped);
        }
        let start = self.pos;
        let mut modifiers = self.modifiers()?;
        if kind == TypeKind::Interface && !modifiers.is_static {
            modifiers.is_abstract = true;
        }
        if self.is_kw("class") || self.is_kw("interface") || self.is_kw("enum") {
            return Err(self.unsupported("nested type declaration"));
        }
        if self.is_punct("{") {
            let line = self.tok().line;
            self.skip_balanced("{", "}")?;
            self.notes.push(ParseNote { line, message: "unsupported construct: initializer block skipped".into() });
            return Ok(Member::Skipped);
        }
        if self.is_punct("<") {
            self.skip_type_params()?;
        }
        // constructor
        if matches!(self.peek(), TokenKind::Ident(n) if n == class_name) && matches!(self.peek_at(1), TokenKind::Punct("(")) {
            self.bump();
            let params = self.params()?;
            self.throws_clause()?;
            let body = Some(self.block()?);
            return Ok(Member::Method(MethodDecl {
                name: "<init>".into(),
                modifiers,
                ret: None,
                params,
                body,
                is_constructor: true,
                span: self.span_from(start),
            }));
        }
        let ty = self.parse_type()?;
        let name = self.expect_ident()?;
        if self.is_punct("(") {
            let params = self.params()?;
            let mut ret = ty;
            while self.eat_punct("[") {
                self.expect_punct("]")?;
                ret.dims += 1;
            }
            self.throws_clause()?;
            let body = if self.eat_punct(";") {
                None
            } else {
                modifiers.is_abstract = false;
                Some(self.block()?)
            };
            return Ok(Member::Method(MethodDecl {
                name,
                modifiers,
                ret: Some(ret),
                params,
                body,
                is_constructor: false,
                span: self.span_from(start),
            }));
        }
        // field(s)
        let mut fields = Vec::new();
        let mut cur = name;
        loop {
            let mut fty = ty.clone();
            while self.eat_punct("[") {
                self.expect_punct("]")?;
                fty.dims += 1;
            }
            let init = if self.eat_punct("=") { Some(self.var_init()?) } else { None };
            fields.push(FieldDecl { name: cur, ty: fty, modifiers: modifiers.clone(), init, span: Span::default() });
            if self.eat_punct(",") {
                cur = self.expect_ident()?;
            } else {
                break;
            }
        }
        self.expect_punct(";")?;
        let span = self.span_from(start);
        for f in &mut fields {
            f.span = span;
        }
        Ok(Member::Fields(fields))
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        loop {
            self.modifiers()?;
            let mut ty = self.parse_type()?;
            let varargs = self.eat_punct("...");
            if varargs {
                ty.dims += 1;
            }
            let name = self.expect_ident()?;
            while self.eat_punct("[") {
                self.expect_punct("]")?;
                ty.dims += 1;
            }
            out.push(Param { name, ty, varargs });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn throws_clause(&mut self) -> PResult<()> {
        if self.eat_kw("throws") {
            self.qualified_name()?;
            while self.eat_punct(",") {
                self.qualified_name()?;
            }
        }
        Ok(())
    }

    /// Parses a type; generic arguments are consumed and erased.
    fn parse_type(&mut self) -> PResult<TypeRef> {
        let name = match self.peek().clone() {
            TokenKind::Keyword(k) if PRIMITIVES.contains(&k) => {
                self.bump();
                k.to_string()
            }
            TokenKind::Ident(_) => {
                let mut n = self.expect_ident()?;
                loop {
                    if self.is_punct("<") {
                        self.type_args()?;
                    }
                    if self.is_punct(".") && matches!(self.peek_at(1), TokenKind::Ident(_)) {
                        self.bump();
                        n.push('.');
                        n.push_str(&self.expect_ident()?);
                    } else {
                        break;
                    }
                }
                n
            }
            other => return Err(self.err(&format!("expected type, found {other}"))),
        };
        let mut dims = 0;
        while self.is_punct("[") && matches!(self.peek_at(1), TokenKind::Punct("]")) {
            self.bump();
            self.bump();
            dims += 1;
        }
        Ok(TypeRef { name, dims })
    }

    fn type_args(&mut self) -> PResult<()> {
        self.expect_punct("<")?;
        if self.eat_punct(">") {
            return Ok(());
        }
        loop {
            if self.eat_punct("?") {
                if self.eat_kw("extends") || self.eat_kw("super") {
                    self.parse_type()?;
                }
            } else {
                self.parse_type()?;
            }
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(">")?;
        Ok(())
    }

    // ---- statements -----------------------------------------------------

    fn block(&mut self) -> PResult<Block> {
        let start = self.pos;
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return Err(self.err("unterminated block"));
            }
            stmts.push(self.statement()?);
        }
        self.expect_punct("}")?;
        Ok(Block { stmts, span: self.span_from(start) })
    }

    /// Parses one statement, degrading unsupported constructs to `Opaque`.
    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        match self.statement_inner() {
            Ok(s) => Ok(s),
            Err(e) if e.unsupported => {
                self.notes.push(ParseNote { line: e.line, message: e.message.clone() });
                self.pos = start;
                self.skip_construct();
                let span = self.span_from(start);
                Ok(Stmt { kind: StmtKind::Opaque(self.src[span.start..span.end].to_string()), span })
            }
            Err(e) => Err(e),
        }
    }

    fn statement_inner(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let kind = match self.peek().clone() {
            TokenKind::Punct("{") => StmtKind::Block(self.block()?),
            TokenKind::Punct(";") => {
                self.bump();
                StmtKind::Empty
            }
            TokenKind::Keyword("if") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then = Box::new(self.statement()?);
                let els = if self.eat_kw("else") { Some(Box::new(self.statement()?)) } else { None };
                StmtKind::If { cond, then, els }
            }
            TokenKind::Keyword("while") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                StmtKind::While { cond, body }
            }
            TokenKind::Keyword("for") => self.for_statement()?,
            TokenKind::Keyword("return") => {
                self.bump();
                let e = if self.is_punct(";") { None } else { Some(self.expr()?) };
                self.expect_punct(";")?;
                StmtKind::Return(e)
            }
            TokenKind::Keyword("throw") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(";")?;
                StmtKind::Throw(e)
            }
            TokenKind::Keyword("break") => {
                self.bump();
                if matches!(self.peek(), TokenKind::Ident(_)) {
                    self.bump();
                }
                self.expect_punct(";")?;
                StmtKind::Break
            }
            TokenKind::Keyword("continue") => {
                self.bump();
                if matches!(self.peek(), TokenKind::Ident(_)) {
                    self.bump();
                }
                self.expect_punct(";")?;
                StmtKind::Continue
            }
            TokenKind::Keyword("try") => {
                self.bump();
                if self.is_punct("(") {
                    return Err(self.unsupported("try-with-resources"));
                }
                let body = self.block()?;
                let mut catches = Vec::new();
                while self.is_kw("catch") {
                    let cstart = self.pos;
                    self.bump();
                    self.expect_punct("(")?;
                    self.modifiers()?;
                    let ty = self.parse_type()?;
                    while self.eat_punct("|") {
                        self.parse_type()?;
                    }
                    let name = self.expect_ident()?;
                    self.expect_punct(")")?;
                    let cbody = self.block()?;
                    catches.push(CatchClause { ty, name, body: cbody, span: self.span_from(cstart) });
                }
                let finally = if self.eat_kw("finally") { Some(self.block()?) } else { None };
                if catches.is_empty() && finally.is_none() {
                    return Err(self.err("try without catch or finally"));
                }
                StmtKind::Try { body, catches, finally }
            }
            TokenKind::Keyword("switch") => return Err(self.unsupported("switch statement")),
            TokenKind::Keyword("do") => return Err(self.unsupported("do-while statement")),
            TokenKind::Keyword("synchronized") => return Err(self.unsupported("synchronized block")),
            TokenKind::Keyword("assert") => return Err(self.unsupported("assert keyword")),
            TokenKind::Keyword("class") | TokenKind::Keyword("interface") | TokenKind::Keyword("enum") => {
                return Err(self.unsupported("local type declaration"))
            }
            TokenKind::Ident(_) if matches!(self.peek_at(1), TokenKind::Punct(":")) => {
                return Err(self.unsupported("labeled statement"))
            }
            _ => {
                if let Some(kind) = self.try_local_var()? {
                    self.expect_punct(";")?;
                    kind
                } else {
                    let e = self.expr()?;
                    self.expect_punct(";")?;
                    StmtKind::Expr(e)
                }
            }
        };
        Ok(Stmt { kind, span: self.span_from(start) })
    }

    /// Speculatively parses `[final] Type name ...`; restores position on mismatch.
    fn try_local_var(&mut self) -> PResult<Option<StmtKind>> {
        let save = self.pos;
        let save_notes = self.notes.len();
        let mods = match self.modifiers() {
            Ok(m) => m,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        let looks_like_decl = match self.parse_type() {
            Ok(_) => matches!(self.peek(), TokenKind::Ident(_))
                && matches!(self.peek_at(1), TokenKind::Punct("=") | TokenKind::Punct(";") | TokenKind::Punct(",") | TokenKind::Punct("[") | TokenKind::Punct(":")),
            Err(_) => false,
        };
        self.pos = save;
        self.notes.truncate(save_notes);
        if !looks_like_decl {
            return Ok(None);
        }
        self.modifiers()?;
        let ty = self.parse_type()?;
        let decls = self.declarators()?;
        Ok(Some(StmtKind::LocalVar { is_final: mods.is_final, ty, decls }))
    }

    fn declarators(&mut self) -> PResult<Vec<Declarator>> {
        let mut decls = Vec::new();
        loop {
            let name = self.expect_ident()?;
            let mut dims = 0;
            while self.eat_punct("[") {
                self.expect_punct("]")?;
                dims += 1;
            }
            let init = if self.eat_punct("=") { Some(self.var_init()?) } else { None };
            decls.push(Declarator { name, dims, init });
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(decls)
    }

    fn var_init(&mut self) -> PResult<Expr> {
        if self.is_punct("{") {
            self.array_init()
        } else {
            self.expr()
        }
    }

    fn array_init(&mut self) -> PResult<Expr> {
        let start = self.pos;
        self.expect_punct("{")?;
        let mut items = Vec::new();
        while !self.is_punct("}") {
            items.push(self.var_init()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok(Expr { kind: ExprKind::ArrayInit(items), span: self.span_from(start) })
    }

    fn for_statement(&mut self) -> PResult<StmtKind> {
        self.bump();
        self.expect_punct("(")?;
        // for-each?
        let save = self.pos;
        let mods = self.modifiers()?;
        if let Ok(ty) = self.parse_type() {
            if matches!(self.peek(), TokenKind::Ident(_)) && matches!(self.peek_at(1), TokenKind::Punct(":")) {
                let name = self.expect_ident()?;
                self.expect_punct(":")?;
                let iter = self.expr()?;
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                return Ok(StmtKind::ForEach { is_final: mods.is_final, ty, name, iter, body });
            }
        }
        self.pos = save;
        let mut init = Vec::new();
        if !self.is_punct(";") {
            let istart = self.pos;
            if let Some(kind) = self.try_local_var()? {
                init.push(Stmt { kind, span: self.span_from(istart) });
            } else {
                loop {
                    let estart = self.pos;
                    let e = self.expr()?;
                    init.push(Stmt { kind: StmtKind::Expr(e), span: self.span_from(estart) });
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            }
        }
        self.expect_punct(";")?;
        let cond = if self.is_punct(";") { None } else { Some(self.expr()?) };
        self.expect_punct(";")?;
        let mut update = Vec::new();
        if !self.is_punct(")") {
            loop {
                update.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        let body = Box::new(self.statement()?);
        Ok(StmtKind::For { init, cond, update, body })
    }

    // ---- expressions ----------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        let start = self.pos;
        if matches!(self.peek(), TokenKind::Ident(_)) && matches!(self.peek_at(1), TokenKind::Punct("->")) {
            return Err(self.unsupported("lambda expression"));
        }
        let lhs = self.ternary()?;
        let op = match self.peek() {
            TokenKind::Punct(p) if ASSIGN_OPS.contains(p) => Some(*p),
            TokenKind::Punct(">") if self.adjacent(0, ">=") => Some(">>="),
            TokenKind::Punct(">") if self.adjacent(0, ">") && self.adjacent(1, ">=") => Some(">>>="),
            TokenKind::Punct(">>>=") => Some(">>>="),
            _ => None,
        };
        if let Some(op) = op {
            match op {
                ">>=" => {
                    self.bump();
                    self.bump();
                }
                ">>>=" if self.is_punct(">") => {
                    self.bump();
                    self.bump();
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
            let value = if self.is_punct("{") { self.array_init()? } else { self.expr()? };
            return Ok(Expr {
                kind: ExprKind::Assign { op, target: Box::new(lhs), value: Box::new(value) },
                span: self.span_from(start),
            });
        }
        Ok(lhs)
    }

    fn ternary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let cond = self.binary(0)?;
        if self.eat_punct("?") {
            let then = self.ternary_branch()?;
            self.expect_punct(":")?;
            let els = self.ternary_branch()?;
            return Ok(Expr {
                kind: ExprKind::Conditional { cond: Box::new(cond), then: Box::new(then), els: Box::new(els) },
                span: self.span_from(start),
            });
        }
        Ok(cond)
    }

    fn ternary_branch(&mut self) -> PResult<Expr> {
        if matches!(self.peek(), TokenKind::Ident(_)) && matches!(self.peek_at(1), TokenKind::Punct("->")) {
            return Err(self.unsupported("lambda expression"));
        }
        self.ternary()
    }

    /// Returns the binary operator at the cursor for the given precedence level
    /// and how many tokens it spans.
    fn binop_at(&self, level: usize) -> Option<(&'static str, usize)> {
        let p = match self.peek() {
            TokenKind::Punct(p) => *p,
            TokenKind::Keyword("instanceof") if level == 6 => return Some(("instanceof", 1)),
            _ => return None,
        };
        let found = match p {
            ">" if self.adjacent(0, ">") && self.adjacent(1, ">") && !self.adjacent(2, "=") && !self.adjacent(2, ">=") => {
                (">>>", 3)
            }
            ">" if self.adjacent(0, ">") && !self.adjacent(1, "=") && !self.adjacent(1, ">=") && !self.adjacent(1, ">") => {
                (">>", 2)
            }
            ">" if self.adjacent(0, ">=") => return None,
            other => (other, 1),
        };
        let lvl = match found.0 {
            "||" => 0,
            "&&" => 1,
            "|" => 2,
            "^" => 3,
            "&" => 4,
            "==" | "!=" => 5,
            "<" | ">" | "<=" | ">=" => 6,
            "<<" | ">>" | ">>>" => 7,
            "+" | "-" => 8,
            "*" | "/" | "%" => 9,
            _ => return None,
        };
        (lvl == level).then_some(found)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        if level > 9 {
            return self.unary();
        }
        let start = self.pos;
        let mut lhs = self.binary(level + 1)?;
        while let Some((op, ntoks)) = self.binop_at(level) {
            for _ in 0..ntoks {
                self.bump();
            }
            if op == "instanceof" {
                let ty = self.parse_type()?;
                lhs = Expr { kind: ExprKind::InstanceOf { expr: Box::new(lhs), ty }, span: self.span_from(start) };
                continue;
            }
            let rhs = self.binary(level + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) },
                span: self.span_from(start),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        if let TokenKind::Punct(p) = self.peek().clone() {
            if matches!(p, "+" | "-" | "!" | "~" | "++" | "--") {
                self.bump();
                let operand = self.unary()?;
                return Ok(Expr { kind: ExprKind::Unary { op: p, operand: Box::new(operand) }, span: self.span_from(start) });
            }
            if p == "(" {
                if let Some(cast) = self.try_cast()? {
                    return Ok(cast);
                }
            }
        }
        self.postfix()
    }

    fn try_cast(&mut self) -> PResult<Option<Expr>> {
        let start = self.pos;
        self.bump();
        let ty = match self.parse_type() {
            Ok(t) => t,
            Err(_) => {
                self.pos = start;
                return Ok(None);
            }
        };
        while self.eat_punct("&") {
            if self.parse_type().is_err() {
                self.pos = start;
                return Ok(None);
            }
        }
        if !self.eat_punct(")") {
            self.pos = start;
            return Ok(None);
        }
        if self.is_punct("->") {
            return Err(self.unsupported("lambda expression"));
        }
        let is_cast = if ty.is_primitive() || ty.is_array() {
            !matches!(self.peek(), TokenKind::Punct(p) if !matches!(*p, "(" | "-" | "+" | "!" | "~" | "++" | "--"))
                && !matches!(self.peek(), TokenKind::Eof)
        } else {
            matches!(
                self.peek(),
                TokenKind::Ident(_)
                    | TokenKind::IntLit(_)
                    | TokenKind::FloatLit(_)
                    | TokenKind::CharLit(_)
                    | TokenKind::StrLit(_)
                    | TokenKind::Keyword("this")
                    | TokenKind::Keyword("super")
                    | TokenKind::Keyword("new")
                    | TokenKind::Keyword("true")
                    | TokenKind::Keyword("false")
                    | TokenKind::Keyword("null")
                    | TokenKind::Punct("(")
                    | TokenKind::Punct("!")
                    | TokenKind::Punct("~")
            )
        };
        if !is_cast {
            self.pos = start;
            return Ok(None);
        }
        let expr = self.unary()?;
        Ok(Some(Expr { kind: ExprKind::Cast { ty, expr: Box::new(expr) }, span: self.span_from(start) }))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let mut e = self.primary()?;
        loop {
            if self.is_punct(".") {
                self.bump();
                if self.is_punct("<") {
                    self.type_args()?;
                }
                match self.peek().clone() {
                    TokenKind::Ident(name) => {
                        self.bump();
                        if self.is_punct("(") {
                            let args = self.args()?;
                            e = Expr {
                                kind: ExprKind::Call { target: Some(Box::new(e)), name, args },
                                span: self.span_from(start),
                            };
                        } else {
                            e = Expr { kind: ExprKind::FieldAccess { target: Box::new(e), name }, span: self.span_from(start) };
                        }
                    }
                    TokenKind::Keyword("class") => {
                        self.bump();
                        let ty = expr_to_type(&e, 0).ok_or_else(|| self.err("invalid class literal"))?;
                        e = Expr { kind: ExprKind::ClassLit(ty), span: self.span_from(start) };
                    }
                    TokenKind::Keyword("this") | TokenKind::Keyword("new") => {
                        return Err(self.unsupported("qualified this/new"));
                    }
                    other => return Err(self.err(&format!("expected member name, found {other}"))),
                }
            } else if self.is_punct("[") {
                if matches!(self.peek_at(1), TokenKind::Punct("]")) {
                    // `Name[].class`
                    let mut dims = 0;
                    while self.is_punct("[") && matches!(self.peek_at(1), TokenKind::Punct("]")) {
                        self.bump();
                        self.bump();
                        dims += 1;
                    }
                    self.expect_punct(".")?;
                    if !self.eat_kw("class") {
                        return Err(self.err("expected `class` after array type"));
                    }
                    let ty = expr_to_type(&e, dims).ok_or_else(|| self.err("invalid class literal"))?;
                    e = Expr { kind: ExprKind::ClassLit(ty), span: self.span_from(start) };
                    continue;
                }
                self.bump();
                let index = self.expr()?;
                self.expect_punct("]")?;
                e = Expr { kind: ExprKind::Index { target: Box::new(e), index: Box::new(index) }, span: self.span_from(start) };
            } else if self.is_punct("++") || self.is_punct("--") {
                let op = if self.is_punct("++") { "++" } else { "--" };
                self.bump();
                e = Expr { kind: ExprKind::Postfix { op, operand: Box::new(e) }, span: self.span_from(start) };
            } else if self.is_punct("::") {
                return Err(self.unsupported("method reference"));
            } else {
                return Ok(e);
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        loop {
            if self.is_punct("(") && self.looks_like_lambda_params() {
                return Err(self.unsupported("lambda expression"));
            }
            out.push(self.expr()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn looks_like_lambda_params(&self) -> bool {
        let mut depth = 0;
        let mut i = self.pos;
        while i < self.toks.len() {
            match &self.toks[i].kind {
                TokenKind::Punct("(") => depth += 1,
                TokenKind::Punct(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(self.toks.get(i + 1).map(|t| &t.kind), Some(TokenKind::Punct("->")));
                    }
                }
                TokenKind::Eof => return false,
                _ => {}
            }
            i += 1;
        }
        false
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let kind = match self.peek().clone() {
            TokenKind::IntLit(s) => {
                self.bump();
                ExprKind::Literal(Literal::Int(s))
            }
            TokenKind::FloatLit(s) => {
                self.bump();
                ExprKind::Literal(Literal::Float(s))
            }
            TokenKind::CharLit(s) => {
                self.bump();
                ExprKind::Literal(Literal::Char(s))
            }
            TokenKind::StrLit(s) => {
                self.bump();
                ExprKind::Literal(Literal::Str(s))
            }
            TokenKind::Keyword("true") => {
                self.bump();
                ExprKind::Literal(Literal::Bool(true))
            }
            TokenKind::Keyword("false") => {
                self.bump();
                ExprKind::Literal(Literal::Bool(false))
            }
            TokenKind::Keyword("null") => {
                self.bump();
                ExprKind::Literal(Literal::Null)
            }
            TokenKind::Keyword("this") => {
                self.bump();
                if self.is_punct("(") {
                    ExprKind::CtorCall { is_super: false, args: self.args()? }
                } else {
                    ExprKind::This
                }
            }
            TokenKind::Keyword("super") => {
                self.bump();
                if self.is_punct("(") {
                    ExprKind::CtorCall { is_super: true, args: self.args()? }
                } else {
                    ExprKind::Super
                }
            }
            TokenKind::Punct("(") => {
                if self.looks_like_lambda_params() {
                    return Err(self.unsupported("lambda expression"));
                }
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                ExprKind::Paren(Box::new(e))
            }
            TokenKind::Keyword("new") => {
                self.bump();
                let mut ty = self.parse_type_no_dims()?;
                if self.is_punct("[") {
                    let mut dims = Vec::new();
                    while self.is_punct("[") && !matches!(self.peek_at(1), TokenKind::Punct("]")) {
                        self.bump();
                        dims.push(self.expr()?);
                        self.expect_punct("]")?;
                    }
                    let mut extra = 0;
                    while self.is_punct("[") && matches!(self.peek_at(1), TokenKind::Punct("]")) {
                        self.bump();
                        self.bump();
                        extra += 1;
                    }
                    ty.dims = dims.len() + extra;
                    let init = if self.is_punct("{") {
                        match self.array_init()?.kind {
                            ExprKind::ArrayInit(items) => Some(items),
                            _ => unreachable!(),
                        }
                    } else {
                        None
                    };
                    ExprKind::NewArray { ty, dims, init }
                } else {
                    let args = self.args()?;
                    if self.is_punct("{") {
                        return Err(self.unsupported("anonymous class"));
                    }
                    ExprKind::New { ty, args }
                }
            }
            TokenKind::Keyword(k) if PRIMITIVES.contains(&k) => {
                // `int.class`, `int[].class`
                self.bump();
                let mut dims = 0;
                while self.is_punct("[") && matches!(self.peek_at(1), TokenKind::Punct("]")) {
                    self.bump();
                    self.bump();
                    dims += 1;
                }
                self.expect_punct(".")?;
                if !self.eat_kw("class") {
                    return Err(self.err("expected `.class` after primitive type"));
                }
                ExprKind::ClassLit(TypeRef { name: k.to_string(), dims })
            }
            TokenKind::Ident(name) => {
                self.bump();
                if self.is_punct("->") {
                    return Err(self.unsupported("lambda expression"));
                }
                if self.is_punct("(") {
                    ExprKind::Call { target: None, name, args: self.args()? }
                } else {
                    ExprKind::Name(name)
                }
            }
            TokenKind::Punct("{") => return self.array_init(),
            other => return Err(self.err(&format!("expected expression, found {other}"))),
        };
        Ok(Expr { kind, span: self.span_from(start) })
    }

    fn parse_type_no_dims(&mut self) -> PResult<TypeRef> {
        let name = match self.peek().clone() {
            TokenKind::Keyword(k) if PRIMITIVES.contains(&k) => {
                self.bump();
                k.to_string()
            }
            _ => {
                let mut n = self.expect_ident()?;
                loop {
                    if self.is_punct("<") {
                        self.type_args()?;
                    }
                    if self.is_punct(".") && matches!(self.peek_at(1), TokenKind::Ident(_)) {
                        self.bump();
                        n.push('.');
                        n.push_str(&self.expect_ident()?);
                    } else {
                        break;
                    }
                }
                n
            }
        };
        Ok(TypeRef { name, dims: 0 })
    }
}

enum Member {
    Fields(Vec<FieldDecl>),
    Method(MethodDecl),
    Skipped,
}

fn expr_to_type(e: &Expr, dims: usize) -> Option<TypeRef> {
    fn dotted(e: &Expr) -> Option<String> {
        match &e.kind {
            ExprKind::Name(n) => Some(n.clone()),
            ExprKind::FieldAccess { target, name } => Some(format!("{}.{}", dotted(target)?, name)),
            _ => None,
        }
    }
    Some(TypeRef { name: dotted(e)?, dims })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stmt(src: &str) -> Stmt {
        let mut v = parse_statements(src).unwrap();
        assert_eq!(v.len(), 1, "{src}");
        v.remove(0)
    }

    #[test]
    fn generic_local_declaration() {
        let s = stmt("ArrayTable<String, Integer, Character> table = create(\"foo\", 1, 'a');");
        match s.kind {
            StmtKind::LocalVar { ty, decls, .. } => {
                assert_eq!(ty.name, "ArrayTable");
                assert_eq!(decls[0].name, "table");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_is_not_a_declaration() {
        let s = stmt("a = b < c;");
        assert!(matches!(s.kind, StmtKind::Expr(Expr { kind: ExprKind::Assign { .. }, .. })));
    }

    #[test]
    fn casts_with_qualified_types() {
        let s = stmt("Map.Entry entry = (Map.Entry) iter.next();");
        let StmtKind::LocalVar { decls, ty, .. } = s.kind else { panic!() };
        assert_eq!(ty.name, "Map.Entry");
        assert!(matches!(decls[0].init.as_ref().unwrap().kind, ExprKind::Cast { .. }));
    }

    #[test]
    fn parenthesized_is_not_cast() {
        let e = parse_expression("(a) + b").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary { op: "+", .. }));
        let e = parse_expression("(int) x").unwrap();
        assert!(matches!(e.kind, ExprKind::Cast { .. }));
    }

    #[test]
    fn shift_versus_generics() {
        let e = parse_expression("a >> 2").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary { op: ">>", .. }));
        let e = parse_expression("a > b").unwrap();
        assert!(matches!(e.kind, ExprKind::Binary { op: ">", .. }));
        let s = stmt("Map<String, List<Integer>> m = new HashMap<String, List<Integer>>();");
        assert!(matches!(s.kind, StmtKind::LocalVar { .. }));
    }

    #[test]
    fn for_forms() {
        let s = stmt("for (Iterator iter = map.entrySet().iterator(); iter.hasNext();) { x(); }");
        let StmtKind::For { init, cond, update, .. } = s.kind else { panic!() };
        assert_eq!(init.len(), 1);
        assert!(cond.is_some());
        assert!(update.is_empty());
        let s = stmt("for (final String urlString : tests) { a.b(urlString); }");
        assert!(matches!(s.kind, StmtKind::ForEach { is_final: true, .. }));
    }

    #[test]
    fn array_creation_and_initializers() {
        let s = stmt("IProxy proxy = new Proxy(\"sizes\", new String[]{\"7\", \"13\", \"21\"});");
        assert!(matches!(s.kind, StmtKind::LocalVar { .. }));
        let s = stmt("final String[] tests = { \"a\", \"b\" };");
        let StmtKind::LocalVar { ty, decls, .. } = s.kind else { panic!() };
        assert_eq!(ty.dims, 1);
        assert!(matches!(decls[0].init.as_ref().unwrap().kind, ExprKind::ArrayInit(_)));
    }

    #[test]
    fn lambdas_become_opaque() {
        let src = "class A { void m() { list.forEach(x -> { foo(x); }); int y = 1; } }";
        let parsed = parse_compilation_unit(src).unwrap();
        let body = parsed.unit.types[0].methods[0].body.as_ref().unwrap();
        assert!(matches!(body.stmts[0].kind, StmtKind::Opaque(_)));
        assert!(matches!(body.stmts[1].kind, StmtKind::LocalVar { .. }));
        assert_eq!(parsed.notes.len(), 1);
    }

    #[test]
    fn switch_and_anonymous_classes_become_opaque() {
        let src = "class A { void m() { switch (x) { case 1: a(); break; } Runnable r = new Runnable() { public void run() {} }; b(); } }";
        let parsed = parse_compilation_unit(src).unwrap();
        let body = parsed.unit.types[0].methods[0].body.as_ref().unwrap();
        assert_eq!(body.stmts.len(), 3);
        assert!(matches!(body.stmts[0].kind, StmtKind::Opaque(_)));
        assert!(matches!(body.stmts[1].kind, StmtKind::Opaque(_)));
        assert!(matches!(body.stmts[2].kind, StmtKind::Expr(_)));
    }

    #[test]
    fn annotations_with_arguments() {
        let src = "class T { @Test(expected = IOException.class) public void foo() {} }";
        let parsed = parse_compilation_unit(src).unwrap();
        let m = &parsed.unit.types[0].methods[0];
        assert_eq!(m.modifiers.annotations[0].name, "Test");
        assert_eq!(m.modifiers.annotations[0].args, vec![("expected".to_string(), "IOException.class".to_string())]);
    }

    #[test]
    fn nested_types_are_skipped() {
        let src = "class A { class B { int x; } int y; void m() {} }";
        let parsed = parse_compilation_unit(src).unwrap();
        assert_eq!(parsed.unit.types[0].fields.len(), 1);
        assert_eq!(parsed.unit.types[0].methods.len(), 1);
        assert_eq!(parsed.notes.len(), 1);
    }

    #[test]
    fn syntax_error_is_fatal() {
        assert!(parse_compilation_unit("class A { void m() { int x = ; } }").is_err());
    }

    #[test]
    fn spans_cover_multiline_statements() {
        let src = "class A { void m() {\n  a.b(1,\n   2);\n} }";
        let parsed = parse_compilation_unit(src).unwrap();
        let s = &parsed.unit.types[0].methods[0].body.as_ref().unwrap().stmts[0];
        assert_eq!((s.span.start_line, s.span.end_line), (2, 3));
        assert_eq!(&src[s.span.start..s.span.end], "a.b(1,\n   2);");
    }
}
