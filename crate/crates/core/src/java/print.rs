//! Pretty-printer producing re-parseable source for the supported subset.

use super::ast::*;

pub fn print_stmt(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s, 0);
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn write_block(out: &mut String, b: &Block, level: usize) {
    out.push_str("{\n");
    for s in &b.stmts {
        write_stmt(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn write_local(out: &mut String, is_final: bool, ty: &TypeRef, decls: &[Declarator]) {
    if is_final {
        out.push_str("final ");
    }
    out.push_str(&ty.display());
    out.push(' ');
    for (i, d) in decls.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&d.name);
        for _ in 0..d.dims {
            out.push_str("[]");
        }
        if let Some(init) = &d.init {
            out.push_str(" = ");
            write_expr(out, init);
        }
    }
}

fn write_stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::LocalVar { is_final, ty, decls } => {
            write_local(out, *is_final, ty, decls);
            out.push(';');
        }
        StmtKind::Expr(e) => {
            write_expr(out, e);
            out.push(';');
        }
        StmtKind::If { cond, then, els } => {
            out.push_str("if (");
            write_expr(out, cond);
            out.push_str(")\n");
            write_stmt(out, then, level + 1);
            if let Some(e) = els {
                indent(out, level);
                out.push_str("else\n");
                write_stmt(out, e, level + 1);
            }
            return;
        }
        StmtKind::For { init, cond, update, body } => {
            out.push_str("for (");
            for (i, s) in init.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                match &s.kind {
                    StmtKind::LocalVar { is_final, ty, decls } => write_local(out, *is_final, ty, decls),
                    StmtKind::Expr(e) => write_expr(out, e),
                    _ => {}
                }
            }
            out.push_str("; ");
            if let Some(c) = cond {
                write_expr(out, c);
            }
            out.push_str("; ");
            for (i, u) in update.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, u);
            }
            out.push_str(")\n");
            write_stmt(out, body, level + 1);
            return;
        }
        StmtKind::ForEach { is_final, ty, name, iter, body } => {
            out.push_str("for (");
            if *is_final {
                out.push_str("final ");
            }
            out.push_str(&format!("{} {} : ", ty.display(), name));
            write_expr(out, iter);
            out.push_str(")\n");
            write_stmt(out, body, level + 1);
            return;
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            write_expr(out, cond);
            out.push_str(")\n");
            write_stmt(out, body, level + 1);
            return;
        }
        StmtKind::Return(e) => {
            out.push_str("return");
            if let Some(e) = e {
                out.push(' ');
                write_expr(out, e);
            }
            out.push(';');
        }
        StmtKind::Throw(e) => {
            out.push_str("throw ");
            write_expr(out, e);
            out.push(';');
        }
        StmtKind::Block(b) => write_block(out, b, level),
        StmtKind::Try { body, catches, finally } => {
            out.push_str("try ");
            write_block(out, body, level);
            for c in catches {
                out.push_str(&format!(" catch ({} {}) ", c.ty.display(), c.name));
                write_block(out, &c.body, level);
            }
            if let Some(f) = finally {
                out.push_str(" finally ");
                write_block(out, f, level);
            }
        }
        StmtKind::Break => out.push_str("break;"),
        StmtKind::Continue => out.push_str("continue;"),
        StmtKind::Empty => out.push(';'),
        StmtKind::Opaque(text) => out.push_str(text),
    }
    out.push('\n');
}

fn write_args(out: &mut String, args: &[Expr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Literal(l) => match l {
            Literal::Int(s) | Literal::Float(s) => out.push_str(s),
            Literal::Char(s) => out.push_str(&format!("'{s}'")),
            Literal::Str(s) => out.push_str(&format!("\"{s}\"")),
            Literal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Literal::Null => out.push_str("null"),
        },
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::This => out.push_str("this"),
        ExprKind::Super => out.push_str("super"),
        ExprKind::FieldAccess { target, name } => {
            write_expr(out, target);
            out.push('.');
            out.push_str(name);
        }
        ExprKind::Call { target, name, args } => {
            if let Some(t) = target {
                write_expr(out, t);
                out.push('.');
            }
            out.push_str(name);
            write_args(out, args);
        }
        ExprKind::CtorCall { is_super, args } => {
            out.push_str(if *is_super { "super" } else { "this" });
            write_args(out, args);
        }
        ExprKind::New { ty, args } => {
            out.push_str("new ");
            out.push_str(&ty.display());
            write_args(out, args);
        }
        ExprKind::NewArray { ty, dims, init } => {
            out.push_str("new ");
            out.push_str(&ty.name);
            for d in dims {
                out.push('[');
                write_expr(out, d);
                out.push(']');
            }
            for _ in dims.len()..ty.dims {
                out.push_str("[]");
            }
            if let Some(items) = init {
                write_array_init(out, items);
            }
        }
        ExprKind::ArrayInit(items) => write_array_init(out, items),
        ExprKind::Index { target, index } => {
            write_expr(out, target);
            out.push('[');
            write_expr(out, index);
            out.push(']');
        }
        ExprKind::Assign { op, target, value } => {
            write_expr(out, target);
            out.push_str(&format!(" {op} "));
            write_expr(out, value);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            write_operand(out, lhs);
            out.push_str(&format!(" {op} "));
            write_operand(out, rhs);
        }
        ExprKind::Unary { op, operand } => {
            out.push_str(op);
            write_operand(out, operand);
        }
        ExprKind::Postfix { op, operand } => {
            write_operand(out, operand);
            out.push_str(op);
        }
        ExprKind::Cast { ty, expr } => {
            out.push_str(&format!("({}) ", ty.display()));
            write_operand(out, expr);
        }
        ExprKind::Conditional { cond, then, els } => {
            write_operand(out, cond);
            out.push_str(" ? ");
            write_operand(out, then);
            out.push_str(" : ");
            write_operand(out, els);
        }
        ExprKind::InstanceOf { expr, ty } => {
            write_operand(out, expr);
            out.push_str(" instanceof ");
            out.push_str(&ty.display());
        }
        ExprKind::ClassLit(ty) => {
            out.push_str(&ty.display());
            out.push_str(".class");
        }
        ExprKind::Paren(inner) => {
            out.push('(');
            write_expr(out, inner);
            out.push(')');
        }
    }
}

/// Compound operands are parenthesized so precedence survives a round-trip.
fn write_operand(out: &mut String, e: &Expr) {
    let compound = matches!(
        e.kind,
        ExprKind::Binary { .. }
            | ExprKind::Assign { .. }
            | ExprKind::Conditional { .. }
            | ExprKind::Cast { .. }
            | ExprKind::InstanceOf { .. }
            | ExprKind::Unary { .. }
    );
    if compound {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_array_init(out: &mut String, items: &[Expr]) {
    out.push('{');
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push('}');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::parser::parse_statements;

    #[test]
    fn printed_statements_reparse() {
        let src = r#"
            final String[] tests = { "a", "b" };
            for (Iterator iter = map.entrySet().iterator(); iter.hasNext();) {
                Map.Entry entry = (Map.Entry) iter.next();
                if (entry.getKey().equals("g")) iter.remove(); else x = -y * (a + b);
            }
            try { a.b(); } catch (Exception e) { fail(); }
        "#;
        let stmts = parse_statements(src).unwrap();
        let printed: String = stmts.iter().map(print_stmt).collect();
        let again = parse_statements(&printed).unwrap();
        let reprinted: String = again.iter().map(print_stmt).collect();
        assert_eq!(printed, reprinted);
    }
}
