//! Comparison of generated examples against a reference dataset.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::synthesis::{Example, ExampleSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    /// `Class#method`, simple or qualified.
    pub test_id: String,
    /// `Class#method(sig)`, simple or qualified.
    pub focal: String,
    pub statements: Vec<String>,
    /// Identifiers the reference itself leaves undeclared.
    #[serde(default)]
    pub undeclared_identifiers: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceDataset {
    pub entries: Vec<ReferenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("schema error: {0}")]
    Schema(String),
}

impl ReferenceDataset {
    /// Rejects datasets with two entries for the same test and focal method.
    pub fn validate(&self) -> Result<(), EvalError> {
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if !seen.insert((e.test_id.as_str(), e.focal.as_str())) {
                return Err(EvalError::Schema(format!("duplicate entry {} {}", e.test_id, e.focal)));
            }
        }
        Ok(())
    }

    /// One entry per (test, focal) pair of a generated set, first example wins.
    pub fn from_examples(set: &ExampleSet) -> Self {
        let mut seen = BTreeSet::new();
        let entries = set
            .examples
            .iter()
            .filter(|e| seen.insert((e.source_test.clone(), e.focal.clone())))
            .map(|e| ReferenceEntry {
                test_id: e.source_test.clone(),
                focal: e.focal.clone(),
                statements: e.statements.iter().map(|s| s.text.clone()).collect(),
                undeclared_identifiers: e.undeclared_identifiers.clone(),
            })
            .collect();
        ReferenceDataset { entries }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryVerdict {
    pub test_id: String,
    pub focal: String,
    pub matched: bool,
    pub complete: bool,
    pub concise: bool,
    pub reference_statements: usize,
    /// Size of the best generated candidate, if any matched.
    pub generated_statements: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fitness: f64,
    pub completeness: f64,
    pub conciseness: f64,
    pub entries: Vec<EntryVerdict>,
}

fn strip_comments(s: &str) -> String {
    let b = s.as_bytes();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    let mut quote: Option<u8> = None;
    while i < b.len() {
        let c = b[i];
        if let Some(q) = quote {
            if c == b'\\' && i + 1 < b.len() {
                out.push_str(&s[i..i + 2]);
                i += 2;
                continue;
            }
            if c == q {
                quote = None;
            }
        } else if c == b'"' || c == b'\'' {
            quote = Some(c);
        } else if s[i..].starts_with("//") {
            i = s[i..].find('\n').map_or(b.len(), |n| i + n);
            continue;
        } else if s[i..].starts_with("/*") {
            i = s[i + 2..].find("*/").map_or(b.len(), |n| i + n + 4);
            out.push(' ');
            continue;
        }
        let ch = s[i..].chars().next().unwrap();
        out.push(ch);
        i += ch.len_utf8();
    }
    out
}

/// Comments stripped, whitespace collapsed to single spaces, no space before
/// a trailing semicolon.
pub fn normalize_statement(s: &str) -> String {
    let collapsed = strip_comments(s).split_whitespace().collect::<Vec<_>>().join(" ");
    match collapsed.strip_suffix(';') {
        Some(head) => format!("{};", head.trim_end()),
        None => collapsed,
    }
}

/// `T x = e;` and `x = e;` compare equal: a reference may fold a later
/// reassignment into the declaration.
pub fn statement_core(normalized: &str) -> String {
    let Some(eq) = top_level_assign(normalized) else { return normalized.to_string() };
    let (lhs, rhs) = normalized.split_at(eq);
    let toks: Vec<&str> = lhs.split_whitespace().collect();
    match toks.last() {
        Some(name) if toks.len() >= 2 && is_ident(name) => format!("{name} {}", rhs.trim_start()),
        _ => normalized.to_string(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$') && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

/// Byte offset of the first plain `=` outside parentheses and literals.
fn top_level_assign(s: &str) -> Option<usize> {
    let b = s.as_bytes();
    let mut depth = 0i32;
    let mut quote = None;
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match quote {
            Some(q) => {
                if c == b'\\' {
                    i += 1;
                } else if c == q {
                    quote = None;
                }
            }
            None => match c {
                b'"' | b'\'' => quote = Some(c),
                b'(' | b'[' | b'{' => depth += 1,
                b')' | b']' | b'}' => depth -= 1,
                b'=' if depth == 0 => {
                    let prev = if i > 0 { b[i - 1] } else { b' ' };
                    let next = b.get(i + 1).copied().unwrap_or(b' ');
                    if next != b'=' && !b"=!<>+-*/%&|^".contains(&prev) {
                        return Some(i);
                    }
                    if next == b'=' {
                        i += 1;
                    }
                }
                _ => {}
            },
        }
        i += 1;
    }
    None
}

/// Normalized statements, without lone braces of rendered control blocks.
fn statement_set<'a>(stmts: impl Iterator<Item = &'a str>) -> BTreeSet<String> {
    stmts.map(normalize_statement).filter(|s| !s.is_empty() && s != "{" && s != "}").collect()
}

fn core_set(set: &BTreeSet<String>) -> BTreeSet<String> {
    set.iter().map(|s| statement_core(s)).collect()
}

/// `a` names the same thing as `b`, allowing either side to omit the package.
fn same_ref(a: &str, b: &str) -> bool {
    a == b || a.ends_with(&format!(".{b}")) || b.ends_with(&format!(".{a}"))
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

pub fn evaluate(generated: &ExampleSet, reference: &ReferenceDataset) -> EvalReport {
    let mut entries = Vec::new();
    for r in &reference.entries {
        let want = statement_set(r.statements.iter().map(String::as_str));
        let want_core = core_set(&want);
        let allowed: BTreeSet<&String> = r.undeclared_identifiers.iter().collect();
        let candidates: Vec<&Example> =
            generated.examples.iter().filter(|e| same_ref(&e.source_test, &r.test_id) && same_ref(&e.focal, &r.focal)).collect();
        let complete: Vec<usize> = candidates
            .iter()
            .filter(|e| {
                let got = statement_set(e.statements.iter().map(|s| s.text.as_str()));
                want_core.is_subset(&core_set(&got)) && e.undeclared_identifiers.iter().all(|u| allowed.contains(u))
            })
            .map(|e| statement_set(e.statements.iter().map(|s| s.text.as_str())).len())
            .collect();
        let best = complete
            .iter()
            .min()
            .copied()
            .or_else(|| candidates.iter().map(|e| statement_set(e.statements.iter().map(|s| s.text.as_str())).len()).min());
        entries.push(EntryVerdict {
            test_id: r.test_id.clone(),
            focal: r.focal.clone(),
            matched: !candidates.is_empty(),
            complete: !complete.is_empty(),
            concise: complete.iter().any(|n| *n <= want.len()),
            reference_statements: want.len(),
            generated_statements: best,
        });
    }
    let matched = entries.iter().filter(|e| e.matched).count();
    let complete = entries.iter().filter(|e| e.complete).count();
    let concise = entries.iter().filter(|e| e.concise).count();
    EvalReport {
        fitness: ratio(matched, entries.len()),
        completeness: ratio(complete, entries.len()),
        conciseness: ratio(concise, complete),
        entries,
    }
}
