//! Tokenizer for the supported Java subset.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(&'static str),
    IntLit(String),
    FloatLit(String),
    CharLit(String),
    StrLit(String),
    /// Operators and separators, longest match first (`>` is always single so
    /// generic closers can be split; the parser re-joins shift operators).
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
    pub line: u32,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Keyword(k) => write!(f, "`{k}`"),
            TokenKind::IntLit(s) | TokenKind::FloatLit(s) => write!(f, "number `{s}`"),
            TokenKind::CharLit(s) => write!(f, "char literal '{s}'"),
            TokenKind::StrLit(s) => write!(f, "string literal \"{s}\""),
            TokenKind::Punct(p) => write!(f, "`{p}`"),
            TokenKind::Eof => write!(f, "end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

const PUNCTS: &[&str] = &[
    ">>>=", "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
    "=", ">", "<", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(LexError { line, message: "unterminated block comment".into() });
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        let start_line = line;
        let kind = if c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c >= 0x80 {
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$' || bytes[i] >= 0x80)
            {
                i += 1;
            }
            let word = &src[start..i];
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            lex_number(bytes, &mut i, src)
        } else if c == b'"' {
            i += 1;
            let body_start = i;
            while i < bytes.len() && bytes[i] != b'"' {
                if bytes[i] == b'\\' {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'\n' {
                    return Err(LexError { line, message: "newline in string literal".into() });
                }
                i += 1;
            }
            if i >= bytes.len() {
                return Err(LexError { line, message: "unterminated string literal".into() });
            }
            let body = src[body_start..i].to_string();
            i += 1;
            TokenKind::StrLit(body)
        } else if c == b'\'' {
            i += 1;
            let body_start = i;
            while i < bytes.len() && bytes[i] != b'\'' {
                if bytes[i] == b'\\' {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'\n' {
                    return Err(LexError { line, message: "newline in char literal".into() });
                }
                i += 1;
            }
            if i >= bytes.len() {
                return Err(LexError { line, message: "unterminated char literal".into() });
            }
            let body = src[body_start..i].to_string();
            i += 1;
            TokenKind::CharLit(body)
        } else {
            let rest = &src[i..];
            match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    i += p.len();
                    TokenKind::Punct(p)
                }
                None => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(LexError { line, message: format!("unexpected character `{ch}`") });
                }
            }
        };
        out.push(Token { kind, start, end: i, line: start_line });
    }
    out.push(Token { kind: TokenKind::Eof, start: bytes.len(), end: bytes.len(), line });
    Ok(out)
}

fn lex_number(bytes: &[u8], i: &mut usize, src: &str) -> TokenKind {
    let start = *i;
    let mut float = false;
    if bytes[*i] == b'0' && matches!(bytes.get(*i + 1), Some(b'x') | Some(b'X') | Some(b'b') | Some(b'B')) {
        *i += 2;
        while *i < bytes.len() && (bytes[*i].is_ascii_hexdigit() || bytes[*i] == b'_') {
            *i += 1;
        }
    } else {
        while *i < bytes.len() {
            let b = bytes[*i];
            if b.is_ascii_digit() || b == b'_' {
                *i += 1;
            } else if b == b'.' && bytes.get(*i + 1).is_some_and(|n| n.is_ascii_digit()) && !float {
                float = true;
                *i += 1;
            } else if (b == b'e' || b == b'E')
                && bytes.get(*i + 1).is_some_and(|n| n.is_ascii_digit() || *n == b'-' || *n == b'+')
            {
                float = true;
                *i += 2;
            } else {
                break;
            }
        }
    }
    if *i < bytes.len() && matches!(bytes[*i], b'l' | b'L') {
        *i += 1;
    } else if *i < bytes.len() && matches!(bytes[*i], b'f' | b'F' | b'd' | b'D') {
        float = true;
        *i += 1;
    }
    let text = src[start..*i].to_string();
    if float {
        TokenKind::FloatLit(text)
    } else {
        TokenKind::IntLit(text)
    }
}
