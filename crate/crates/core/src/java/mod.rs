//! Front end for the supported Java subset: tokenizer, syntax tree, parser and printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod print;
