//! Text formats.
//!
//! Diagrams (`.archd`):
//!
//! ```text
//! diagram MasterSlave {
//!   type Master(p) 2
//!   type Slave(q) [1,3]
//!   motif { Master.p : 1 : mc[0,2], Slave.q : 1 : 1 }
//! }
//! ```
//!
//! Architectures (`.archa`):
//!
//! ```text
//! architecture A of Quaternary {
//!   component A : T1
//!   component B1, B2, B3 : T2
//!   connector A.p, B1.q, B2.q, B3.q
//! }
//! ```
//!
//! `#` starts a comment when it begins a token; inside an identifier it is an
//! ordinary character, so canonical instance ids such as `T#1` are valid.
//! Semicolons between declarations are optional. The outer `diagram` or
//! `architecture` header may be omitted.

mod export;
mod lexer;
mod parser;
mod print;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::Violation;

pub use export::{configurations_json, export_dot_architecture, export_dot_diagram};
pub use parser::{
    parse_architecture, parse_architecture_in, parse_architecture_with_warnings, parse_diagram,
    parse_diagram_in, Parsed,
};
pub use print::{print_architecture, print_diagram};

/// Position in a source text. Line and column are 1-based; the column counts
/// characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{file}:{}:{}", self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// Validation failures, when the text parsed but the diagram is invalid.
    pub violations: Vec<Violation>,
}

/// Non-fatal remark produced while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.span, self.message)
    }
}
