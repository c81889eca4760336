//! Clause syntax front end: parsing, grounding and extraction of a
//! [`DomainDescription`].
//!
//! The grounder also evaluates the helper predicates used by the example
//! encodings (`interval/3`, `diff/n`, `findall/3`, `append/3`). Their
//! definitions are reconstructions of the obvious readings.

mod ast;
mod description;
mod extract;
mod ground;
mod parser;
mod term;

pub use ast::{relop_name, ActionId, BinOp, Cons, CostAtom, Expr, FluentId, Val, Valuation};
pub use description::{DomainDescription, DynLaw, ExecLaw, Fluent, Lang, StaticLaw};
pub use extract::extract_domain;
pub use ground::{arith, ground_program, ground_program_with, Fact, GroundConfig};
pub use parser::{parse_program, parse_program_with, DEFAULT_MAX_DEPTH};
pub use term::{Clause, Span, Term};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("{span}: term nesting depth {depth} exceeds the limit {max}")]
    TooDeep { span: Span, depth: usize, max: usize },
    #[error("{span}: variable {var} is not range-restricted")]
    NotRangeRestricted { span: Span, var: String },
    #[error("{span}: grounding failed: {msg}")]
    Ground { span: Span, msg: String },
    #[error("{span}: undeclared fluent `{name}`")]
    UndeclaredFluent { span: Span, name: String },
    #[error("{span}: undeclared action `{name}`")]
    UndeclaredAction { span: Span, name: String },
    #[error("{span}: fluent `{fluent}` has an empty domain")]
    EmptyDomain { span: Span, fluent: String },
    #[error("{span}: not a Boolean literal in B: {msg}")]
    NonBoolean { span: Span, msg: String },
    #[error("{span}: annotated fluent `{fluent}` is not allowed here")]
    MisplacedAnnotation { span: Span, fluent: String },
    #[error("action `{action}` has no executability law")]
    MissingExecutable { action: String },
    #[error("{span}: initial value {value} of `{fluent}` is outside its domain")]
    InitiallyOutOfDomain { span: Span, fluent: String, value: i64 },
    #[error("{span}: malformed {what}: {term}")]
    Malformed { span: Span, what: &'static str, term: String },
}

/// Parses, grounds and extracts in one step.
pub fn load_domain(text: &str, lang: Lang) -> Result<DomainDescription, FrontendError> {
    let clauses = parse_program(text)?;
    let facts = ground_program(&clauses)?;
    extract_domain(&facts, lang)
}

/// The grounded program as re-parseable text, one fact per line.
pub fn dump_ground(facts: &[Fact]) -> String {
    let mut s = String::new();
    for f in facts {
        s.push_str(&f.atom.to_string());
        s.push_str(".\n");
    }
    s
}
