//! Terms and clauses of the clause syntax, with a precedence-aware printer
//! whose output parses back to the same structure.

use std::fmt;

/// Source position (1-based line and column).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Operators are stored as ordinary compound terms named by their symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Var(String),
    Atom(String),
    App(String, Vec<Term>),
    List(Vec<Term>),
}

impl Term {
    pub fn app(name: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(name.to_string())
        } else {
            Term::App(name.to_string(), args)
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) | Term::Atom(_) => true,
            Term::App(_, a) | Term::List(a) => a.iter().all(Term::is_ground),
        }
    }

    /// Functor name and arity; integers and variables have none.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(n) => Some((n, 0)),
            Term::App(n, a) => Some((n, a.len())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, a) | Term::List(a) => a,
            _ => &[],
        }
    }

    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::App(_, a) | Term::List(a) => a.iter().for_each(|t| t.vars(out)),
            _ => {}
        }
    }

    /// Nesting depth counting only non-operator compound terms.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(n, a) => {
                let inner = a.iter().map(Term::depth).max().unwrap_or(0);
                if op_info(n, a.len()).is_some() || is_constraint_functor(n) {
                    inner
                } else {
                    inner + 1
                }
            }
            Term::List(a) => a.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }
}

/// Functors of the constraint language that do not count towards nesting depth.
fn is_constraint_functor(n: &str) -> bool {
    matches!(n, "abs" | "rei" | "neg" | "and" | "or" | "state")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

/// Precedence and associativity of binary operators.
pub(crate) fn infix(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        ":-" => (1200, Assoc::Xfx),
        "," => (1000, Assoc::Xfy),
        "=" | "\\=" | "==" | "\\==" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" | "is" | "eq"
        | "neq" | "geq" | "leq" | "gt" | "lt" => (700, Assoc::Xfx),
        "+" | "-" => (500, Assoc::Yfx),
        "*" | "/" | "//" | "mod" => (400, Assoc::Yfx),
        "^" => (200, Assoc::Xfy),
        "@" => (200, Assoc::Xfx),
        _ => return None,
    })
}

/// Prefix minus binds like `fy 200`.
pub(crate) const PREFIX_MINUS: u32 = 200;

fn op_info(name: &str, arity: usize) -> Option<u32> {
    match arity {
        2 => infix(name).map(|p| p.0),
        1 if name == "-" => Some(PREFIX_MINUS),
        _ => None,
    }
}

fn is_plain_atom(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_atom(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_plain_atom(s) || s == "[]" || s == "!" {
        write!(f, "{s}")
    } else {
        write!(f, "'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

impl Term {
    /// Writes the term so that it parses back in a context of priority `max`.
    fn write_prec(&self, f: &mut fmt::Formatter<'_>, max: u32) -> fmt::Result {
        match self {
            Term::Int(n) if *n < 0 && max < 1200 => write!(f, "({n})"),
            Term::Int(n) => write!(f, "{n}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Atom(a) => write_atom(f, a),
            Term::List(items) => {
                write!(f, "[")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    t.write_prec(f, 999)?;
                }
                write!(f, "]")
            }
            Term::App(name, args) if args.len() == 2 && infix(name).is_some() => {
                let (p, assoc) = infix(name).unwrap();
                let (lp, rp) = match assoc {
                    Assoc::Xfx => (p - 1, p - 1),
                    Assoc::Xfy => (p - 1, p),
                    Assoc::Yfx => (p, p - 1),
                };
                let paren = p > max;
                if paren {
                    write!(f, "(")?;
                }
                args[0].write_prec(f, lp)?;
                match name.as_str() {
                    "," => write!(f, ", ")?,
                    "^" | "@" => write!(f, "{name}")?,
                    _ => write!(f, " {name} ")?,
                }
                args[1].write_prec(f, rp)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::App(name, args) if args.len() == 1 && name == "-" => {
                // Always parenthesize the operand so `-(3)` stays distinct from `-3`.
                let paren = PREFIX_MINUS > max;
                if paren {
                    write!(f, "(")?;
                }
                write!(f, "-(")?;
                args[0].write_prec(f, 1200)?;
                write!(f, ")")?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Term::App(name, args) => {
                write_atom(f, name)?;
                write!(f, "(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    t.write_prec(f, 999)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 999)
    }
}

/// `head :- body.`; facts have an empty body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
    pub span: Span,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.head.write_prec(f, 999)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, g) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                g.write_prec(f, 999)?;
            }
        }
        write!(f, ".")
    }
}
