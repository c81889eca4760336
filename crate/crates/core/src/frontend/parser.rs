//! Tokenizer and operator-precedence parser for the clause syntax.

use super::term::{infix, Assoc, Clause, Span, Term, PREFIX_MINUS};
use super::FrontendError;

/// Maximum nesting of non-operator compound terms.
pub const DEFAULT_MAX_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Var(String),
    Name(String),
    /// A name immediately followed by `(`.
    Functor(String),
    Sym(&'static str),
    Open,
    Close,
    LBrack,
    RBrack,
    Comma,
    Bar,
    End,
}

// Longest match first.
const SYMBOLS: &[&str] = &[
    ":-", "=:=", "=\\=", "\\==", "\\=", "==", "=<", ">=", "//", "<", ">", "=", "+", "-", "*", "/",
    "^", "@", "!",
];

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), text, pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> FrontendError {
        FrontendError::Syntax { span: Span { line: self.line, col: self.col }, msg: msg.into() }
    }

    fn peek_char(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_layout(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<Option<(Tok, Span)>, FrontendError> {
        self.skip_layout();
        let span = Span { line: self.line, col: self.col };
        let c = match self.peek_char() {
            None => return Ok(None),
            Some(c) => c,
        };
        let tok = if c.is_ascii_digit() {
            let start = self.pos;
            while matches!(self.peek_char(), Some(d) if d.is_ascii_digit()) {
                self.bump();
            }
            let s = &self.text[start..self.pos];
            Tok::Int(s.parse().map_err(|_| self.err(format!("integer literal {s} out of range")))?)
        } else if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while matches!(self.peek_char(), Some(d) if d.is_alphanumeric() || d == '_') {
                self.bump();
            }
            let s = self.text[start..self.pos].to_string();
            if c.is_uppercase() || c == '_' {
                Tok::Var(s)
            } else if self.peek_char() == Some('(') {
                Tok::Functor(s)
            } else {
                Tok::Name(s)
            }
        } else if c == '\'' {
            self.bump();
            let mut s = String::new();
            loop {
                match self.bump() {
                    None => return Err(self.err("unterminated quoted atom")),
                    Some('\\') => match self.bump() {
                        Some(e) => s.push(e),
                        None => return Err(self.err("unterminated quoted atom")),
                    },
                    Some('\'') => break,
                    Some(ch) => s.push(ch),
                }
            }
            if self.peek_char() == Some('(') {
                Tok::Functor(s)
            } else {
                Tok::Name(s)
            }
        } else {
            match c {
                '(' => {
                    self.bump();
                    Tok::Open
                }
                ')' => {
                    self.bump();
                    Tok::Close
                }
                '[' => {
                    self.bump();
                    Tok::LBrack
                }
                ']' => {
                    self.bump();
                    Tok::RBrack
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '|' => {
                    self.bump();
                    Tok::Bar
                }
                '≥' => {
                    self.bump();
                    Tok::Sym(">=")
                }
                '≤' => {
                    self.bump();
                    Tok::Sym("=<")
                }
                '≠' => {
                    self.bump();
                    Tok::Sym("\\=")
                }
                '.' => {
                    self.bump();
                    match self.peek_char() {
                        None => Tok::End,
                        Some(d) if d.is_whitespace() || d == '%' => Tok::End,
                        Some(d) => return Err(self.err(format!("unexpected `{d}` after `.`"))),
                    }
                }
                _ => {
                    let rest = &self.src[self.pos..];
                    match SYMBOLS.iter().find(|s| rest.starts_with(s.as_bytes())) {
                        Some(s) => {
                            for _ in 0..s.chars().count() {
                                self.bump();
                            }
                            Tok::Sym(s)
                        }
                        None => return Err(self.err(format!("unexpected character `{c}`"))),
                    }
                }
            }
        };
        Ok(Some((tok, span)))
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.eof)
    }

    fn err(&self, msg: impl Into<String>) -> FrontendError {
        FrontendError::Syntax { span: self.span(), msg: msg.into() }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FrontendError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    /// Name of the infix operator at the cursor, if any.
    fn infix_here(&self) -> Option<String> {
        match self.peek()? {
            Tok::Sym(s) if infix(s).is_some() => Some(s.to_string()),
            Tok::Name(n) if infix(n).is_some() => Some(n.clone()),
            Tok::Comma => Some(",".into()),
            _ => None,
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, FrontendError> {
        let mut out = vec![self.term(999)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            out.push(self.term(999)?);
        }
        Ok(out)
    }

    fn primary(&mut self) -> Result<(Term, u32), FrontendError> {
        let (tok, _) = match self.toks.get(self.pos) {
            Some(t) => t.clone(),
            None => return Err(self.err("unexpected end of input")),
        };
        self.pos += 1;
        Ok(match tok {
            Tok::Int(n) => (Term::Int(n), 0),
            Tok::Var(v) => (Term::Var(v), 0),
            Tok::Functor(name) => {
                self.expect(Tok::Open, "`(`")?;
                let a = self.args()?;
                self.expect(Tok::Close, "`)`")?;
                (Term::App(name, a), 0)
            }
            Tok::Name(n) => {
                // An operator name used as an atom gets its operator priority.
                let p = infix(&n).map(|x| x.0).unwrap_or(0);
                (Term::Atom(n), p)
            }
            Tok::Sym("!") => (Term::Atom("!".into()), 0),
            Tok::Sym("-") => match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = *n;
                    self.pos += 1;
                    (Term::Int(-n), 0)
                }
                _ => {
                    let t = self.term(PREFIX_MINUS)?;
                    (Term::App("-".into(), vec![t]), PREFIX_MINUS)
                }
            },
            Tok::Open => {
                let t = self.term(1200)?;
                self.expect(Tok::Close, "`)`")?;
                (t, 0)
            }
            Tok::LBrack => {
                if self.peek() == Some(&Tok::RBrack) {
                    self.pos += 1;
                    return Ok((Term::List(vec![]), 0));
                }
                let items = self.args()?;
                if self.peek() == Some(&Tok::Bar) {
                    return Err(self.err("list tails `|` are not supported"));
                }
                self.expect(Tok::RBrack, "`]`")?;
                (Term::List(items), 0)
            }
            _ => {
                self.pos -= 1;
                return Err(self.err("unexpected token"));
            }
        })
    }

    fn term(&mut self, max: u32) -> Result<Term, FrontendError> {
        let (mut left, mut lp) = self.primary()?;
        if lp > max {
            return Err(self.err("operator priority clash"));
        }
        while let Some(op) = self.infix_here() {
            let (p, assoc) = infix(&op).unwrap();
            if p > max {
                break;
            }
            let (la, ra) = match assoc {
                Assoc::Xfx => (p - 1, p - 1),
                Assoc::Xfy => (p - 1, p),
                Assoc::Yfx => (p, p - 1),
            };
            if lp > la {
                return Err(self.err(format!("operator `{op}` cannot take this left operand")));
            }
            self.pos += 1;
            let right = self.term(ra)?;
            left = Term::App(op, vec![left, right]);
            lp = p;
        }
        Ok(left)
    }
}

fn flatten_conj(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::App(n, mut a) if n == "," && a.len() == 2 => {
            let r = a.pop().unwrap();
            let l = a.pop().unwrap();
            flatten_conj(l, out);
            flatten_conj(r, out);
        }
        t => out.push(t),
    }
}

/// Parses a program into clauses, rejecting terms nested deeper than `max_depth`.
pub fn parse_program_with(text: &str, max_depth: usize) -> Result<Vec<Clause>, FrontendError> {
    let mut lx = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    let eof = Span { line: lx.line, col: lx.col };
    let mut p = Parser { toks, pos: 0, eof };
    let mut clauses = Vec::new();
    while p.pos < p.toks.len() {
        let span = p.span();
        let t = p.term(1200)?;
        if p.peek() != Some(&Tok::End) {
            return Err(p.err("expected `.` at end of clause"));
        }
        p.pos += 1;
        let (head, body) = match t {
            Term::App(n, mut a) if n == ":-" && a.len() == 2 => {
                let b = a.pop().unwrap();
                let h = a.pop().unwrap();
                let mut body = Vec::new();
                flatten_conj(b, &mut body);
                (h, body)
            }
            t => (t, Vec::new()),
        };
        if !matches!(head, Term::Atom(_) | Term::App(..)) {
            return Err(FrontendError::Syntax { span, msg: "clause head must be an atom".into() });
        }
        let depth = std::iter::once(&head).chain(body.iter()).map(Term::depth).max().unwrap_or(0);
        if depth > max_depth {
            return Err(FrontendError::TooDeep { span, depth, max: max_depth });
        }
        clauses.push(Clause { head, body, span });
    }
    Ok(clauses)
}

pub fn parse_program(text: &str) -> Result<Vec<Clause>, FrontendError> {
    parse_program_with(text, DEFAULT_MAX_DEPTH)
}
