//! Fluent expressions and constraints over annotated fluents, and their
//! value semantics. Both oracles and the B^MV encoder share these trees.
//!
//! Undefinedness is strict: an operator with an undefined operand is
//! undefined, and a primitive constraint over an undefined value holds
//! under neither polarity. Negation is pushed down to primitives, so
//! `neg(f eq 1)` fails when `f` is undefined. A reference to a timed
//! fluent `f@t` with `t` outside the trajectory makes its primitive hold.

use super::term::Term;
use crate::fd::RelOp;

pub type FluentId = usize;
pub type ActionId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// Truncating division.
    Div,
    /// Remainder with the sign of the dividend.
    Mod,
}

impl BinOp {
    pub fn apply(self, x: i64, y: i64) -> Option<i64> {
        match self {
            BinOp::Add => x.checked_add(y),
            BinOp::Sub => x.checked_sub(y),
            BinOp::Mul => x.checked_mul(y),
            BinOp::Div => x.checked_div(y),
            BinOp::Mod => x.checked_rem(y),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostAtom {
    Plan,
    Goal,
    State(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    /// `f^ann`, relative to the evaluation time.
    Fluent(FluentId, i64),
    /// `f@t`, absolute.
    At(FluentId, i64),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Rei(Box<Cons>),
    Cost(CostAtom),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cons {
    True,
    False,
    Prim(RelOp, Expr, Expr),
    Not(Box<Cons>),
    And(Vec<Cons>),
    Or(Vec<Cons>),
}

/// Outcome of evaluating an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Val {
    Def(i64),
    Undef,
    /// Mentions a timed fluent outside the trajectory.
    Escape,
}

/// Source of fluent and cost values for evaluation.
pub trait Valuation {
    fn fluent(&self, f: FluentId, ann: i64) -> Val;
    fn timed(&self, f: FluentId, t: i64) -> Val;
    fn cost(&self, _c: CostAtom) -> Val {
        Val::Undef
    }
}

impl Expr {
    pub fn fluent(f: FluentId) -> Expr {
        Expr::Fluent(f, 0)
    }

    pub fn eval(&self, v: &dyn Valuation) -> Val {
        let lift1 = |x: Val, f: fn(i64) -> Option<i64>| match x {
            Val::Def(a) => f(a).map(Val::Def).unwrap_or(Val::Undef),
            other => other,
        };
        match self {
            Expr::Const(c) => Val::Def(*c),
            Expr::Fluent(f, a) => v.fluent(*f, *a),
            Expr::At(f, t) => v.timed(*f, *t),
            Expr::Neg(e) => lift1(e.eval(v), i64::checked_neg),
            Expr::Abs(e) => lift1(e.eval(v), i64::checked_abs),
            Expr::Bin(op, l, r) => match (l.eval(v), r.eval(v)) {
                (Val::Escape, _) | (_, Val::Escape) => Val::Escape,
                (Val::Def(x), Val::Def(y)) => op.apply(x, y).map(Val::Def).unwrap_or(Val::Undef),
                _ => Val::Undef,
            },
            Expr::Rei(c) => Val::Def(c.holds(v) as i64),
            Expr::Cost(c) => v.cost(*c),
        }
    }

    pub fn visit_leaves(&self, k: &mut dyn FnMut(&Expr)) {
        match self {
            Expr::Const(_) | Expr::Fluent(..) | Expr::At(..) | Expr::Cost(_) => k(self),
            Expr::Neg(e) | Expr::Abs(e) => e.visit_leaves(k),
            Expr::Bin(_, l, r) => {
                l.visit_leaves(k);
                r.visit_leaves(k);
            }
            Expr::Rei(c) => c.visit_leaves(k),
        }
    }

    pub fn to_term(&self, names: &[Term]) -> Term {
        let b = |n: &str, a: Vec<Term>| Term::App(n.to_string(), a);
        match self {
            Expr::Const(c) => Term::Int(*c),
            Expr::Fluent(f, 0) => names[*f].clone(),
            Expr::Fluent(f, a) => b("^", vec![names[*f].clone(), Term::Int(*a)]),
            Expr::At(f, t) => b("@", vec![names[*f].clone(), Term::Int(*t)]),
            Expr::Neg(e) => b("-", vec![e.to_term(names)]),
            Expr::Abs(e) => b("abs", vec![e.to_term(names)]),
            Expr::Bin(op, l, r) => b(op.symbol(), vec![l.to_term(names), r.to_term(names)]),
            Expr::Rei(c) => b("rei", vec![c.to_term(names)]),
            Expr::Cost(CostAtom::Plan) => Term::Atom("plan".into()),
            Expr::Cost(CostAtom::Goal) => Term::Atom("goal".into()),
            Expr::Cost(CostAtom::State(i)) => b("state", vec![Term::Int(*i)]),
        }
    }
}

pub fn relop_name(op: RelOp) -> &'static str {
    match op {
        RelOp::Eq => "eq",
        RelOp::Ne => "neq",
        RelOp::Ge => "geq",
        RelOp::Le => "leq",
        RelOp::Gt => "gt",
        RelOp::Lt => "lt",
    }
}

impl Cons {
    pub fn eq(l: Expr, r: Expr) -> Cons {
        Cons::Prim(RelOp::Eq, l, r)
    }

    pub fn and(mut cs: Vec<Cons>) -> Cons {
        match cs.len() {
            0 => Cons::True,
            1 => cs.pop().unwrap(),
            _ => Cons::And(cs),
        }
    }

    pub fn holds(&self, v: &dyn Valuation) -> bool {
        self.sat(v, true)
    }

    /// Satisfaction under a polarity; `pol = false` evaluates the negation.
    pub fn sat(&self, v: &dyn Valuation, pol: bool) -> bool {
        match self {
            Cons::True => pol,
            Cons::False => !pol,
            Cons::Prim(op, l, r) => match (l.eval(v), r.eval(v)) {
                (Val::Escape, _) | (_, Val::Escape) => true,
                (Val::Def(x), Val::Def(y)) => op.test(x, y) == pol,
                _ => false,
            },
            Cons::Not(c) => c.sat(v, !pol),
            Cons::And(cs) if pol => cs.iter().all(|c| c.sat(v, true)),
            Cons::And(cs) => cs.iter().any(|c| c.sat(v, false)),
            Cons::Or(cs) if pol => cs.iter().any(|c| c.sat(v, true)),
            Cons::Or(cs) => cs.iter().all(|c| c.sat(v, false)),
        }
    }

    pub fn visit_leaves(&self, k: &mut dyn FnMut(&Expr)) {
        match self {
            Cons::True | Cons::False => {}
            Cons::Prim(_, l, r) => {
                l.visit_leaves(k);
                r.visit_leaves(k);
            }
            Cons::Not(c) => c.visit_leaves(k),
            Cons::And(cs) | Cons::Or(cs) => cs.iter().for_each(|c| c.visit_leaves(k)),
        }
    }

    /// Fluents with their relative annotations, deduplicated in first-seen order.
    pub fn annotated_fluents(&self) -> Vec<(FluentId, i64)> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |e| {
            if let Expr::Fluent(f, a) = e {
                if !out.contains(&(*f, *a)) {
                    out.push((*f, *a));
                }
            }
        });
        out
    }

    /// Fluents mentioned through relative references.
    pub fn fluents(&self) -> Vec<FluentId> {
        let mut out: Vec<FluentId> = self.annotated_fluents().into_iter().map(|x| x.0).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn to_term(&self, names: &[Term]) -> Term {
        match self {
            Cons::True => Term::Atom("true".into()),
            Cons::False => Term::Atom("false".into()),
            Cons::Prim(op, l, r) => Term::App(relop_name(*op).into(), vec![l.to_term(names), r.to_term(names)]),
            Cons::Not(c) => Term::App("neg".into(), vec![c.to_term(names)]),
            Cons::And(cs) => Term::List(cs.iter().map(|c| c.to_term(names)).collect()),
            Cons::Or(cs) => {
                let mut it = cs.iter().rev();
                match it.next() {
                    None => Term::Atom("false".into()),
                    Some(last) => it.fold(last.to_term(names), |acc, c| {
                        Term::App("or".into(), vec![c.to_term(names), acc])
                    }),
                }
            }
        }
    }
}
