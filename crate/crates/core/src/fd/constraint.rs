//! Constraint descriptions. These are plain data; the solver compiles them
//! into propagators, and [`Constraint::holds`] evaluates them directly.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A 0/1 variable read positively or negatively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lit {
    pub var: VarId,
    pub pos: bool,
}

impl Lit {
    pub fn pos(var: VarId) -> Lit {
        Lit { var, pos: true }
    }
    pub fn neg(var: VarId) -> Lit {
        Lit { var, pos: false }
    }
    pub fn negate(self) -> Lit {
        Lit { var: self.var, pos: !self.pos }
    }
    /// Value of the literal under a 0/1 value of its variable.
    pub fn eval(self, v: i64) -> bool {
        (v != 0) == self.pos
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pos {
            write!(f, "{}", self.var)
        } else {
            write!(f, "!{}", self.var)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl RelOp {
    pub fn test(self, l: i64, r: i64) -> bool {
        match self {
            RelOp::Eq => l == r,
            RelOp::Ne => l != r,
            RelOp::Le => l <= r,
            RelOp::Lt => l < r,
            RelOp::Ge => l >= r,
            RelOp::Gt => l > r,
        }
    }

    pub fn negate(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
            RelOp::Le => RelOp::Gt,
            RelOp::Lt => RelOp::Ge,
            RelOp::Ge => RelOp::Lt,
            RelOp::Gt => RelOp::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Le => "<=",
            RelOp::Lt => "<",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }
}

/// `Σ cᵢ·xᵢ op rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Linear {
    pub terms: Vec<(i64, VarId)>,
    pub op: RelOp,
    pub rhs: i64,
}

impl Linear {
    pub fn new(terms: Vec<(i64, VarId)>, op: RelOp, rhs: i64) -> Self {
        Linear { terms, op, rhs }
    }

    pub fn holds(&self, val: &dyn Fn(VarId) -> i64) -> bool {
        let s: i128 = self.terms.iter().map(|&(c, x)| c as i128 * val(x) as i128).sum();
        match self.op {
            RelOp::Eq => s == self.rhs as i128,
            RelOp::Ne => s != self.rhs as i128,
            RelOp::Le => s <= self.rhs as i128,
            RelOp::Lt => s < self.rhs as i128,
            RelOp::Ge => s >= self.rhs as i128,
            RelOp::Gt => s > self.rhs as i128,
        }
    }

    pub fn negated(&self) -> Linear {
        Linear { terms: self.terms.clone(), op: self.op.negate(), rhs: self.rhs }
    }
}

impl fmt::Display for Linear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, &(c, x)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{c}*{x}")?;
            }
        }
        write!(f, " {} {}", self.op.symbol(), self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arith {
    Times,
    /// Truncating division; the divisor is constrained non-zero.
    Div,
    /// Remainder of truncating division (sign follows the dividend).
    Mod,
}

impl Arith {
    pub fn apply(self, x: i64, y: i64) -> Option<i64> {
        match self {
            Arith::Times => x.checked_mul(y),
            Arith::Div => x.checked_div(y),
            Arith::Mod => x.checked_rem(y),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Arith::Times => "*",
            Arith::Div => "/",
            Arith::Mod => "mod",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    Linear(Linear),
    /// `z = x ⊕ y`.
    Arith { op: Arith, x: VarId, y: VarId, z: VarId },
    /// `z = |x|`.
    Abs { x: VarId, z: VarId },
    /// At least one literal holds.
    Clause(Vec<Lit>),
    /// `b ↔ ∧ lits`.
    AndEq { b: Lit, lits: Vec<Lit> },
    /// `b ↔ ∨ lits`.
    OrEq { b: Lit, lits: Vec<Lit> },
    /// `b ↔ lin`.
    Reif { b: Lit, lin: Linear },
    /// `b → lin`.
    Implies { b: Lit, lin: Linear },
}

impl Constraint {
    /// Direct evaluation under a complete assignment, independent of propagators.
    pub fn holds(&self, val: &dyn Fn(VarId) -> i64) -> bool {
        let lit = |l: &Lit| l.eval(val(l.var));
        match self {
            Constraint::Linear(l) => l.holds(val),
            Constraint::Arith { op, x, y, z } => {
                let (x, y, z) = (val(*x), val(*y), val(*z));
                op.apply(x, y) == Some(z) && !(matches!(op, Arith::Div | Arith::Mod) && y == 0)
            }
            Constraint::Abs { x, z } => val(*z) == val(*x).abs(),
            Constraint::Clause(ls) => ls.iter().any(lit),
            Constraint::AndEq { b, lits } => lit(b) == lits.iter().all(lit),
            Constraint::OrEq { b, lits } => lit(b) == lits.iter().any(lit),
            Constraint::Reif { b, lin } => lit(b) == lin.holds(val),
            Constraint::Implies { b, lin } => !lit(b) || lin.holds(val),
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v = match self {
            Constraint::Linear(l) => l.terms.iter().map(|t| t.1).collect(),
            Constraint::Arith { x, y, z, .. } => vec![*x, *y, *z],
            Constraint::Abs { x, z } => vec![*x, *z],
            Constraint::Clause(ls) => ls.iter().map(|l| l.var).collect(),
            Constraint::AndEq { b, lits } | Constraint::OrEq { b, lits } => {
                std::iter::once(b.var).chain(lits.iter().map(|l| l.var)).collect()
            }
            Constraint::Reif { b, lin } | Constraint::Implies { b, lin } => {
                std::iter::once(b.var).chain(lin.terms.iter().map(|t| t.1)).collect::<Vec<_>>()
            }
        };
        v.sort();
        v.dedup();
        v
    }
}

fn join(lits: &[Lit], sep: &str) -> String {
    lits.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Linear(l) => write!(f, "{l}"),
            Constraint::Arith { op, x, y, z } => write!(f, "{z} = {x} {} {y}", op.symbol()),
            Constraint::Abs { x, z } => write!(f, "{z} = abs({x})"),
            Constraint::Clause(ls) if ls.is_empty() => write!(f, "false"),
            Constraint::Clause(ls) => write!(f, "{}", join(ls, " \\/ ")),
            Constraint::AndEq { b, lits } => write!(f, "{b} <-> ({})", join(lits, " /\\ ")),
            Constraint::OrEq { b, lits } => write!(f, "{b} <-> ({})", join(lits, " \\/ ")),
            Constraint::Reif { b, lin } => write!(f, "{b} <-> ({lin})"),
            Constraint::Implies { b, lin } => write!(f, "{b} -> ({lin})"),
        }
    }
}
