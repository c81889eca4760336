//! The Boolean action language B: a literal-level view of a description,
//! the reference transition semantics, and the constraint encoding.
//!
//! States are complete valuations (`Vec<bool>` indexed by fluent). Literal
//! sets are bitsets over `2·|F|` literals, so inconsistent sets (holding a
//! complementary pair) stay representable.

pub mod encoder;

use crate::frontend::{ActionId, Cons, DomainDescription, Expr, FluentId};
use crate::fd::RelOp;
use crate::traj::Trajectory;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BLit {
    pub f: FluentId,
    pub pos: bool,
}

impl BLit {
    pub fn new(f: FluentId, pos: bool) -> Self {
        BLit { f, pos }
    }

    pub fn complement(self) -> Self {
        BLit { f: self.f, pos: !self.pos }
    }

    /// Dense index: `2f` for `f`, `2f+1` for `neg(f)`.
    pub fn idx(self) -> usize {
        2 * self.f + (!self.pos) as usize
    }

    pub fn from_idx(i: usize) -> Self {
        BLit { f: i / 2, pos: i % 2 == 0 }
    }

    pub fn holds(self, s: &[bool]) -> bool {
        s[self.f] == self.pos
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BDyn {
    pub action: ActionId,
    pub effect: BLit,
    pub pre: Vec<BLit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BStatic {
    pub body: Vec<BLit>,
    pub head: BLit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BExec {
    pub action: ActionId,
    pub cond: Vec<BLit>,
}

/// Literal view of a Boolean description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BDomain {
    pub fluent_names: Vec<String>,
    pub action_names: Vec<String>,
    pub n_fluents: usize,
    pub n_actions: usize,
    pub dynamic: Vec<BDyn>,
    pub statics: Vec<BStatic>,
    pub exec: Vec<BExec>,
    pub nonexec: Vec<BExec>,
    pub initially: Vec<BLit>,
    pub goal: Vec<BLit>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BError {
    #[error("not a Boolean description: {0}")]
    NotBoolean(String),
    #[error("the initial state is not determined: {0}")]
    InitialState(String),
    #[error("{n} fluents exceed the enumeration limit of {max}")]
    TooManyFluents { n: usize, max: usize },
}

/// Fixed-size literal set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LitSet(Vec<bool>);

impl LitSet {
    pub fn new(n_fluents: usize) -> Self {
        LitSet(vec![false; 2 * n_fluents])
    }

    pub fn from_lits(n_fluents: usize, lits: impl IntoIterator<Item = BLit>) -> Self {
        let mut s = LitSet::new(n_fluents);
        for l in lits {
            s.insert(l);
        }
        s
    }

    /// The literals true in a complete state.
    pub fn of_state(s: &[bool]) -> Self {
        LitSet::from_lits(s.len(), s.iter().enumerate().map(|(f, &v)| BLit::new(f, v)))
    }

    pub fn contains(&self, l: BLit) -> bool {
        self.0[l.idx()]
    }

    pub fn insert(&mut self, l: BLit) -> bool {
        !std::mem::replace(&mut self.0[l.idx()], true)
    }

    pub fn iter(&self) -> impl Iterator<Item = BLit> + '_ {
        self.0.iter().enumerate().filter(|x| *x.1).map(|x| BLit::from_idx(x.0))
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|x| **x).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, o: &LitSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| !a || *b)
    }

    pub fn intersect(&self, o: &LitSet) -> LitSet {
        LitSet(self.0.iter().zip(&o.0).map(|(a, b)| *a && *b).collect())
    }

    pub fn union(&self, o: &LitSet) -> LitSet {
        LitSet(self.0.iter().zip(&o.0).map(|(a, b)| *a || *b).collect())
    }

    pub fn is_consistent(&self) -> bool {
        self.0.chunks(2).all(|p| !(p[0] && p[1]))
    }

    pub fn is_complete(&self) -> bool {
        self.0.chunks(2).all(|p| p[0] || p[1])
    }

    /// The state of a complete and consistent set.
    pub fn to_state(&self) -> Option<Vec<bool>> {
        (self.is_complete() && self.is_consistent()).then(|| self.0.chunks(2).map(|p| p[0]).collect())
    }
}

impl fmt::Display for LitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> =
            self.iter().map(|l| if l.pos { format!("{}", l.f) } else { format!("-{}", l.f) }).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

fn literal_of(c: &Cons, d: &DomainDescription) -> Result<Vec<BLit>, BError> {
    let bad = || BError::NotBoolean(c.to_term(&d.fluent_names()).to_string());
    match c {
        Cons::True => Ok(vec![]),
        Cons::And(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(literal_of(c, d)?);
            }
            Ok(out)
        }
        Cons::Prim(RelOp::Eq, Expr::Fluent(f, 0), Expr::Const(v @ (0 | 1))) => Ok(vec![BLit::new(*f, *v == 1)]),
        _ => Err(bad()),
    }
}

impl BDomain {
    /// Literal view of a description whose fluents are all Boolean and whose
    /// constraints are literal conjunctions (any B description, and B^MV
    /// descriptions of that shape).
    pub fn from_description(d: &DomainDescription) -> Result<Self, BError> {
        if let Some(f) = d.fluents.iter().find(|f| f.dom != [0, 1]) {
            return Err(BError::NotBoolean(format!("fluent {} is not Boolean", f.name)));
        }
        if !d.holds.is_empty() || !d.always.is_empty() || !d.time_constraints.is_empty() || d.has_cost_info() {
            return Err(BError::NotBoolean("temporal or cost assertions".into()));
        }
        let single = |c: &Cons| -> Result<Vec<BLit>, BError> { literal_of(c, d) };
        let mut out = BDomain {
            fluent_names: (0..d.fluents.len()).map(|f| d.fluent_name(f)).collect(),
            action_names: (0..d.actions.len()).map(|a| d.action_name(a)).collect(),
            n_fluents: d.fluents.len(),
            n_actions: d.actions.len(),
            dynamic: Vec::new(),
            statics: Vec::new(),
            exec: Vec::new(),
            nonexec: Vec::new(),
            initially: Vec::new(),
            goal: Vec::new(),
        };
        for l in &d.dynamic {
            let pre = single(&l.pre)?;
            for effect in single(&l.effect)? {
                out.dynamic.push(BDyn { action: l.action, effect, pre: pre.clone() });
            }
        }
        for l in &d.statics {
            let body = single(&l.cond)?;
            for head in single(&l.head)? {
                out.statics.push(BStatic { body: body.clone(), head });
            }
        }
        for l in &d.exec {
            out.exec.push(BExec { action: l.action, cond: single(&l.cond)? });
        }
        for l in &d.nonexec {
            out.nonexec.push(BExec { action: l.action, cond: single(&l.cond)? });
        }
        for c in &d.initially {
            out.initially.extend(single(c)?);
        }
        for c in &d.goal {
            out.goal.extend(single(c)?);
        }
        Ok(out)
    }

    /// Least superset of `s` closed under the static laws.
    pub fn closure(&self, s: &LitSet) -> LitSet {
        let mut out = s.clone();
        loop {
            let mut changed = false;
            for law in &self.statics {
                if !out.contains(law.head) && law.body.iter().all(|&l| out.contains(l)) {
                    out.insert(law.head);
                    changed = true;
                }
            }
            if !changed {
                return out;
            }
        }
    }

    pub fn is_closed(&self, s: &[bool]) -> bool {
        self.statics.iter().all(|l| !l.body.iter().all(|b| b.holds(s)) || l.head.holds(s))
    }

    /// `E(a, s)`: effects of the laws for `a` whose preconditions hold in `s`.
    pub fn direct_effects(&self, a: ActionId, s: &[bool]) -> LitSet {
        LitSet::from_lits(
            self.n_fluents,
            self.dynamic
                .iter()
                .filter(|l| l.action == a && l.pre.iter().all(|p| p.holds(s)))
                .map(|l| l.effect),
        )
    }

    pub fn is_executable(&self, a: ActionId, s: &[bool]) -> bool {
        let sat = |c: &[BLit]| c.iter().all(|l| l.holds(s));
        self.exec.iter().any(|l| l.action == a && sat(&l.cond))
            && !self.nonexec.iter().any(|l| l.action == a && sat(&l.cond))
    }

    /// Checks `Lit(v) = Clo(E(a,u) ∪ (Lit(u) ∩ Lit(v)))` for an executable `a`.
    pub fn is_transition(&self, u: &[bool], a: ActionId, v: &[bool]) -> bool {
        if !self.is_executable(a, u) {
            return false;
        }
        let lu = LitSet::of_state(u);
        let lv = LitSet::of_state(v);
        self.closure(&self.direct_effects(a, u).union(&lu.intersect(&lv))) == lv
    }

    /// All successors of `u` under `a`, by enumeration of `2^|F|` candidates.
    pub fn successors(&self, u: &[bool], a: ActionId, max_fluents: usize) -> Result<Vec<Vec<bool>>, BError> {
        if self.n_fluents > max_fluents {
            return Err(BError::TooManyFluents { n: self.n_fluents, max: max_fluents });
        }
        if !self.is_executable(a, u) {
            return Ok(vec![]);
        }
        Ok(all_states(self.n_fluents).filter(|v| self.is_transition(u, a, v)).collect())
    }

    /// `Clo(initially)`, which must be a complete and consistent state.
    pub fn initial_state(&self) -> Result<Vec<bool>, BError> {
        let c = self.closure(&LitSet::from_lits(self.n_fluents, self.initially.iter().copied()));
        if !c.is_consistent() {
            return Err(BError::InitialState("the closure of the initial literals is inconsistent".into()));
        }
        c.to_state().ok_or_else(|| {
            let missing: Vec<String> = (0..self.n_fluents)
                .filter(|&f| !c.contains(BLit::new(f, true)) && !c.contains(BLit::new(f, false)))
                .map(|f| f.to_string())
                .collect();
            BError::InitialState(format!("no value for fluents {}", missing.join(", ")))
        })
    }

    pub fn lit_name(&self, l: BLit) -> String {
        if l.pos {
            self.fluent_names[l.f].clone()
        } else {
            format!("neg({})", self.fluent_names[l.f])
        }
    }

    pub fn satisfies(&self, s: &[bool], lits: &[BLit]) -> bool {
        lits.iter().all(|l| l.holds(s))
    }

    /// Validates a trajectory, describing the first violation.
    pub fn verify_trajectory(&self, t: &Trajectory) -> Result<(), String> {
        if t.states.len() != t.actions.len() + 1 {
            return Err("state and action counts do not match".into());
        }
        let states: Vec<Vec<bool>> = t.states.iter().map(|s| s.iter().map(|&v| v != 0).collect()).collect();
        for (i, s) in t.states.iter().enumerate() {
            if s.len() != self.n_fluents || s.iter().any(|&v| v != 0 && v != 1) {
                return Err(format!("state {i} is not a complete Boolean valuation"));
            }
            if !self.is_closed(&states[i]) {
                return Err(format!("state {i} is not closed under the static laws"));
            }
        }
        if !self.satisfies(&states[0], &self.initially) {
            return Err("state 0 violates the initial conditions".into());
        }
        if !self.satisfies(states.last().unwrap(), &self.goal) {
            return Err("the final state violates the goal".into());
        }
        for (i, &a) in t.actions.iter().enumerate() {
            if a >= self.n_actions {
                return Err(format!("step {}: unknown action", i + 1));
            }
            if !self.is_executable(a, &states[i]) {
                return Err(format!("step {}: action not executable", i + 1));
            }
            if !self.is_transition(&states[i], a, &states[i + 1]) {
                return Err(format!("step {}: not a transition of the domain", i + 1));
            }
        }
        Ok(())
    }

    /// Positive dependency graph: an edge `head -> l` for each body literal
    /// `l` of a static law, as adjacency lists over literal indices.
    pub fn dependency_graph(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); 2 * self.n_fluents];
        for law in &self.statics {
            for l in &law.body {
                if !g[law.head.idx()].contains(&l.idx()) {
                    g[law.head.idx()].push(l.idx());
                }
            }
        }
        g
    }
}

/// Every complete valuation of `n` Boolean fluents, in binary counting order.
pub fn all_states(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1u64 << n)).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}
