//! Constraint encoding of B^MV trajectories.
//!
//! One variable per fluent and layer over the fluent's domain, one 0/1
//! variable per action and step. A reference `f^k` at time `t` names the
//! variable of layer `t+k` clamped to `0..=N`; `f@t` outside `0..=N` makes
//! its primitive constraint hold. Affine expressions stay symbolic;
//! products, quotients, remainders and absolute values get auxiliary
//! variables. Every expression carries the literals under which it is
//! defined, so a primitive holds (under either polarity) only when both
//! sides are defined, matching the reference semantics.
//!
//! Per step `j` (layers `j` and `j+1`):
//! - exactly one action; the action implies one of its executability conditions
//!   and none of its non-executability conditions;
//! - `Dyn = A ∧ pre@j` for each dynamic law, and `Dyn → effect@(j+1)`;
//! - `T(f,i)` holds when a fired effect references `f` on layer `i`.
//!
//! Inertia depends on [`Minimality`]:
//! - fluents outside every static law keep their value unless touched;
//! - `Off` additionally lets a static fluent change when a static law with
//!   it in the head has a satisfied condition;
//! - `Cluster`/`Full` keep a whole cluster unchanged when every touched
//!   fluent of the cluster kept its value.
//!
//! In `Full` mode with single-layer static laws, an untouched fluent may
//! change only when reverting it alone violates a static law mentioning it,
//! a consequence of minimal closure.
//!
//! The intermediate state between dynamic and static effects is not
//! materialized: the target layer relates to the source layer directly.

use super::{clusters, static_fluents, MvState};
use crate::fd::{Arith, Constraint, Domain, Linear, Lit, RelOp, VarId};
use crate::frontend::{BinOp, Cons, CostAtom, DomainDescription, Expr, FluentId};
use crate::model::Model;
use crate::planner::{Minimality, Objective};
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct MvOptions {
    pub minimality: Minimality,
    /// Overrides the description's `minimize_cost`.
    pub minimize: Option<Objective>,
    /// Forbid visiting the same state twice.
    pub no_loop: bool,
    pub dump: bool,
}

impl Default for MvOptions {
    fn default() -> Self {
        MvOptions { minimality: Minimality::Full, minimize: None, no_loop: false, dump: false }
    }
}

pub struct MvEncoding {
    pub model: Model,
    /// `fluents[i][f]`; untouchable fluents share one variable across layers.
    pub fluents: Vec<Vec<VarId>>,
    /// `actions[j][a]`.
    pub actions: Vec<Vec<VarId>>,
    /// `touched[i][f]`; layer 0 is never touched.
    pub touched: Vec<Vec<Lit>>,
    /// `changes[i]`: 0/1 variables flagging a change of a static fluent
    /// between layers `i-1` and `i`; labeling them first (unchanged before
    /// changed) tries inertial successors first. Filled in `Full` mode.
    pub changes: Vec<Vec<VarId>>,
    pub plan_cost: Option<VarId>,
    pub objective: Option<VarId>,
}

/// `Σ c·x + k`, defined when every literal of `defs` holds.
#[derive(Clone, Debug)]
struct Aff {
    terms: Vec<(i64, VarId)>,
    k: i64,
    defs: Vec<Lit>,
}

impl Aff {
    fn konst(k: i64) -> Self {
        Aff { terms: Vec::new(), k, defs: Vec::new() }
    }

    fn var(v: VarId) -> Self {
        Aff { terms: vec![(1, v)], k: 0, defs: Vec::new() }
    }

    fn scale(mut self, c: i64) -> Self {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self.k *= c;
        self.terms.retain(|t| t.0 != 0);
        self
    }

    fn plus(mut self, o: Aff, sign: i64) -> Self {
        for (c, v) in o.terms {
            match self.terms.iter_mut().find(|t| t.1 == v) {
                Some(t) => t.0 += sign * c,
                None => self.terms.push((sign * c, v)),
            }
        }
        self.terms.retain(|t| t.0 != 0);
        self.k += sign * o.k;
        self.defs.extend(o.defs);
        self
    }

    fn constant(&self) -> Option<i64> {
        self.terms.is_empty().then_some(self.k)
    }
}

struct CostVars {
    plan: Aff,
    states: Vec<Aff>,
}

/// Translates constraints over a layered model.
struct Enc<'d> {
    d: &'d DomainDescription,
    m: Model,
    layers: Vec<Vec<VarId>>,
    reif: HashMap<Linear, Lit>,
    costs: Option<CostVars>,
    aux: usize,
}

impl<'d> Enc<'d> {
    fn new(d: &'d DomainDescription, dump: bool) -> Self {
        Enc { d, m: Model::new(dump), layers: Vec::new(), reif: HashMap::new(), costs: None, aux: 0 }
    }

    fn horizon(&self) -> usize {
        self.layers.len() - 1
    }

    fn fresh(&mut self, dom: Domain) -> VarId {
        self.aux += 1;
        let name = format!("aux{}", self.aux);
        self.m.var(dom, name)
    }

    fn bounds(&self, a: &Aff) -> (i64, i64) {
        let (mut lo, mut hi) = (a.k as i128, a.k as i128);
        for &(c, v) in &a.terms {
            let d = self.m.solver.dom(v);
            let (x, y) = (c as i128 * d.min() as i128, c as i128 * d.max() as i128);
            lo += x.min(y);
            hi += x.max(y);
        }
        let clip = |x: i128| x.clamp(i64::MIN as i128 / 4, i64::MAX as i128 / 4) as i64;
        (clip(lo), clip(hi))
    }

    fn materialize(&mut self, a: &Aff) -> VarId {
        if let Some(k) = a.constant() {
            return self.m.constant(k);
        }
        if a.k == 0 && a.terms.len() == 1 && a.terms[0].0 == 1 {
            return a.terms[0].1;
        }
        let (lo, hi) = self.bounds(a);
        let z = self.fresh(Domain::range(lo, hi));
        let mut terms = a.terms.clone();
        terms.push((-1, z));
        self.m.post(Constraint::Linear(Linear::new(terms, RelOp::Eq, -a.k)));
        z
    }

    fn lit_aff(l: Lit) -> Aff {
        if l.pos {
            Aff::var(l.var)
        } else {
            Aff { terms: vec![(-1, l.var)], k: 1, defs: Vec::new() }
        }
    }

    /// `None` when the expression mentions a timed fluent outside the layers.
    fn expr(&mut self, e: &Expr, t: usize) -> Option<Aff> {
        let h = self.horizon() as i64;
        Some(match e {
            Expr::Const(c) => Aff::konst(*c),
            Expr::Fluent(f, k) => Aff::var(self.layers[(t as i64 + k).clamp(0, h) as usize][*f]),
            Expr::At(f, s) => {
                if *s < 0 || *s > h {
                    return None;
                }
                Aff::var(self.layers[*s as usize][*f])
            }
            Expr::Neg(x) => self.expr(x, t)?.scale(-1),
            Expr::Abs(x) => {
                let a = self.expr(x, t)?;
                if let Some(k) = a.constant() {
                    return Some(Aff { defs: a.defs, ..Aff::konst(k.abs()) });
                }
                let (lo, hi) = self.bounds(&a);
                let zlo = if lo >= 0 { lo } else if hi <= 0 { -hi } else { 0 };
                let x = self.materialize(&a);
                let z = self.fresh(Domain::range(zlo, lo.abs().max(hi.abs())));
                self.m.post(Constraint::Abs { x, z });
                Aff { defs: a.defs, ..Aff::var(z) }
            }
            Expr::Bin(op, l, r) => {
                let (a, b) = (self.expr(l, t)?, self.expr(r, t)?);
                match op {
                    BinOp::Add => a.plus(b, 1),
                    BinOp::Sub => a.plus(b, -1),
                    BinOp::Mul => self.times(a, b),
                    BinOp::Div => self.divide(Arith::Div, a, b),
                    BinOp::Mod => self.divide(Arith::Mod, a, b),
                }
            }
            Expr::Rei(c) => {
                let l = self.lit(c, true, t);
                Self::lit_aff(l)
            }
            Expr::Cost(c) => {
                let costs = self.costs.as_ref().expect("cost variables built before cost constraints");
                match c {
                    CostAtom::Plan => costs.plan.clone(),
                    CostAtom::Goal => costs.states[self.horizon()].clone(),
                    CostAtom::State(i) if *i >= 0 && *i <= h => costs.states[*i as usize].clone(),
                    CostAtom::State(_) => Aff::konst(0),
                }
            }
        })
    }

    fn times(&mut self, a: Aff, b: Aff) -> Aff {
        if let Some(k) = a.constant() {
            let mut r = b.scale(k);
            r.defs.extend(a.defs);
            return r;
        }
        if let Some(k) = b.constant() {
            let mut r = a.scale(k);
            r.defs.extend(b.defs);
            return r;
        }
        let ((alo, ahi), (blo, bhi)) = (self.bounds(&a), self.bounds(&b));
        let corners = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
        let (x, y) = (self.materialize(&a), self.materialize(&b));
        let z = self.fresh(Domain::range(*corners.iter().min().unwrap(), *corners.iter().max().unwrap()));
        self.m.post(Constraint::Arith { op: Arith::Times, x, y, z });
        let mut defs = a.defs;
        defs.extend(b.defs);
        Aff { defs, ..Aff::var(z) }
    }

    /// Quotient or remainder; a divisor that may be zero is replaced by a
    /// copy restricted to non-zero values, valid only when the original is
    /// non-zero.
    fn divide(&mut self, op: Arith, a: Aff, b: Aff) -> Aff {
        let mut defs = a.defs.clone();
        defs.extend(b.defs.iter().copied());
        if let (Some(x), Some(y)) = (a.constant(), b.constant()) {
            return match op.apply(x, y) {
                Some(z) => Aff { defs, ..Aff::konst(z) },
                None => Aff { defs: vec![self.m.false_lit()], ..Aff::konst(0) },
            };
        }
        let (xlo, xhi) = self.bounds(&a);
        let x = self.materialize(&a);
        let y0 = self.materialize(&b);
        let ydom = self.m.solver.dom(y0).clone();
        let y = if !ydom.contains(0) {
            y0
        } else {
            let mut nz = ydom.clone();
            nz.remove(0);
            if nz.is_empty() {
                return Aff { defs: vec![self.m.false_lit()], ..Aff::konst(0) };
            }
            let ok = self.reified(Linear::new(vec![(1, y0)], RelOp::Ne, 0));
            defs.push(ok);
            let y = self.fresh(nz);
            self.m.post(Constraint::Implies { b: ok, lin: Linear::new(vec![(1, y), (-1, y0)], RelOp::Eq, 0) });
            y
        };
        let ydom = self.m.solver.dom(y).clone();
        let m = xlo.abs().max(xhi.abs());
        let (zlo, zhi) = match op {
            Arith::Mod => {
                let r = m.min(ydom.min().abs().max(ydom.max().abs()) - 1);
                if xlo >= 0 {
                    (0, r)
                } else if xhi <= 0 {
                    (-r, 0)
                } else {
                    (-r, r)
                }
            }
            _ if xlo >= 0 && ydom.min() > 0 => (0, xhi),
            _ => (-m, m),
        };
        let z = self.fresh(Domain::range(zlo, zhi));
        self.m.post(Constraint::Arith { op, x, y, z });
        Aff { defs, ..Aff::var(z) }
    }

    fn reified(&mut self, lin: Linear) -> Lit {
        if lin.terms.is_empty() {
            return if lin.holds(&|_| 0) { self.m.true_lit() } else { self.m.false_lit() };
        }
        if let Some(&l) = self.reif.get(&lin) {
            return l;
        }
        self.aux += 1;
        let b = Lit::pos(self.m.bool_var(format!("r{}", self.aux)));
        self.m.post(Constraint::Reif { b, lin: lin.clone() });
        self.reif.insert(lin, b);
        b
    }

    /// `l op r` as a linear constraint plus definedness literals; `None`
    /// when it holds vacuously.
    fn prim(&mut self, op: RelOp, l: &Expr, r: &Expr, t: usize) -> Option<(Linear, Vec<Lit>)> {
        let a = self.expr(l, t)?;
        let b = self.expr(r, t)?;
        let diff = a.plus(b, -1);
        Some((Linear::new(diff.terms, op, -diff.k), diff.defs))
    }

    /// Literal equivalent to `c` holding (`pol`) or its negation holding.
    fn lit(&mut self, c: &Cons, pol: bool, t: usize) -> Lit {
        match c {
            Cons::True => if pol { self.m.true_lit() } else { self.m.false_lit() },
            Cons::False => if pol { self.m.false_lit() } else { self.m.true_lit() },
            Cons::Prim(op, l, r) => match self.prim(*op, l, r, t) {
                None => self.m.true_lit(),
                Some((lin, defs)) => {
                    let lin = if pol { lin } else { lin.negated() };
                    let mut lits = vec![self.reified(lin)];
                    lits.extend(defs);
                    self.and(lits)
                }
            },
            Cons::Not(x) => self.lit(x, !pol, t),
            Cons::And(cs) | Cons::Or(cs) => {
                let lits: Vec<Lit> = cs.iter().map(|x| self.lit(x, pol, t)).collect();
                if matches!(c, Cons::And(_)) == pol {
                    self.and(lits)
                } else {
                    self.or(lits)
                }
            }
        }
    }

    fn and(&mut self, lits: Vec<Lit>) -> Lit {
        let n = &mut self.aux;
        self.m.and_lit(lits, || {
            *n += 1;
            format!("and{n}")
        })
    }

    fn or(&mut self, lits: Vec<Lit>) -> Lit {
        let n = &mut self.aux;
        self.m.or_lit(lits, || {
            *n += 1;
            format!("or{n}")
        })
    }

    fn clause(&mut self, guard: &[Lit], lit: Option<Lit>) {
        let mut ls: Vec<Lit> = guard.iter().map(|l| l.negate()).collect();
        ls.extend(lit);
        self.m.post(Constraint::Clause(ls));
    }

    /// Posts `∧ guard → c` at time `t`.
    fn require(&mut self, c: &Cons, t: usize, guard: &[Lit]) {
        match c {
            Cons::True => {}
            Cons::False => self.clause(guard, None),
            Cons::And(cs) => cs.iter().for_each(|x| self.require(x, t, guard)),
            Cons::Prim(op, l, r) => {
                let Some((lin, defs)) = self.prim(*op, l, r, t) else { return };
                for d in defs {
                    self.clause(guard, Some(d));
                }
                if lin.terms.is_empty() {
                    if !lin.holds(&|_| 0) {
                        self.clause(guard, None);
                    }
                    return;
                }
                match guard {
                    [] => self.m.post(Constraint::Linear(lin)),
                    [g] => self.m.post(Constraint::Implies { b: *g, lin }),
                    _ => {
                        let g = self.and(guard.to_vec());
                        self.m.post(Constraint::Implies { b: g, lin });
                    }
                }
            }
            _ => {
                let l = self.lit(c, true, t);
                self.clause(guard, Some(l));
            }
        }
    }

    fn statics_at(&mut self, i: usize) {
        for law in &self.d.statics {
            let g = self.lit(&law.cond, true, i);
            self.require(&law.head, i, &[g]);
        }
    }

    fn same(&mut self, f: FluentId, i: usize) -> Lit {
        let (a, b) = (self.layers[i][f], self.layers[i - 1][f]);
        if a == b {
            return self.m.true_lit();
        }
        self.reified(Linear::new(vec![(1, a), (-1, b)], RelOp::Eq, 0))
    }

    fn keep_if(&mut self, f: FluentId, i: usize, cond: Lit) {
        let (a, b) = (self.layers[i][f], self.layers[i - 1][f]);
        if a != b {
            self.m.post(Constraint::Implies { b: cond, lin: Linear::new(vec![(1, a), (-1, b)], RelOp::Eq, 0) });
        }
    }
}

/// Fluents some effect may touch.
fn touchable(d: &DomainDescription) -> Vec<bool> {
    let mut t = vec![false; d.fluents.len()];
    for law in &d.dynamic {
        for (f, k) in law.effect.annotated_fluents() {
            if k >= 0 {
                t[f] = true;
            }
        }
    }
    t
}

fn fluent_vars(e: &mut Enc<'_>, n: usize) {
    let d = e.d;
    let keep = touchable(d);
    let stat = static_fluents(d);
    for i in 0..=n {
        let mut row = Vec::with_capacity(d.fluents.len());
        for (f, fl) in d.fluents.iter().enumerate() {
            let v = if i > 0 && !keep[f] && !stat[f] {
                e.layers[i - 1][f]
            } else {
                e.m.var(Domain::from_values(fl.dom.iter().copied()), format!("F({},{i})", fl.name))
            };
            row.push(v);
        }
        e.layers.push(row);
    }
}

/// Step constraints, touched literals and inertia for layers `1..=n`.
type Steps = (Vec<Vec<VarId>>, Vec<Vec<Lit>>, Vec<Vec<VarId>>);

fn transitions(e: &mut Enc<'_>, n: usize, mode: Minimality, fixed: Option<usize>) -> Steps {
    let d = e.d;
    let nf = d.fluents.len();
    let mut actions = Vec::new();
    let mut touch: Vec<Vec<Vec<Lit>>> = vec![vec![Vec::new(); nf]; n + 1];
    for j in 0..n {
        let row: Vec<VarId> = (0..d.actions.len()).map(|a| e.m.bool_var(format!("A({},{j})", d.actions[a]))).collect();
        e.m.post(Constraint::Linear(Linear::new(row.iter().map(|&v| (1, v)).collect(), RelOp::Eq, 1)));
        if let Some(a) = fixed {
            e.m.fix(row[a], 1);
        }
        for (a, &av) in row.iter().enumerate() {
            let mut alts = Vec::new();
            for law in d.exec.iter().filter(|l| l.action == a) {
                alts.push(e.lit(&law.cond, true, j));
            }
            let mut c: Vec<Lit> = vec![Lit::neg(av)];
            c.extend(alts);
            e.m.post(Constraint::Clause(c));
            for law in d.nonexec.iter().filter(|l| l.action == a) {
                let l = e.lit(&law.cond, true, j);
                e.clause(&[Lit::pos(av), l], None);
            }
        }
        for (k, law) in d.dynamic.iter().enumerate() {
            let pre = e.lit(&law.pre, true, j);
            let dynk = e.m.and_lit(vec![Lit::pos(row[law.action]), pre], || format!("Dyn{k}({j})"));
            e.require(&law.effect, j + 1, &[dynk]);
            for (f, x) in law.effect.annotated_fluents() {
                if x >= 0 {
                    let layer = (j as i64 + 1 + x).min(n as i64) as usize;
                    touch[layer][f].push(dynk);
                }
            }
        }
        actions.push(row);
    }
    let mut touched = vec![vec![e.m.false_lit(); nf]];
    for (i, layer) in touch.iter().enumerate().skip(1) {
        let row: Vec<Lit> = (0..nf)
            .map(|f| e.m.or_lit(layer[f].clone(), || format!("T({},{i})", d.fluents[f].name)))
            .collect();
        touched.push(row);
    }
    let stat = static_fluents(d);
    for i in 1..=n {
        for f in (0..nf).filter(|&f| !stat[f]) {
            let c = touched[i][f].negate();
            e.keep_if(f, i, c);
        }
        match mode {
            Minimality::Off => {
                for f in (0..nf).filter(|&f| stat[f]) {
                    let mut why = vec![touched[i][f]];
                    for law in &d.statics {
                        let mut m = vec![false; nf];
                        super::mentioned(&law.head, &mut m);
                        if m[f] {
                            why.push(e.lit(&law.cond, true, i));
                        }
                    }
                    let free = e.or(why);
                    e.keep_if(f, i, free.negate());
                }
            }
            Minimality::Cluster | Minimality::Full => {
                for (c, cl) in clusters(d).into_iter().enumerate() {
                    if !cl.iter().any(|&f| stat[f]) {
                        continue;
                    }
                    let mut parts = Vec::new();
                    for &g in &cl {
                        let s = e.same(g, i);
                        parts.push(e.or(vec![touched[i][g].negate(), s]));
                    }
                    let st = e.m.and_lit(parts, || format!("Stat{c}({i})"));
                    for &g in &cl {
                        let s = e.same(g, i);
                        e.clause(&[st], Some(s));
                    }
                }
            }
        }
    }
    let mut changes = vec![Vec::new(); n + 1];
    if mode == Minimality::Full && super::markov_statics(d) {
        for (i, row) in changes.iter_mut().enumerate().skip(1) {
            for f in (0..nf).filter(|&f| stat[f]) {
                if e.layers[i][f] == e.layers[i - 1][f] {
                    continue;
                }
                let (a, b) = (e.layers[i][f], e.layers[i - 1][f]);
                let chg = e.reified(Linear::new(vec![(1, a), (-1, b)], RelOp::Ne, 0));
                row.push(chg.var);
                let mut why = vec![chg.negate(), touched[i][f]];
                e.layers[i][f] = b;
                for law in &d.statics {
                    let mut m = vec![false; nf];
                    super::mentioned(&law.cond, &mut m);
                    super::mentioned(&law.head, &mut m);
                    if m[f] {
                        let c = e.lit(&law.cond, true, i);
                        let h = e.lit(&law.head, true, i);
                        why.push(e.and(vec![c, h.negate()]));
                    }
                }
                e.layers[i][f] = a;
                e.m.post(Constraint::Clause(why));
            }
        }
    }
    (actions, touched, changes)
}

fn cost_vars(e: &mut Enc<'_>, actions: &[Vec<VarId>]) {
    let d = e.d;
    let mut terms = Vec::new();
    let mut ok = Vec::new();
    for (j, row) in actions.iter().enumerate() {
        for (a, &av) in row.iter().enumerate() {
            let Some(c) = e.expr(&d.action_cost(a), j) else { continue };
            if !c.defs.is_empty() {
                let def = e.and(c.defs.clone());
                ok.push(e.or(vec![Lit::neg(av), def]));
            }
            match c.constant() {
                Some(k) => terms.push((k, av)),
                None => {
                    let x = e.materialize(&c);
                    let (lo, hi) = e.bounds(&c);
                    let p = e.fresh(Domain::range(lo.min(0), hi.max(0)));
                    e.m.post(Constraint::Arith { op: Arith::Times, x: av, y: x, z: p });
                    terms.push((1, p));
                }
            }
        }
    }
    let plan_def = e.and(ok);
    let mut plan = Aff { terms, k: 0, defs: Vec::new() };
    let pv = e.materialize(&plan);
    plan = Aff { defs: vec![plan_def], ..Aff::var(pv) };
    let sc = d.state_cost.clone().unwrap_or(Expr::Const(1));
    let states = (0..e.layers.len()).map(|i| e.expr(&sc, i).unwrap_or(Aff::konst(0))).collect();
    e.costs = Some(CostVars { plan, states });
}

/// The planning problem for exactly `n` steps.
pub fn encode_problem(d: &DomainDescription, n: usize, opts: &MvOptions) -> MvEncoding {
    let mut e = Enc::new(d, opts.dump);
    fluent_vars(&mut e, n);
    for i in 0..=n {
        e.statics_at(i);
    }
    let (actions, touched, changes) = transitions(&mut e, n, opts.minimality, None);
    for c in &d.initially {
        e.require(c, 0, &[]);
    }
    if opts.no_loop {
        for i in 0..=n {
            for k in i + 1..=n {
                let mut differ = Vec::new();
                for f in 0..d.fluents.len() {
                    let (a, b) = (e.layers[i][f], e.layers[k][f]);
                    if a != b {
                        differ.push(e.reified(Linear::new(vec![(1, a), (-1, b)], RelOp::Ne, 0)));
                    }
                }
                e.m.post(Constraint::Clause(differ));
            }
        }
    }
    for (c, i) in &d.holds {
        if *i >= 0 && *i as usize <= n {
            e.require(c, *i as usize, &[]);
        }
    }
    for c in &d.always {
        for i in 0..=n {
            e.require(c, i, &[]);
        }
    }
    for c in &d.time_constraints {
        e.require(c, 0, &[]);
    }
    for c in &d.goal {
        e.require(c, n, &[]);
    }
    let mut plan_cost = None;
    let mut objective = None;
    let goal_obj = match opts.minimize {
        Some(Objective::Plan) => Some(Expr::Cost(CostAtom::Plan)),
        Some(Objective::Goal) => Some(Expr::Cost(CostAtom::Goal)),
        None => d.minimize.clone(),
    };
    if d.has_cost_info() || goal_obj.is_some() {
        cost_vars(&mut e, &actions);
        plan_cost = Some(e.costs.as_ref().unwrap().plan.terms[0].1);
        for c in &d.cost_constraints {
            e.require(c, n, &[]);
        }
        if let Some(x) = goal_obj {
            if let Some(a) = e.expr(&x, n) {
                for &l in &a.defs {
                    e.clause(&[], Some(l));
                }
                let v = e.materialize(&a);
                objective = Some(v);
            }
        }
    }
    MvEncoding { model: e.m, fluents: e.layers, actions, touched, changes, plan_cost, objective }
}

/// One transition from the complete state `u` by action `a`: layer 0 is
/// pinned to `u`, and no initial, goal or global assertion is posted.
pub fn encode_transition(d: &DomainDescription, u: &[i64], a: usize, opts: &MvOptions) -> MvEncoding {
    let mut e = Enc::new(d, opts.dump);
    fluent_vars(&mut e, 1);
    for (f, &x) in u.iter().enumerate() {
        let v = e.layers[0][f];
        e.m.fix(v, x);
    }
    e.statics_at(0);
    e.statics_at(1);
    let (actions, touched, changes) = transitions(&mut e, 1, opts.minimality, Some(a));
    MvEncoding { model: e.m, fluents: e.layers, actions, touched, changes, plan_cost: None, objective: None }
}

/// Search for a state `x` witnessing that `w` is not minimally closed after
/// the complete prefix: `x` agrees with `w` on touched fluents, takes
/// either the previous or the new value elsewhere, differs from `w`, and
/// the extended sequence is closed at its last layer. The dynamic part of
/// the transition needs no constraint here: it only involves touched
/// fluents, which `x` shares with `w`.
pub fn minimality_formula(d: &DomainDescription, prefix: &[MvState], w: &[i64], touched: &[bool]) -> Model {
    let mut e = Enc::new(d, false);
    for st in prefix {
        let row: Vec<VarId> = st.iter().map(|x| e.m.constant(x.expect("complete prefix"))).collect();
        e.layers.push(row);
    }
    let u = prefix.last().expect("non-empty prefix");
    let mut differ = Vec::new();
    let mut row = Vec::new();
    for (f, &wf) in w.iter().enumerate() {
        let uf = u[f].expect("complete prefix");
        if touched[f] || uf == wf {
            row.push(e.m.constant(wf));
        } else {
            let x = e.m.var(Domain::from_values([uf, wf]), format!("X({})", d.fluents[f].name));
            // Two-valued, so differing from w means taking the old value.
            differ.push(e.reified(Linear::new(vec![(1, x)], RelOp::Eq, uf)));
            row.push(x);
        }
    }
    e.layers.push(row);
    e.m.post(Constraint::Clause(differ));
    for i in 0..e.layers.len() {
        e.statics_at(i);
    }
    e.m
}

/// Whether `w` passes the minimality check: no counterexample exists.
pub fn is_minimal(d: &DomainDescription, prefix: &[MvState], w: &[i64], touched: &[bool]) -> bool {
    let mut m = minimality_formula(d, prefix, w, touched);
    let order: Vec<VarId> = (0..m.solver.num_vars()).map(|i| VarId(i as u32)).collect();
    m.solver.solve(&order).is_none()
}

/// Encoder successors of `u` under `a`: all solutions of the transition
/// encoding, filtered by the minimality check in `Full` mode.
pub fn transition_solutions(d: &DomainDescription, u: &[i64], a: usize, opts: &MvOptions) -> Vec<Vec<i64>> {
    let mut enc = encode_transition(d, u, a, opts);
    let order: Vec<VarId> = enc.fluents[1].clone();
    let sols = enc.model.solver.all_solutions(&order);
    let mut out: Vec<Vec<i64>> = Vec::new();
    for s in sols {
        let w: Vec<i64> = enc.fluents[1].iter().map(|v| s[v.idx()]).collect();
        if opts.minimality == Minimality::Full {
            let t: Vec<bool> = enc.touched[1].iter().map(|l| l.eval(s[l.var.idx()])).collect();
            if !is_minimal(d, &[super::complete(u)], &w, &t) {
                continue;
            }
        }
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out.sort();
    out
}
