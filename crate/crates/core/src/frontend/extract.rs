//! Ground facts to a validated [`DomainDescription`].

use super::ast::{ActionId, BinOp, Cons, CostAtom, Expr};
use super::description::{DomainDescription, DynLaw, ExecLaw, Fluent, Lang, StaticLaw};
use super::ground::Fact;
use super::term::{Span, Term};
use super::FrontendError;
use crate::fd::RelOp;
use std::collections::{HashMap, HashSet};

/// Where a constraint occurs; decides which annotations and atoms are legal.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Effect of a dynamic law: any annotation.
    Effect,
    /// Non-positive annotations only.
    Law,
    /// No annotations (initially, goal, holds, always).
    State,
    /// Cost constraints and objectives: cost atoms allowed, no annotations.
    Cost,
}

struct Extractor {
    lang: Lang,
    fluents: HashMap<Term, usize>,
    actions: HashMap<Term, ActionId>,
    span: Span,
}

fn relop(name: &str) -> Option<RelOp> {
    Some(match name {
        "eq" | "=" | "=:=" => RelOp::Eq,
        "neq" | "\\=" | "=\\=" => RelOp::Ne,
        "geq" | ">=" => RelOp::Ge,
        "leq" | "=<" => RelOp::Le,
        "gt" | ">" => RelOp::Gt,
        "lt" | "<" => RelOp::Lt,
        _ => return None,
    })
}

impl Extractor {
    fn malformed(&self, what: &'static str, t: &Term) -> FrontendError {
        FrontendError::Malformed { span: self.span, what, term: t.to_string() }
    }

    fn action(&self, t: &Term) -> Result<ActionId, FrontendError> {
        self.actions
            .get(t)
            .copied()
            .ok_or_else(|| FrontendError::UndeclaredAction { span: self.span, name: t.to_string() })
    }

    fn fluent(&self, t: &Term) -> Result<usize, FrontendError> {
        self.fluents
            .get(t)
            .copied()
            .ok_or_else(|| FrontendError::UndeclaredFluent { span: self.span, name: t.to_string() })
    }

    fn annotated(&self, f: &Term, k: i64, ctx: Ctx) -> Result<Expr, FrontendError> {
        let id = self.fluent(f)?;
        let ok = match ctx {
            Ctx::Effect => true,
            Ctx::Law => k <= 0,
            Ctx::State | Ctx::Cost => k == 0,
        };
        if !ok {
            return Err(FrontendError::MisplacedAnnotation { span: self.span, fluent: format!("{f}^{k}") });
        }
        Ok(Expr::Fluent(id, k))
    }

    fn expr(&self, t: &Term, ctx: Ctx) -> Result<Expr, FrontendError> {
        if let Some(&id) = self.fluents.get(t) {
            return Ok(Expr::Fluent(id, 0));
        }
        let bx = |e: Expr| Box::new(e);
        Ok(match t {
            Term::Int(n) => Expr::Const(*n),
            Term::App(op, a) if a.len() == 2 && op == "^" => match &a[1] {
                Term::Int(k) => self.annotated(&a[0], *k, ctx)?,
                _ => return Err(self.malformed("annotation", t)),
            },
            Term::App(op, a) if a.len() == 2 && op == "@" => match &a[1] {
                Term::Int(k) => Expr::At(self.fluent(&a[0])?, *k),
                _ => return Err(self.malformed("timed fluent", t)),
            },
            Term::App(op, a) if a.len() == 2 => {
                let bop = match op.as_str() {
                    "+" => BinOp::Add,
                    "-" => BinOp::Sub,
                    "*" => BinOp::Mul,
                    "/" | "//" => BinOp::Div,
                    "mod" => BinOp::Mod,
                    _ => return Err(self.undeclared_or(t)),
                };
                Expr::Bin(bop, bx(self.expr(&a[0], ctx)?), bx(self.expr(&a[1], ctx)?))
            }
            Term::App(op, a) if a.len() == 1 && op == "-" => Expr::Neg(bx(self.expr(&a[0], ctx)?)),
            Term::App(op, a) if a.len() == 1 && op == "abs" => Expr::Abs(bx(self.expr(&a[0], ctx)?)),
            Term::App(op, a) if a.len() == 1 && op == "rei" => Expr::Rei(Box::new(self.cons(&a[0], ctx)?)),
            Term::Atom(n) if ctx == Ctx::Cost && n == "plan" => Expr::Cost(CostAtom::Plan),
            Term::Atom(n) if ctx == Ctx::Cost && n == "goal" => Expr::Cost(CostAtom::Goal),
            Term::App(n, a) if ctx == Ctx::Cost && n == "state" && a.len() == 1 => match a[0] {
                Term::Int(i) => Expr::Cost(CostAtom::State(i)),
                _ => return Err(self.malformed("state cost", t)),
            },
            _ => return Err(self.undeclared_or(t)),
        })
    }

    fn undeclared_or(&self, t: &Term) -> FrontendError {
        match t {
            Term::Atom(_) | Term::App(..) => FrontendError::UndeclaredFluent { span: self.span, name: t.to_string() },
            _ => self.malformed("expression", t),
        }
    }

    fn cons(&self, t: &Term, ctx: Ctx) -> Result<Cons, FrontendError> {
        if self.lang == Lang::B {
            return self.literals(t);
        }
        // A Boolean fluent on its own is the literal `f eq 1`.
        if let Some(&id) = self.fluents.get(t) {
            return Ok(Cons::eq(Expr::Fluent(id, 0), Expr::Const(1)));
        }
        Ok(match t {
            Term::List(items) => {
                Cons::And(items.iter().map(|c| self.cons(c, ctx)).collect::<Result<_, _>>()?)
            }
            Term::Atom(n) if n == "true" => Cons::True,
            Term::Atom(n) if n == "false" => Cons::False,
            Term::App(n, a) if n == "neg" && a.len() == 1 => match self.fluents.get(&a[0]) {
                Some(&id) => Cons::eq(Expr::Fluent(id, 0), Expr::Const(0)),
                None => Cons::Not(Box::new(self.cons(&a[0], ctx)?)),
            },
            Term::App(n, a) if n == "and" => {
                Cons::And(a.iter().map(|c| self.cons(c, ctx)).collect::<Result<_, _>>()?)
            }
            Term::App(n, a) if n == "or" => {
                Cons::Or(a.iter().map(|c| self.cons(c, ctx)).collect::<Result<_, _>>()?)
            }
            Term::App(n, a) if a.len() == 2 && relop(n).is_some() => {
                Cons::Prim(relop(n).unwrap(), self.expr(&a[0], ctx)?, self.expr(&a[1], ctx)?)
            }
            _ => return Err(self.malformed("constraint", t)),
        })
    }

    /// B constraints: a literal, or a list of literals read as a conjunction.
    fn literals(&self, t: &Term) -> Result<Cons, FrontendError> {
        let lit = |t: &Term| -> Result<Cons, FrontendError> {
            let (f, v) = match t {
                Term::App(n, a) if n == "neg" && a.len() == 1 => (&a[0], 0),
                _ => (t, 1),
            };
            match self.fluents.get(f) {
                Some(&id) => Ok(Cons::eq(Expr::Fluent(id, 0), Expr::Const(v))),
                None if matches!(f, Term::App(n, a) if a.len() == 2 && (relop(n).is_some() || n == "^")) => {
                    Err(FrontendError::NonBoolean { span: self.span, msg: t.to_string() })
                }
                None => Err(FrontendError::UndeclaredFluent { span: self.span, name: f.to_string() }),
            }
        };
        match t {
            Term::List(items) => Ok(Cons::and(items.iter().map(lit).collect::<Result<_, _>>()?)),
            Term::Atom(n) if n == "true" => Ok(Cons::True),
            t => lit(t),
        }
    }
}

fn declared_domain(atom: &Term) -> Option<Result<(Term, Vec<i64>), ()>> {
    let (n, a) = match atom {
        Term::Atom(n) => (n.as_str(), &[][..]),
        Term::App(n, a) => (n.as_str(), a.as_slice()),
        _ => return None,
    };
    if n != "fluent" {
        return None;
    }
    Some(match a {
        [f] => Ok((f.clone(), vec![0, 1])),
        [f, Term::Int(lo), Term::Int(hi)] => Ok((f.clone(), (*lo..=*hi).collect())),
        [f, Term::List(vs)] => {
            let mut d = Vec::new();
            for v in vs {
                match v {
                    Term::Int(x) => d.push(*x),
                    _ => return Some(Err(())),
                }
            }
            d.sort();
            d.dedup();
            Ok((f.clone(), d))
        }
        _ => Err(()),
    })
}

fn push_unique<T: Clone + Eq + std::hash::Hash>(seen: &mut HashSet<T>, key: T) -> bool {
    seen.insert(key)
}

/// Builds the domain description for `lang` from the grounded facts.
/// Facts with unknown predicates are ignored; duplicate laws are dropped.
pub fn extract_domain(facts: &[Fact], lang: Lang) -> Result<DomainDescription, FrontendError> {
    let mut d = DomainDescription::empty(lang);
    let mut x = Extractor { lang, fluents: HashMap::new(), actions: HashMap::new(), span: Span::default() };

    for fact in facts {
        x.span = fact.span;
        match declared_domain(&fact.atom) {
            None => {}
            Some(Err(())) => return Err(x.malformed("fluent declaration", &fact.atom)),
            Some(Ok((name, dom))) => {
                if dom.is_empty() {
                    return Err(FrontendError::EmptyDomain { span: fact.span, fluent: name.to_string() });
                }
                if lang == Lang::B && dom != [0, 1] {
                    return Err(FrontendError::NonBoolean {
                        span: fact.span,
                        msg: format!("fluent {name} ranges over {dom:?}"),
                    });
                }
                match x.fluents.get(&name) {
                    Some(&id) if d.fluents[id].dom == dom => {}
                    Some(_) => return Err(x.malformed("redeclared fluent", &fact.atom)),
                    None => {
                        x.fluents.insert(name.clone(), d.fluents.len());
                        d.fluents.push(Fluent { name, dom });
                    }
                }
            }
        }
        if let Term::App(n, a) = &fact.atom {
            if n == "action" && a.len() == 1 && !x.actions.contains_key(&a[0]) {
                x.actions.insert(a[0].clone(), d.actions.len());
                d.actions.push(a[0].clone());
            }
        }
    }

    let mut seen_dyn = HashSet::new();
    let mut seen_stat = HashSet::new();
    let mut seen_exec = HashSet::new();
    let mut seen_nonexec = HashSet::new();
    let mut seen_misc: HashSet<(&'static str, Cons)> = HashSet::new();
    let mut seen_holds = HashSet::new();
    let mut seen_cost = HashSet::new();

    for fact in facts {
        x.span = fact.span;
        let span = fact.span;
        let (n, a) = match &fact.atom {
            Term::App(n, a) => (n.as_str(), a.as_slice()),
            _ => continue,
        };
        match (n, a) {
            ("causes", [act, eff, pre]) => {
                let law = DynLaw {
                    action: x.action(act)?,
                    effect: x.cons(eff, Ctx::Effect)?,
                    pre: x.cons(pre, Ctx::Law)?,
                    span,
                };
                if push_unique(&mut seen_dyn, (law.action, law.effect.clone(), law.pre.clone())) {
                    d.dynamic.push(law);
                }
            }
            ("caused", [cond, head]) => {
                let law = StaticLaw { cond: x.cons(cond, Ctx::Law)?, head: x.cons(head, Ctx::Law)?, span };
                if push_unique(&mut seen_stat, (law.cond.clone(), law.head.clone())) {
                    d.statics.push(law);
                }
            }
            ("executable", [act, c]) | ("nonexecutable", [act, c]) => {
                let law = ExecLaw { action: x.action(act)?, cond: x.cons(c, Ctx::Law)?, span };
                let (seen, out) = if n == "executable" {
                    (&mut seen_exec, &mut d.exec)
                } else {
                    (&mut seen_nonexec, &mut d.nonexec)
                };
                if push_unique(seen, (law.action, law.cond.clone())) {
                    out.push(law);
                }
            }
            ("initially", [c]) | ("goal", [c]) | ("always", [c]) | ("time_constraint", [c]) | ("cost_constraint", [c]) => {
                let ctx = if n == "cost_constraint" { Ctx::Cost } else { Ctx::State };
                let c = x.cons(c, ctx)?;
                let key: &'static str = match n {
                    "initially" => "initially",
                    "goal" => "goal",
                    "always" => "always",
                    "time_constraint" => "time_constraint",
                    _ => "cost_constraint",
                };
                if !push_unique(&mut seen_misc, (key, c.clone())) {
                    continue;
                }
                if key == "initially" {
                    check_pinned(&d, &c, span)?;
                }
                match key {
                    "initially" => d.initially.push(c),
                    "goal" => d.goal.push(c),
                    "always" => d.always.push(c),
                    "time_constraint" => d.time_constraints.push(c),
                    _ => d.cost_constraints.push(c),
                }
            }
            ("holds", [c, Term::Int(i)]) => {
                let c = x.cons(c, Ctx::State)?;
                if push_unique(&mut seen_holds, (c.clone(), *i)) {
                    d.holds.push((c, *i));
                }
            }
            ("action_cost", [act, e]) => {
                let a = x.action(act)?;
                let e = x.expr(e, Ctx::State)?;
                if push_unique(&mut seen_cost, a) {
                    d.action_costs.push((a, e));
                } else if d.action_costs.iter().any(|c| c.0 == a && c.1 != e) {
                    return Err(x.malformed("conflicting action cost", &fact.atom));
                }
            }
            ("state_cost", [e]) => {
                let e = x.expr(e, Ctx::State)?;
                if d.state_cost.as_ref().is_some_and(|o| *o != e) {
                    return Err(x.malformed("second state cost", &fact.atom));
                }
                d.state_cost = Some(e);
            }
            ("minimize_cost", [e]) => {
                let e = x.expr(e, Ctx::Cost)?;
                if d.minimize.as_ref().is_some_and(|o| *o != e) {
                    return Err(x.malformed("second objective", &fact.atom));
                }
                d.minimize = Some(e);
            }
            ("causes" | "caused" | "executable" | "nonexecutable" | "initially" | "goal" | "always"
            | "time_constraint" | "cost_constraint" | "holds" | "action_cost" | "state_cost"
            | "minimize_cost", _) => return Err(x.malformed("axiom", &fact.atom)),
            _ => {}
        }
    }

    if lang == Lang::B && d.has_cost_info() {
        return Err(FrontendError::NonBoolean { span: Span::default(), msg: "cost assertions need B^MV".into() });
    }
    for (i, a) in d.actions.iter().enumerate() {
        if !d.exec.iter().any(|l| l.action == i) {
            return Err(FrontendError::MissingExecutable { action: a.to_string() });
        }
    }
    Ok(d)
}

/// Rejects `initially(f eq k)` with `k` outside the domain of `f`.
fn check_pinned(d: &DomainDescription, c: &Cons, span: Span) -> Result<(), FrontendError> {
    match c {
        Cons::And(cs) => cs.iter().try_for_each(|c| check_pinned(d, c, span)),
        Cons::Prim(RelOp::Eq, Expr::Fluent(f, 0), Expr::Const(k))
        | Cons::Prim(RelOp::Eq, Expr::Const(k), Expr::Fluent(f, 0)) => {
            if d.fluents[*f].dom.binary_search(k).is_err() {
                Err(FrontendError::InitiallyOutOfDomain { span, fluent: d.fluent_name(*f), value: *k })
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}
