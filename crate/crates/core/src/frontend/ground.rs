//! Bottom-up grounding of stratified, negation-free programs.
//!
//! Ordinary predicates are computed as a least fixpoint, stratum by
//! stratum. A predicate whose clauses use `!` is treated as a function-like
//! helper instead: it is never materialized and is solved top-down, in
//! clause order with Prolog cut semantics, whenever a rule body calls it.
//! That is how the recursive cost builder of the protein encoding grounds.
//!
//! Builtins (reconstructed; the encodings use them without definitions):
//! `interval(X,L,H)` enumerates `L..=H`; `neq/2`, `\=`, `\==` are ground
//! disequality; `diff(A,B,...)` requires pairwise distinct arguments;
//! `is`, `=:=`, `=\=`, `<`, `>`, `=<`, `>=` are integer arithmetic;
//! `findall(T,G,L)` collects `T` over solutions of `G` in fact order;
//! `append(A,B,C)` concatenates ground lists.

use super::term::{Clause, Span, Term};
use super::FrontendError;
use std::collections::{HashMap, HashSet};

/// Grounding limits.
#[derive(Clone, Copy, Debug)]
pub struct GroundConfig {
    pub max_atoms: usize,
    pub max_call_depth: usize,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig { max_atoms: 2_000_000, max_call_depth: 2_000 }
    }
}

type Pred = (String, usize);

#[derive(Clone, Debug)]
enum Pat {
    Var(usize),
    Int(i64),
    Atom(String),
    App(String, Vec<Pat>),
    List(Vec<Pat>),
}

#[derive(Clone, Debug)]
enum Goal {
    Call(Pred, Vec<Pat>),
    TopDown(Pred, Vec<Pat>),
    Cut,
    True,
    Compare(String, Pat, Pat),
    Is(Pat, Pat),
    Unify(Pat, Pat),
    Distinct(Vec<Pat>),
    Interval(Pat, Pat, Pat),
    Findall(Pat, Vec<Goal>, Pat),
    Append(Pat, Pat, Pat),
}

#[derive(Clone, Debug)]
struct Rule {
    head: Pat,
    pred: Pred,
    body: Vec<Goal>,
    nvars: usize,
    span: Span,
}

fn pred_of(t: &Term) -> Option<Pred> {
    t.functor().map(|(n, a)| (n.to_string(), a))
}

fn is_builtin(name: &str, arity: usize) -> bool {
    matches!(
        (name, arity),
        ("interval", 3)
            | ("neq", 2)
            | ("is", 2)
            | ("=", 2)
            | ("\\=", 2)
            | ("==", 2)
            | ("\\==", 2)
            | ("<", 2)
            | (">", 2)
            | ("=<", 2)
            | (">=", 2)
            | ("=:=", 2)
            | ("=\\=", 2)
            | ("findall", 3)
            | ("append", 3)
            | ("!", 0)
            | ("true", 0)
            | (",", 2)
    ) || (name == "diff" && arity >= 2)
}

struct Compiler<'a> {
    vars: Vec<String>,
    topdown: &'a HashSet<Pred>,
    span: Span,
}

impl Compiler<'_> {
    fn pat(&mut self, t: &Term) -> Pat {
        match t {
            Term::Var(v) if v == "_" => {
                self.vars.push(v.clone());
                Pat::Var(self.vars.len() - 1)
            }
            Term::Var(v) => match self.vars.iter().position(|x| x == v) {
                Some(i) => Pat::Var(i),
                None => {
                    self.vars.push(v.clone());
                    Pat::Var(self.vars.len() - 1)
                }
            },
            Term::Int(n) => Pat::Int(*n),
            Term::Atom(a) => Pat::Atom(a.clone()),
            Term::App(n, a) => Pat::App(n.clone(), a.iter().map(|x| self.pat(x)).collect()),
            Term::List(a) => Pat::List(a.iter().map(|x| self.pat(x)).collect()),
        }
    }

    fn goal(&mut self, t: &Term, out: &mut Vec<Goal>) -> Result<(), FrontendError> {
        let (name, arity) = match t.functor() {
            Some(f) => f,
            None => {
                return Err(FrontendError::Ground {
                    span: self.span,
                    msg: format!("`{t}` is not a callable goal"),
                })
            }
        };
        let a = t.args();
        let g = match (name, arity) {
            (",", 2) => {
                self.goal(&a[0], out)?;
                return self.goal(&a[1], out);
            }
            ("!", 0) => Goal::Cut,
            ("true", 0) => Goal::True,
            ("interval", 3) => Goal::Interval(self.pat(&a[0]), self.pat(&a[1]), self.pat(&a[2])),
            ("neq", 2) | ("\\=", 2) | ("\\==", 2) => Goal::Distinct(vec![self.pat(&a[0]), self.pat(&a[1])]),
            ("diff", _) => Goal::Distinct(a.iter().map(|x| self.pat(x)).collect()),
            ("is", 2) => Goal::Is(self.pat(&a[0]), self.pat(&a[1])),
            ("=", 2) | ("==", 2) => Goal::Unify(self.pat(&a[0]), self.pat(&a[1])),
            ("<", 2) | (">", 2) | ("=<", 2) | (">=", 2) | ("=:=", 2) | ("=\\=", 2) => {
                Goal::Compare(name.to_string(), self.pat(&a[0]), self.pat(&a[1]))
            }
            ("findall", 3) => {
                let tmpl = self.pat(&a[0]);
                let mut inner = Vec::new();
                self.goal(&a[1], &mut inner)?;
                Goal::Findall(tmpl, inner, self.pat(&a[2]))
            }
            ("append", 3) => Goal::Append(self.pat(&a[0]), self.pat(&a[1]), self.pat(&a[2])),
            _ => {
                let p = (name.to_string(), arity);
                let args = a.iter().map(|x| self.pat(x)).collect();
                if self.topdown.contains(&p) {
                    Goal::TopDown(p, args)
                } else {
                    Goal::Call(p, args)
                }
            }
        };
        out.push(g);
        Ok(())
    }
}

fn pat_vars(p: &Pat, out: &mut HashSet<usize>) {
    match p {
        Pat::Var(i) => {
            out.insert(*i);
        }
        Pat::App(_, a) | Pat::List(a) => a.iter().for_each(|x| pat_vars(x, out)),
        _ => {}
    }
}

fn covered(p: &Pat, bound: &HashSet<usize>) -> bool {
    let mut vs = HashSet::new();
    pat_vars(p, &mut vs);
    vs.is_subset(bound)
}

/// Static binding analysis: every goal's inputs are bound when reached and
/// the head is ground at the end. Returns the offending variable name.
fn range_restricted(rule: &Rule, names: &[String]) -> Result<(), String> {
    fn walk(goals: &[Goal], bound: &mut HashSet<usize>, names: &[String]) -> Result<(), String> {
        let need = |p: &Pat, bound: &HashSet<usize>| -> Result<(), String> {
            let mut vs = HashSet::new();
            pat_vars(p, &mut vs);
            match vs.iter().find(|v| !bound.contains(v)) {
                Some(v) => Err(names[*v].clone()),
                None => Ok(()),
            }
        };
        for g in goals {
            match g {
                Goal::Call(_, args) | Goal::TopDown(_, args) => {
                    for a in args {
                        pat_vars(a, bound);
                    }
                }
                Goal::Cut | Goal::True => {}
                Goal::Compare(_, l, r) => {
                    need(l, bound)?;
                    need(r, bound)?;
                }
                Goal::Is(l, r) => {
                    need(r, bound)?;
                    pat_vars(l, bound);
                }
                Goal::Unify(l, r) => {
                    if covered(l, bound) {
                        pat_vars(r, bound);
                    } else {
                        need(r, bound)?;
                        pat_vars(l, bound);
                    }
                }
                Goal::Distinct(ps) => {
                    for p in ps {
                        need(p, bound)?;
                    }
                }
                Goal::Interval(x, l, h) => {
                    need(l, bound)?;
                    need(h, bound)?;
                    pat_vars(x, bound);
                }
                Goal::Findall(t, inner, out) => {
                    let mut local = bound.clone();
                    walk(inner, &mut local, names)?;
                    need(t, &local)?;
                    pat_vars(out, bound);
                }
                Goal::Append(a, b, c) => {
                    need(a, bound)?;
                    need(b, bound)?;
                    pat_vars(c, bound);
                }
            }
        }
        Ok(())
    }
    let mut bound = HashSet::new();
    walk(&rule.body, &mut bound, names)?;
    let mut hv = HashSet::new();
    pat_vars(&rule.head, &mut hv);
    match hv.iter().find(|v| !bound.contains(v)) {
        Some(v) => Err(names[*v].clone()),
        None => Ok(()),
    }
}

#[derive(Default)]
struct Relation {
    tuples: Vec<Vec<Term>>,
    spans: Vec<Span>,
    seen: HashSet<Vec<Term>>,
    by_first: HashMap<Term, Vec<usize>>,
}

impl Relation {
    fn insert(&mut self, t: Vec<Term>, span: Span) -> bool {
        if self.seen.contains(&t) {
            return false;
        }
        if let Some(f) = t.first() {
            self.by_first.entry(f.clone()).or_default().push(self.tuples.len());
        }
        self.seen.insert(t.clone());
        self.tuples.push(t);
        self.spans.push(span);
        true
    }
}

struct Env {
    vals: Vec<Option<Term>>,
    trail: Vec<usize>,
}

impl Env {
    fn new(n: usize) -> Self {
        Env { vals: vec![None; n], trail: Vec::new() }
    }

    fn bind(&mut self, v: usize, t: Term) {
        self.vals[v] = Some(t);
        self.trail.push(v);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.vals[v] = None;
        }
    }

    /// Instantiates a pattern; None if a variable is unbound.
    fn subst(&self, p: &Pat) -> Option<Term> {
        Some(match p {
            Pat::Var(i) => self.vals[*i].clone()?,
            Pat::Int(n) => Term::Int(*n),
            Pat::Atom(a) => Term::Atom(a.clone()),
            Pat::App(n, a) => Term::App(n.clone(), a.iter().map(|x| self.subst(x)).collect::<Option<_>>()?),
            Pat::List(a) => Term::List(a.iter().map(|x| self.subst(x)).collect::<Option<_>>()?),
        })
    }

    /// One-sided unification of a pattern against a ground term.
    fn matches(&mut self, p: &Pat, t: &Term) -> bool {
        match (p, t) {
            (Pat::Var(i), _) => match &self.vals[*i] {
                Some(b) => b == t,
                None => {
                    self.bind(*i, t.clone());
                    true
                }
            },
            (Pat::Int(a), Term::Int(b)) => a == b,
            (Pat::Atom(a), Term::Atom(b)) => a == b,
            (Pat::App(n, a), Term::App(m, b)) => {
                n == m && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.matches(x, y))
            }
            (Pat::List(a), Term::List(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.matches(x, y))
            }
            _ => false,
        }
    }
}

/// Integer evaluation of a ground arithmetic term.
pub fn arith(t: &Term) -> Result<i64, String> {
    let bin = |a: &[Term], f: fn(i64, i64) -> Option<i64>| -> Result<i64, String> {
        let (x, y) = (arith(&a[0])?, arith(&a[1])?);
        f(x, y).ok_or_else(|| format!("arithmetic error evaluating `{t}`"))
    };
    match t {
        Term::Int(n) => Ok(*n),
        Term::App(n, a) => match (n.as_str(), a.len()) {
            ("+", 2) => bin(a, i64::checked_add),
            ("-", 2) => bin(a, i64::checked_sub),
            ("*", 2) => bin(a, i64::checked_mul),
            ("/", 2) | ("//", 2) => bin(a, i64::checked_div),
            // Prolog `mod`: result takes the sign of the divisor.
            ("mod", 2) => bin(a, |x, y| {
                let r = x.checked_rem(y)?;
                Some(if r != 0 && (r < 0) != (y < 0) { r + y } else { r })
            }),
            ("rem", 2) => bin(a, i64::checked_rem),
            ("min", 2) => bin(a, |x, y| Some(x.min(y))),
            ("max", 2) => bin(a, |x, y| Some(x.max(y))),
            ("-", 1) => arith(&a[0])?.checked_neg().ok_or_else(|| "overflow".to_string()),
            ("abs", 1) => arith(&a[0])?.checked_abs().ok_or_else(|| "overflow".to_string()),
            _ => Err(format!("`{t}` is not an arithmetic expression")),
        },
        _ => Err(format!("`{t}` is not an arithmetic expression")),
    }
}

struct Db {
    rels: HashMap<Pred, Relation>,
    count: usize,
}

struct Grounder<'a> {
    db: Db,
    topdown: HashMap<Pred, Vec<Rule>>,
    cfg: &'a GroundConfig,
}

type Res<T> = Result<T, FrontendError>;

impl Grounder<'_> {
    fn gerr(span: Span, msg: impl Into<String>) -> FrontendError {
        FrontendError::Ground { span, msg: msg.into() }
    }

    fn ground_of(env: &Env, p: &Pat, span: Span) -> Res<Term> {
        env.subst(p).ok_or_else(|| Self::gerr(span, "argument is not sufficiently instantiated"))
    }

    /// Enumerates solutions of `goals`; returns true when a cut was executed.
    fn run(
        &self,
        goals: &[Goal],
        env: &mut Env,
        span: Span,
        depth: usize,
        k: &mut dyn FnMut(&mut Env) -> Res<()>,
    ) -> Res<bool> {
        let Some((g, rest)) = goals.split_first() else {
            k(env)?;
            return Ok(false);
        };
        let mark = env.trail.len();
        match g {
            Goal::True => self.run(rest, env, span, depth, k),
            Goal::Cut => {
                self.run(rest, env, span, depth, k)?;
                Ok(true)
            }
            Goal::Call(p, args) => {
                let Some(rel) = self.db.rels.get(p) else { return Ok(false) };
                let idx: Option<&Vec<usize>> = match args.first().and_then(|a| env.subst(a)) {
                    Some(f) => match rel.by_first.get(&f) {
                        Some(v) => Some(v),
                        None => return Ok(false),
                    },
                    None => None,
                };
                let n = idx.map(|v| v.len()).unwrap_or(rel.tuples.len());
                for j in 0..n {
                    let tup = &rel.tuples[idx.map(|v| v[j]).unwrap_or(j)];
                    if args.iter().zip(tup).all(|(a, t)| env.matches(a, t)) {
                        let cut = self.run(rest, env, span, depth, k)?;
                        env.undo(mark);
                        if cut {
                            return Ok(true);
                        }
                    } else {
                        env.undo(mark);
                    }
                }
                Ok(false)
            }
            Goal::TopDown(p, args) => {
                let inputs: Vec<Option<Term>> = args.iter().map(|a| env.subst(a)).collect();
                let answers = self.solve_topdown(p, &inputs, span, depth + 1)?;
                for tup in answers {
                    if args.iter().zip(&tup).all(|(a, t)| env.matches(a, t)) {
                        let cut = self.run(rest, env, span, depth, k)?;
                        env.undo(mark);
                        if cut {
                            return Ok(true);
                        }
                    } else {
                        env.undo(mark);
                    }
                }
                Ok(false)
            }
            Goal::Compare(op, l, r) => {
                let x = arith(&Self::ground_of(env, l, span)?).map_err(|m| Self::gerr(span, m))?;
                let y = arith(&Self::ground_of(env, r, span)?).map_err(|m| Self::gerr(span, m))?;
                let ok = match op.as_str() {
                    "<" => x < y,
                    ">" => x > y,
                    "=<" => x <= y,
                    ">=" => x >= y,
                    "=:=" => x == y,
                    _ => x != y,
                };
                if ok {
                    self.run(rest, env, span, depth, k)
                } else {
                    Ok(false)
                }
            }
            Goal::Is(l, r) => {
                let v = arith(&Self::ground_of(env, r, span)?).map_err(|m| Self::gerr(span, m))?;
                let ok = env.matches(l, &Term::Int(v));
                let cut = if ok { self.run(rest, env, span, depth, k)? } else { false };
                env.undo(mark);
                Ok(cut)
            }
            Goal::Unify(l, r) => {
                let ok = match env.subst(l) {
                    Some(t) => env.matches(r, &t),
                    None => {
                        let t = Self::ground_of(env, r, span)?;
                        env.matches(l, &t)
                    }
                };
                let cut = if ok { self.run(rest, env, span, depth, k)? } else { false };
                env.undo(mark);
                Ok(cut)
            }
            Goal::Distinct(ps) => {
                let ts = ps.iter().map(|p| Self::ground_of(env, p, span)).collect::<Res<Vec<_>>>()?;
                let distinct = (0..ts.len()).all(|i| (i + 1..ts.len()).all(|j| ts[i] != ts[j]));
                if distinct {
                    self.run(rest, env, span, depth, k)
                } else {
                    Ok(false)
                }
            }
            Goal::Interval(x, l, h) => {
                let lo = arith(&Self::ground_of(env, l, span)?).map_err(|m| Self::gerr(span, m))?;
                let hi = arith(&Self::ground_of(env, h, span)?).map_err(|m| Self::gerr(span, m))?;
                for v in lo..=hi {
                    if env.matches(x, &Term::Int(v)) {
                        let cut = self.run(rest, env, span, depth, k)?;
                        env.undo(mark);
                        if cut {
                            return Ok(true);
                        }
                    } else {
                        env.undo(mark);
                    }
                }
                Ok(false)
            }
            Goal::Findall(t, inner, out) => {
                let mut items = Vec::new();
                self.run(inner, env, span, depth, &mut |e: &mut Env| {
                    items.push(Self::ground_of(e, t, span)?);
                    Ok(())
                })?;
                let ok = env.matches(out, &Term::List(items));
                let cut = if ok { self.run(rest, env, span, depth, k)? } else { false };
                env.undo(mark);
                Ok(cut)
            }
            Goal::Append(a, b, c) => {
                let (ta, tb) = (Self::ground_of(env, a, span)?, Self::ground_of(env, b, span)?);
                let joined = match (ta, tb) {
                    (Term::List(mut x), Term::List(y)) => {
                        x.extend(y);
                        Term::List(x)
                    }
                    _ => return Err(Self::gerr(span, "append/3 expects lists")),
                };
                let ok = env.matches(c, &joined);
                let cut = if ok { self.run(rest, env, span, depth, k)? } else { false };
                env.undo(mark);
                Ok(cut)
            }
        }
    }

    /// Clause-order resolution of a cut-using helper predicate. Unbound
    /// arguments are outputs; each answer is a ground argument tuple.
    fn solve_topdown(&self, p: &Pred, inputs: &[Option<Term>], span: Span, depth: usize) -> Res<Vec<Vec<Term>>> {
        if depth > self.cfg.max_call_depth {
            return Err(Self::gerr(span, format!("call depth limit exceeded in `{}/{}`", p.0, p.1)));
        }
        let mut answers = Vec::new();
        for rule in &self.topdown[p] {
            let mut env = Env::new(rule.nvars);
            let head_args: &[Pat] = match &rule.head {
                Pat::App(_, a) => a,
                _ => &[],
            };
            if !head_args.iter().zip(inputs).all(|(h, i)| match i {
                Some(t) => env.matches(h, t),
                None => true,
            }) {
                continue;
            }
            let cut = self.run(&rule.body, &mut env, rule.span, depth, &mut |e: &mut Env| {
                let tup = head_args
                    .iter()
                    .map(|h| Self::ground_of(e, h, rule.span))
                    .collect::<Res<Vec<_>>>()?;
                answers.push(tup);
                Ok(())
            })?;
            if cut {
                break;
            }
        }
        Ok(answers)
    }

    fn add(&mut self, p: &Pred, t: Vec<Term>, span: Span) -> Res<bool> {
        let rel = self.db.rels.entry(p.clone()).or_default();
        if rel.insert(t, span) {
            self.db.count += 1;
            if self.db.count > self.cfg.max_atoms {
                return Err(Self::gerr(span, format!("atom budget of {} exceeded", self.cfg.max_atoms)));
            }
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

fn body_preds(goals: &[Goal], strict: bool, out: &mut Vec<(Pred, bool)>) {
    for g in goals {
        match g {
            Goal::Call(p, _) => out.push((p.clone(), strict)),
            Goal::TopDown(p, _) => out.push((p.clone(), true)),
            Goal::Findall(_, inner, _) => body_preds(inner, true, out),
            _ => {}
        }
    }
}

/// A derived ground atom with the span of the clause that first produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub atom: Term,
    pub span: Span,
}

/// Computes the least fixpoint of `clauses` and returns every derived ground
/// atom, grouped by predicate in name order, each group in derivation order.
pub fn ground_program_with(clauses: &[Clause], cfg: &GroundConfig) -> Result<Vec<Fact>, FrontendError> {
    // Helper predicates with cut are solved top-down.
    let mut topdown: HashSet<Pred> = HashSet::new();
    for c in clauses {
        if c.body.iter().any(|g| matches!(g, Term::Atom(a) if a == "!")) {
            topdown.insert(pred_of(&c.head).unwrap());
        }
    }
    let mut rules = Vec::new();
    let mut td_rules: HashMap<Pred, Vec<Rule>> = HashMap::new();
    for c in clauses {
        let pred = pred_of(&c.head).unwrap();
        if is_builtin(&pred.0, pred.1) {
            return Err(FrontendError::Ground {
                span: c.span,
                msg: format!("cannot redefine builtin `{}/{}`", pred.0, pred.1),
            });
        }
        let mut comp = Compiler { vars: Vec::new(), topdown: &topdown, span: c.span };
        let head = comp.pat(&c.head);
        let mut body = Vec::new();
        for g in &c.body {
            comp.goal(g, &mut body)?;
        }
        let rule = Rule { head, pred: pred.clone(), body, nvars: comp.vars.len(), span: c.span };
        if topdown.contains(&pred) {
            td_rules.entry(pred).or_default().push(rule);
        } else {
            if let Err(v) = range_restricted(&rule, &comp.vars) {
                return Err(FrontendError::NotRangeRestricted { span: c.span, var: v });
            }
            rules.push(rule);
        }
    }

    // Stratification: a findall or helper call needs its predicates complete.
    let mut deps: HashMap<Pred, Vec<(Pred, bool)>> = HashMap::new();
    for r in rules.iter().chain(td_rules.values().flatten()) {
        let mut ds = Vec::new();
        body_preds(&r.body, topdown.contains(&r.pred), &mut ds);
        deps.entry(r.pred.clone()).or_default().extend(ds);
    }
    let preds: Vec<Pred> = deps.keys().cloned().collect();
    let mut stratum: HashMap<Pred, usize> = preds.iter().map(|p| (p.clone(), 0)).collect();
    loop {
        let mut changed = false;
        for p in &preds {
            for (q, strict) in &deps[p] {
                let sq = stratum.get(q).copied().unwrap_or(0);
                let need = if *strict && !topdown.contains(q) { sq + 1 } else { sq };
                if stratum[p] < need {
                    if need > preds.len() + 1 {
                        let span = rules.iter().find(|r| &r.pred == p).map(|r| r.span).unwrap_or_default();
                        return Err(FrontendError::Ground {
                            span,
                            msg: format!("`{}/{}` is not stratified", p.0, p.1),
                        });
                    }
                    stratum.insert(p.clone(), need);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let max_stratum = stratum.values().copied().max().unwrap_or(0);

    let mut g = Grounder { db: Db { rels: HashMap::new(), count: 0 }, topdown: td_rules, cfg };
    for s in 0..=max_stratum {
        let layer: Vec<&Rule> = rules.iter().filter(|r| stratum[&r.pred] == s).collect();
        let layer_preds: HashSet<&Pred> = layer.iter().map(|r| &r.pred).collect();
        let mut first = true;
        let mut grew: HashSet<Pred> = HashSet::new();
        loop {
            let mut new_facts: Vec<(Pred, Vec<Term>, Span)> = Vec::new();
            for r in &layer {
                let mut ds = Vec::new();
                body_preds(&r.body, false, &mut ds);
                let relevant = first || ds.iter().any(|(q, _)| grew.contains(q));
                if !relevant {
                    continue;
                }
                let mut env = Env::new(r.nvars);
                g.run(&r.body, &mut env, r.span, 0, &mut |e: &mut Env| {
                    let h = Grounder::ground_of(e, &r.head, r.span)?;
                    new_facts.push((r.pred.clone(), h.args().to_vec(), r.span));
                    Ok(())
                })?;
            }
            grew.clear();
            for (p, t, span) in new_facts {
                if g.add(&p, t, span)? {
                    grew.insert(p);
                }
            }
            first = false;
            if grew.iter().all(|p| !layer_preds.contains(p)) {
                break;
            }
        }
    }

    let mut out = Vec::new();
    let mut names: Vec<&Pred> = g.db.rels.keys().collect();
    names.sort();
    for p in names {
        let rel = &g.db.rels[p];
        for (t, span) in rel.tuples.iter().zip(&rel.spans) {
            out.push(Fact { atom: Term::app(&p.0, t.clone()), span: *span });
        }
    }
    Ok(out)
}

pub fn ground_program(clauses: &[Clause]) -> Result<Vec<Fact>, FrontendError> {
    ground_program_with(clauses, &GroundConfig::default())
}
