//! Reference semantics for B^MV, written for clarity rather than speed.
//!
//! A trajectory is valid when
//! - every state is closed under the static laws and values lie in their domains;
//! - `initially`, `holds`, `always`, `time_constraint`, `goal` and
//!   `cost_constraint` assertions are satisfied;
//! - each action is executable at its source time;
//! - every law fired at step `j` has its effect satisfied at time `j+1`;
//! - each state is minimally closed with respect to its predecessor and the
//!   fluents not touched by a fired effect.
//!
//! Effects are checked on the completed trajectory, which is equivalent to
//! requiring an i-solution at every step: the actual future values witness
//! the existential, and at the last step a constraint mentions, all its
//! references are fixed. [`i_solutions`] and [`eff_seq`] expose the
//! step-wise formulation directly.
//!
//! A fired effect touches the layer its reference lands on, clamped to the
//! horizon. Constraints are evaluated at a time point; `f^k` reads the layer
//! `t+k` clamped to the sequence, `f@t` reads layer `t`.

use super::{MvError, MvState};
use crate::frontend::{ActionId, Cons, CostAtom, DomainDescription, Expr, FluentId, Val, Valuation};
use crate::traj::Trajectory;
use std::collections::BTreeMap;

/// Largest set of changed inertial fluents whose subsets are enumerated.
pub const MAX_MINIMALITY_FLUENTS: usize = 20;

/// Plan and state costs of a trajectory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Costs {
    pub plan: Val,
    pub states: Vec<Val>,
}

impl Costs {
    fn state(&self, i: i64) -> Val {
        if i < 0 || i as usize >= self.states.len() {
            Val::Def(0)
        } else {
            self.states[i as usize]
        }
    }
}

/// A state sequence seen from time `time`. Layers past `states.len()`, and
/// undefined values at or after `certain`, read as [`Val::Escape`]: they
/// belong to states not yet determined, and constraints over them are
/// assumed satisfied.
#[derive(Clone, Copy)]
pub struct SeqView<'a> {
    pub states: &'a [MvState],
    /// Index of the last layer of the whole sequence.
    pub horizon: usize,
    pub certain: usize,
    pub time: i64,
    pub costs: Option<&'a Costs>,
}

impl<'a> SeqView<'a> {
    /// A fully determined sequence.
    pub fn full(states: &'a [MvState], time: usize) -> Self {
        SeqView { states, horizon: states.len() - 1, certain: states.len(), time: time as i64, costs: None }
    }

    pub fn at(mut self, time: usize) -> Self {
        self.time = time as i64;
        self
    }

    fn layer(&self, k: usize, f: FluentId) -> Val {
        match self.states.get(k).map(|s| s[f]) {
            Some(Some(x)) => Val::Def(x),
            Some(None) if k < self.certain => Val::Undef,
            _ => Val::Escape,
        }
    }
}

impl Valuation for SeqView<'_> {
    fn fluent(&self, f: FluentId, ann: i64) -> Val {
        let k = (self.time + ann).clamp(0, self.horizon as i64) as usize;
        self.layer(k, f)
    }

    fn timed(&self, f: FluentId, t: i64) -> Val {
        if t < 0 || t > self.horizon as i64 {
            return Val::Escape;
        }
        self.layer(t as usize, f)
    }

    fn cost(&self, c: CostAtom) -> Val {
        let Some(costs) = self.costs else { return Val::Undef };
        match c {
            CostAtom::Plan => costs.plan,
            CostAtom::Goal => costs.state(self.horizon as i64),
            CostAtom::State(i) => costs.state(i),
        }
    }
}

/// Value of an unannotated expression in a single state.
pub fn eval(v: &MvState, e: &Expr) -> Val {
    e.eval(&SeqView::full(std::slice::from_ref(v), 0))
}

pub fn satisfies(v: &MvState, c: &Cons) -> bool {
    c.holds(&SeqView::full(std::slice::from_ref(v), 0))
}

pub fn value_at(seq: &[MvState], i: usize, e: &Expr) -> Val {
    e.eval(&SeqView::full(seq, i))
}

pub fn satisfies_at(seq: &[MvState], i: usize, c: &Cons) -> bool {
    c.holds(&SeqView::full(seq, i))
}

/// `ine(σ, v)`: σ where defined, `v` elsewhere.
pub fn ine(sigma: &BTreeMap<FluentId, i64>, v: &MvState) -> MvState {
    let mut out = v.clone();
    for (&f, &x) in sigma {
        out[f] = Some(x);
    }
    out
}

/// `Δ(v1, v2, S)`: `v1` on `S`, `v2` elsewhere.
pub fn delta(v1: &MvState, v2: &MvState, s: &[FluentId]) -> MvState {
    let mut out = v2.clone();
    for &f in s {
        out[f] = v1[f];
    }
    out
}

/// Agreeing values are kept; a value defined on one side only wins.
pub fn union(v1: &MvState, v2: &MvState) -> MvState {
    v1.iter()
        .zip(v2)
        .map(|(&a, &b)| match (a, b) {
            (Some(x), Some(y)) if x == y => Some(x),
            (Some(x), None) => Some(x),
            (None, Some(y)) => Some(y),
            _ => None,
        })
        .collect()
}

pub fn intersection(v1: &MvState, v2: &MvState) -> MvState {
    v1.iter().zip(v2).map(|(&a, &b)| if a == b { a } else { None }).collect()
}

/// Replaces every `f^k` by `f^(k+t)`.
pub fn shift(c: &Cons, t: i64) -> Cons {
    fn ex(e: &Expr, t: i64) -> Expr {
        match e {
            Expr::Fluent(f, k) => Expr::Fluent(*f, k + t),
            Expr::Neg(x) => Expr::Neg(Box::new(ex(x, t))),
            Expr::Abs(x) => Expr::Abs(Box::new(ex(x, t))),
            Expr::Bin(op, l, r) => Expr::Bin(*op, Box::new(ex(l, t)), Box::new(ex(r, t))),
            Expr::Rei(c) => Expr::Rei(Box::new(shift(c, t))),
            other => other.clone(),
        }
    }
    match c {
        Cons::Prim(op, l, r) => Cons::Prim(*op, ex(l, t), ex(r, t)),
        Cons::Not(x) => Cons::Not(Box::new(shift(x, t))),
        Cons::And(cs) => Cons::And(cs.iter().map(|x| shift(x, t)).collect()),
        Cons::Or(cs) => Cons::Or(cs.iter().map(|x| shift(x, t)).collect()),
        other => other.clone(),
    }
}

fn product(doms: &[&Vec<i64>]) -> u128 {
    doms.iter().map(|d| d.len() as u128).product()
}

/// Calls `k` with every combination of values, odometer order.
fn for_each_combo(doms: &[&Vec<i64>], k: &mut dyn FnMut(&[i64])) {
    if doms.iter().any(|d| d.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; doms.len()];
    let mut vals: Vec<i64> = doms.iter().map(|d| d[0]).collect();
    loop {
        k(&vals);
        let mut p = 0;
        loop {
            if p == doms.len() {
                return;
            }
            idx[p] += 1;
            if idx[p] < doms[p].len() {
                vals[p] = doms[p][idx[p]];
                break;
            }
            idx[p] = 0;
            vals[p] = doms[p][0];
            p += 1;
        }
    }
}

/// Assignments to exactly the fluents of `c` that satisfy it, evaluating
/// every other fluent as undefined.
pub fn solutions(c: &Cons, doms: &[Vec<i64>], budget: u128) -> Result<Vec<BTreeMap<FluentId, i64>>, MvError> {
    let fl = c.fluents();
    let ds: Vec<&Vec<i64>> = fl.iter().map(|&f| &doms[f]).collect();
    let needed = product(&ds);
    if needed > budget {
        return Err(MvError::Budget { what: "solution enumeration", needed, limit: budget });
    }
    let mut out = Vec::new();
    let mut v: MvState = vec![None; doms.len()];
    for_each_combo(&ds, &mut |vals| {
        for (&f, &x) in fl.iter().zip(vals) {
            v[f] = Some(x);
        }
        if satisfies(&v, c) {
            out.push(fl.iter().copied().zip(vals.iter().copied()).collect());
        }
    });
    Ok(out)
}

/// i-solutions of `c` with respect to the complete prefix `v₀..vᵢ`: maps
/// from the non-negatively annotated fluents `(f, k)` of `c` to values such
/// that `c` holds at time `i+1` in the sequence extended by
/// `ine(σ|₀, vᵢ)` and by the partial future states `σ|ₖ`.
pub fn i_solutions(
    prefix: &[MvState],
    horizon: usize,
    c: &Cons,
    doms: &[Vec<i64>],
    budget: u128,
) -> Result<Vec<BTreeMap<(FluentId, i64), i64>>, MvError> {
    let i = prefix.len() - 1;
    let keys: Vec<(FluentId, i64)> = c.annotated_fluents().into_iter().filter(|&(_, k)| k >= 0).collect();
    let ds: Vec<&Vec<i64>> = keys.iter().map(|&(f, _)| &doms[f]).collect();
    let needed = product(&ds);
    if needed > budget {
        return Err(MvError::Budget { what: "i-solution enumeration", needed, limit: budget });
    }
    let n = doms.len();
    let mut out = Vec::new();
    for_each_combo(&ds, &mut |vals| {
        let mut seq: Vec<MvState> = prefix.to_vec();
        seq.resize(horizon + 1, vec![None; n]);
        seq[i + 1] = prefix[i].clone();
        let mut sigma = BTreeMap::new();
        for (&(f, k), &x) in keys.iter().zip(vals) {
            let layer = (i + 1 + k as usize).min(horizon);
            // Two references clamped onto one layer must agree.
            if let (true, Some(y)) = (layer > i + 1, seq[layer][f]) {
                if y != x {
                    return;
                }
            }
            seq[layer][f] = Some(x);
            sigma.insert((f, k), x);
        }
        let view = SeqView { states: &seq, horizon, certain: i + 2, time: i as i64 + 1, costs: None };
        if c.holds(&view) {
            out.push(sigma);
        }
    });
    Ok(out)
}

pub fn is_closed_at(d: &DomainDescription, view: &SeqView<'_>) -> bool {
    d.statics.iter().all(|law| !law.cond.holds(view) || law.head.holds(view))
}

/// Every layer of `seq` is closed under the static laws.
pub fn is_closed_seq(d: &DomainDescription, seq: &[MvState]) -> bool {
    (0..seq.len()).all(|i| is_closed_at(d, &SeqView::full(seq, i)))
}

/// `w` is minimally closed with respect to the complete prefix, the
/// inertial fluents `inertial` and the static laws: the extended sequence is
/// closed and no reversion of a non-empty set of changed inertial fluents to
/// their previous values is closed too.
pub fn is_minimally_closed(
    d: &DomainDescription,
    prefix: &[MvState],
    w: &MvState,
    inertial: &[bool],
) -> Result<bool, MvError> {
    let mut seq = prefix.to_vec();
    seq.push(w.clone());
    if !is_closed_seq(d, &seq) {
        return Ok(false);
    }
    let last = prefix.last().expect("non-empty prefix");
    let changed: Vec<FluentId> = (0..w.len()).filter(|&f| inertial[f] && last[f] != w[f]).collect();
    if changed.len() > MAX_MINIMALITY_FLUENTS {
        return Err(MvError::Budget {
            what: "minimal-closure check",
            needed: 1u128 << changed.len(),
            limit: 1 << MAX_MINIMALITY_FLUENTS,
        });
    }
    let k = seq.len() - 1;
    for mask in 1u32..(1u32 << changed.len()) {
        let s: Vec<FluentId> = (0..changed.len()).filter(|b| mask >> b & 1 == 1).map(|b| changed[b]).collect();
        seq[k] = delta(last, w, &s);
        if is_closed_seq(d, &seq) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn executable(d: &DomainDescription, view: &SeqView<'_>, a: ActionId) -> bool {
    d.exec.iter().any(|l| l.action == a && l.cond.holds(view))
        && !d.nonexec.iter().any(|l| l.action == a && l.cond.holds(view))
}

/// Dynamic laws of `a` whose precondition holds in `view`.
pub fn fired(d: &DomainDescription, view: &SeqView<'_>, a: ActionId) -> Vec<usize> {
    (0..d.dynamic.len()).filter(|&k| d.dynamic[k].action == a && d.dynamic[k].pre.holds(view)).collect()
}

/// Conjunction of the effects of the laws of `a` fired at time `i`,
/// relative to time `i+1`.
pub fn eff(d: &DomainDescription, seq: &[MvState], i: usize, a: ActionId) -> Cons {
    Cons::and(fired(d, &SeqView::full(seq, i), a).into_iter().map(|k| d.dynamic[k].effect.clone()).collect())
}

/// Effects of the actions so far together with the past states, as one
/// constraint relative to time `i+1` where `i = prefix.len() - 1`: the
/// effects fired at step `j` shifted by `j - i`, and `f^(j-i-1) = vⱼ(f)`
/// for every past state.
pub fn eff_seq(d: &DomainDescription, prefix: &[MvState], actions: &[ActionId]) -> Cons {
    let i = prefix.len() - 1;
    let mut parts = Vec::new();
    for (j, &a) in actions.iter().enumerate().take(i + 1) {
        parts.push(shift(&eff(d, prefix, j, a), j as i64 - i as i64));
    }
    for (j, st) in prefix.iter().enumerate() {
        for (f, v) in st.iter().enumerate() {
            if let Some(x) = v {
                parts.push(Cons::eq(Expr::Fluent(f, j as i64 - i as i64 - 1), Expr::Const(*x)));
            }
        }
    }
    Cons::and(parts)
}

/// Layer an effect reference `f^k` fired at step `j` lands on.
pub fn landing(j: usize, k: i64, horizon: usize) -> Option<usize> {
    let l = j as i64 + 1 + k;
    (k >= 0).then(|| (l as usize).min(horizon))
}

/// Fluents touched at layer `i+1` by laws fired at steps `0..=i`.
fn touched(d: &DomainDescription, seq: &[MvState], actions: &[ActionId], i: usize, horizon: usize) -> Vec<bool> {
    let mut t = vec![false; d.fluents.len()];
    for (j, &a) in actions.iter().enumerate().take(i + 1) {
        let view = SeqView { states: seq, horizon, certain: seq.len(), time: j as i64, costs: None };
        for k in fired(d, &view, a) {
            for (f, ann) in d.dynamic[k].effect.annotated_fluents() {
                if landing(j, ann, horizon) == Some(i + 1) {
                    t[f] = true;
                }
            }
        }
    }
    t
}

/// States satisfying `initially` and `holds(_, 0)`, closed under the
/// static laws, in lexicographic order.
pub fn initial_states(d: &DomainDescription, budget: u128) -> Result<Vec<MvState>, MvError> {
    let ds: Vec<&Vec<i64>> = d.fluents.iter().map(|f| &f.dom).collect();
    let needed = product(&ds);
    if needed > budget {
        return Err(MvError::Budget { what: "initial-state enumeration", needed, limit: budget });
    }
    let mut out = Vec::new();
    for_each_combo(&ds, &mut |vals| {
        let v = super::complete(vals);
        let s = std::slice::from_ref(&v);
        let view = SeqView::full(s, 0);
        let ok = d.initially.iter().all(|c| c.holds(&view))
            && d.holds.iter().all(|(c, n)| *n != 0 || c.holds(&view))
            && is_closed_at(d, &view);
        if ok {
            out.push(v);
        }
    });
    Ok(out)
}

/// Every complete state `v` such that `prefix, v` can continue a valid
/// trajectory of length `horizon` after executing `a` at the last prefix
/// state, given the earlier `actions` (one per prefix step). Constraints
/// reaching beyond the new state are treated as satisfiable.
pub fn extensions(
    d: &DomainDescription,
    prefix: &[MvState],
    actions: &[ActionId],
    a: ActionId,
    horizon: usize,
    budget: u128,
) -> Result<Vec<MvState>, MvError> {
    let i = prefix.len() - 1;
    debug_assert_eq!(actions.len(), i);
    let src = SeqView { states: prefix, horizon, certain: prefix.len(), time: i as i64, costs: None };
    if !executable(d, &src, a) {
        return Ok(Vec::new());
    }
    let mut acts = actions.to_vec();
    acts.push(a);
    let t = touched(d, prefix, &acts, i, horizon);
    let in_static = super::static_fluents(d);
    // An untouched fluent outside every static law can always be reverted
    // without breaking closure, so minimality keeps it inert.
    let free: Vec<FluentId> = (0..d.fluents.len()).filter(|&f| t[f] || in_static[f]).collect();
    let ds: Vec<&Vec<i64>> = free.iter().map(|&f| &d.fluents[f].dom).collect();
    let needed = product(&ds);
    if needed > budget {
        return Err(MvError::Budget { what: "successor enumeration", needed, limit: budget });
    }
    let inertial: Vec<bool> = t.iter().map(|x| !x).collect();
    let mut fired_at: Vec<(usize, usize)> = Vec::new();
    for (j, &b) in acts.iter().enumerate() {
        let view = SeqView { states: prefix, horizon, certain: prefix.len(), time: j as i64, costs: None };
        fired_at.extend(fired(d, &view, b).into_iter().map(|k| (j, k)));
    }
    let mut out = Vec::new();
    let mut err = None;
    let mut seq = prefix.to_vec();
    seq.push(prefix[i].clone());
    for_each_combo(&ds, &mut |vals| {
        if err.is_some() {
            return;
        }
        for (&f, &x) in free.iter().zip(vals) {
            seq[i + 1][f] = Some(x);
        }
        let effects_ok = fired_at.iter().all(|&(j, k)| {
            let view = SeqView { states: &seq, horizon, certain: seq.len(), time: j as i64 + 1, costs: None };
            d.dynamic[k].effect.holds(&view)
        });
        if !effects_ok {
            return;
        }
        match is_minimally_closed(d, prefix, &seq[i + 1], &inertial) {
            Ok(true) => out.push(seq[i + 1].clone()),
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// One-step successors of a complete state.
pub fn successors(d: &DomainDescription, u: &MvState, a: ActionId, budget: u128) -> Result<Vec<MvState>, MvError> {
    extensions(d, std::slice::from_ref(u), &[], a, 1, budget)
}

/// Whether `⟨u, a, w⟩` is a valid transition on its own.
pub fn valid_transition(d: &DomainDescription, u: &MvState, a: ActionId, w: &MvState) -> Result<(), String> {
    let t = Trajectory {
        states: vec![
            u.iter().map(|x| x.unwrap_or(i64::MIN)).collect(),
            w.iter().map(|x| x.unwrap_or(i64::MIN)).collect(),
        ],
        actions: vec![a],
    };
    let seq = vec![u.clone(), w.clone()];
    check_steps(d, &t, &seq)
}

/// Plan cost (sum of action costs at their source states) and the cost of
/// each state (default 1 when no state cost is declared).
pub fn costs(d: &DomainDescription, t: &Trajectory) -> Costs {
    let seq: Vec<MvState> = t.states.iter().map(|s| super::complete(s)).collect();
    let mut plan = Val::Def(0);
    for (j, &a) in t.actions.iter().enumerate() {
        let c = d.action_cost(a).eval(&SeqView::full(&seq, j));
        plan = match (plan, c) {
            (Val::Def(x), Val::Def(y)) => x.checked_add(y).map(Val::Def).unwrap_or(Val::Undef),
            (Val::Escape, _) | (_, Val::Escape) => Val::Escape,
            _ => Val::Undef,
        };
    }
    let sc = d.state_cost.clone().unwrap_or(Expr::Const(1));
    let states = (0..seq.len()).map(|i| sc.eval(&SeqView::full(&seq, i))).collect();
    Costs { plan, states }
}

/// Value of `minimize_cost`'s expression for a trajectory.
pub fn objective(d: &DomainDescription, t: &Trajectory, e: &Expr) -> Val {
    let seq: Vec<MvState> = t.states.iter().map(|s| super::complete(s)).collect();
    let c = costs(d, t);
    let view = SeqView { costs: Some(&c), ..SeqView::full(&seq, t.len()) };
    e.eval(&view)
}

/// Per-assertion outcome for the global constraints of the problem:
/// initially, holds, always, time and cost constraints, and goal.
pub fn check_assertions(d: &DomainDescription, t: &Trajectory) -> Vec<(String, bool)> {
    let names = d.fluent_names();
    let seq: Vec<MvState> = t.states.iter().map(|s| super::complete(s)).collect();
    let n = t.len();
    let c = costs(d, t);
    let at = |i: usize| SeqView { costs: Some(&c), ..SeqView::full(&seq, i) };
    let mut out = Vec::new();
    for x in &d.initially {
        out.push((format!("initially({})", x.to_term(&names)), x.holds(&at(0))));
    }
    for (x, i) in &d.holds {
        // A time outside the trajectory asserts nothing.
        let ok = *i < 0 || *i as usize > n || x.holds(&at(*i as usize));
        out.push((format!("holds({}, {i})", x.to_term(&names)), ok));
    }
    for x in &d.always {
        out.push((format!("always({})", x.to_term(&names)), (0..=n).all(|i| x.holds(&at(i)))));
    }
    for x in &d.time_constraints {
        out.push((format!("time_constraint({})", x.to_term(&names)), x.holds(&at(0))));
    }
    for x in &d.cost_constraints {
        out.push((format!("cost_constraint({})", x.to_term(&names)), x.holds(&at(n))));
    }
    for x in &d.goal {
        out.push((format!("goal({})", x.to_term(&names)), x.holds(&at(n))));
    }
    out
}

fn check_steps(d: &DomainDescription, t: &Trajectory, seq: &[MvState]) -> Result<(), String> {
    let n = t.len();
    for i in 0..n {
        let a = t.actions[i];
        if a >= d.actions.len() {
            return Err(format!("step {}: unknown action {a}", i + 1));
        }
        if !executable(d, &SeqView::full(seq, i), a) {
            return Err(format!("step {}: {} is not executable", i + 1, d.action_name(a)));
        }
        for k in fired(d, &SeqView::full(seq, i), a) {
            if !d.dynamic[k].effect.holds(&SeqView::full(seq, i + 1)) {
                return Err(format!(
                    "step {}: effect {} of {} violated",
                    i + 1,
                    d.dynamic[k].effect.to_term(&d.fluent_names()),
                    d.action_name(a)
                ));
            }
        }
    }
    for i in 0..n {
        let tch = touched(d, seq, &t.actions, i, n);
        let inertial: Vec<bool> = tch.iter().map(|x| !x).collect();
        let ok = is_minimally_closed(d, &seq[..=i], &seq[i + 1], &inertial).map_err(|e| e.to_string())?;
        if !ok {
            return Err(format!("step {}: state {} is not minimally closed", i + 1, i + 1));
        }
    }
    Ok(())
}

/// Checks a trajectory; the error names the first violated condition.
pub fn verify_trajectory(d: &DomainDescription, t: &Trajectory) -> Result<(), String> {
    let nf = d.fluents.len();
    if t.states.len() != t.actions.len() + 1 {
        return Err("trajectory needs one more state than actions".into());
    }
    for (i, s) in t.states.iter().enumerate() {
        if s.len() != nf {
            return Err(format!("state {i}: expected {nf} values, found {}", s.len()));
        }
        for (f, v) in s.iter().enumerate() {
            if d.fluents[f].dom.binary_search(v).is_err() {
                return Err(format!("state {i}: {}={v} is outside its domain", d.fluent_name(f)));
            }
        }
    }
    let seq: Vec<MvState> = t.states.iter().map(|s| super::complete(s)).collect();
    for i in 0..seq.len() {
        if !is_closed_at(d, &SeqView::full(&seq, i)) {
            return Err(format!("state {i}: static laws violated"));
        }
    }
    let assertions = check_assertions(d, t);
    let (initial, rest): (Vec<_>, Vec<_>) = assertions.into_iter().partition(|x| x.0.starts_with("initially"));
    for (what, ok) in initial {
        if !ok {
            return Err(format!("{what} violated"));
        }
    }
    check_steps(d, t, &seq)?;
    for (what, ok) in rest {
        if !ok {
            return Err(format!("{what} violated"));
        }
    }
    Ok(())
}
