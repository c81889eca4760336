//! Plan search for B^MV descriptions.
//!
//! In `Full` mode every step whose surrounding layers, action and touched
//! flags are fixed is checked for minimal closure with a small constraint
//! query; answers are cached. Every candidate plan is also checked against
//! the reference semantics, so `Off` and `Cluster` never return a wrong
//! plan, though they may miss some.

use super::encoder::{encode_problem, is_minimal, MvOptions};
use super::{markov_statics, MvState};
use crate::fd::{Lit, NoCheck, NodeCheck, Solver, VarId};
use crate::frontend::{Cons, DomainDescription, Expr};
use crate::planner::{run, Layering, Minimality, PlanError, PlanOptions, PlanReport, Prepared};
use crate::traj::Trajectory;
use std::collections::HashMap;

/// Rejects nodes whose fixed steps are not minimally closed.
struct FormCheck<'a> {
    d: &'a DomainDescription,
    fluents: Vec<Vec<VarId>>,
    touched: Vec<Vec<Lit>>,
    /// Static laws only look at the current layer.
    markov: bool,
    cache: HashMap<Vec<i64>, bool>,
}

impl FormCheck<'_> {
    fn layer(&self, s: &Solver, i: usize) -> Option<Vec<i64>> {
        self.fluents[i].iter().map(|&v| s.value(v)).collect()
    }
}

impl NodeCheck for FormCheck<'_> {
    fn check(&mut self, s: &Solver) -> bool {
        for i in 1..self.fluents.len() {
            let (Some(u), Some(w)) = (self.layer(s, i - 1), self.layer(s, i)) else { continue };
            let Some(t) = self.touched[i].iter().map(|l| s.value(l.var).map(|x| l.eval(x))).collect::<Option<Vec<bool>>>()
            else {
                continue;
            };
            let prefix: Vec<Vec<i64>> = if self.markov {
                vec![u]
            } else {
                match (0..i).map(|k| self.layer(s, k)).collect::<Option<Vec<_>>>() {
                    Some(p) => p,
                    None => continue,
                }
            };
            let mut key: Vec<i64> = prefix.iter().flatten().copied().collect();
            key.extend(&w);
            key.extend(t.iter().map(|&b| b as i64));
            let ok = match self.cache.get(&key) {
                Some(&ok) => ok,
                None => {
                    let pre: Vec<MvState> = prefix.iter().map(|p| super::complete(p)).collect();
                    let ok = is_minimal(self.d, &pre, &w, &t);
                    self.cache.insert(key, ok);
                    ok
                }
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Largest backward and forward annotation distance, and whether `f@t` occurs.
fn reach(cs: &[&Cons]) -> (i64, i64, bool) {
    let (mut back, mut fwd, mut at) = (0, 0, false);
    for c in cs {
        c.visit_leaves(&mut |e| match e {
            Expr::Fluent(_, k) => {
                back = back.max(-k);
                fwd = fwd.max(*k);
            }
            Expr::At(..) => at = true,
            _ => {}
        });
    }
    (back, fwd, at)
}

/// Number of consecutive layers that determine all future constraints, or
/// `None` when some constraint looks ahead or uses absolute times or costs.
fn lookback(d: &DomainDescription) -> Option<usize> {
    if !d.time_constraints.is_empty() || d.has_cost_info() {
        return None;
    }
    let pres: Vec<&Cons> =
        d.dynamic.iter().map(|l| &l.pre).chain(d.exec.iter().chain(&d.nonexec).map(|l| &l.cond)).collect();
    let effects: Vec<&Cons> = d.dynamic.iter().map(|l| &l.effect).collect();
    let states: Vec<&Cons> = d
        .statics
        .iter()
        .flat_map(|l| [&l.cond, &l.head])
        .chain(&d.always)
        .chain(&d.goal)
        .chain(d.holds.iter().map(|h| &h.0))
        .chain(&d.initially)
        .collect();
    let (bp, fp, ap) = reach(&pres);
    let (be, fe, ae) = reach(&effects);
    let (bs, fs, as_) = reach(&states);
    if ap || ae || as_ || fp > 0 || fe > 0 || fs > 0 {
        return None;
    }
    Some((bp + 1).max(be).max(bs + 1).max(1) as usize)
}

fn prepare<'a>(d: &'a DomainDescription, n: usize, opts: &PlanOptions) -> Prepared<'a> {
    let mv = MvOptions { minimality: opts.minimality, minimize: opts.minimize, no_loop: opts.no_loop, dump: opts.dump };
    let enc = encode_problem(d, n, &mv);
    let fluents = enc.fluents.clone();
    let actions = enc.actions.clone();
    let blocks: Vec<Vec<VarId>> = (0..n)
        .map(|j| actions[j].iter().chain(&enc.changes[j + 1]).chain(&fluents[j + 1]).copied().collect())
        .collect();
    let mut order: Vec<VarId> = fluents[0].clone();
    order.extend(blocks.iter().flatten());
    // The minimality check of a step reads the whole prefix unless static
    // laws are confined to one layer, which would defeat memoization.
    let form = opts.minimality == Minimality::Full && !d.statics.is_empty();
    let layering = if enc.objective.is_none() && n > 0 && !opts.no_loop && !(form && !markov_statics(d)) {
        lookback(d).map(|lb| Layering { blocks: blocks.clone(), states: fluents.clone(), lookback: lb })
    } else {
        None
    };
    let check: Box<dyn NodeCheck + 'a> = if form {
        Box::new(FormCheck {
            d,
            fluents: fluents.clone(),
            touched: enc.touched.clone(),
            markov: markov_statics(d),
            cache: HashMap::new(),
        })
    } else {
        Box::new(NoCheck)
    };
    // Layer 0 is labeled as its own leading block.
    let layering = layering.map(|mut l| {
        l.blocks[0] = fluents[0].iter().chain(&l.blocks[0]).copied().collect();
        l
    });
    Prepared {
        model: enc.model,
        order,
        actions: actions.clone(),
        objective: enc.objective,
        extract: Box::new(move |sol: &[i64]| Trajectory {
            states: fluents.iter().map(|l| l.iter().map(|v| sol[v.idx()]).collect()).collect(),
            actions: actions.iter().map(|l| l.iter().position(|v| sol[v.idx()] == 1).unwrap()).collect(),
        }),
        verify: Box::new(move |t: &Trajectory| super::oracle::verify_trajectory(d, t)),
        check,
        layering,
    }
}

/// Searches for a plan of exactly `n` actions; with an objective, for an
/// optimal one.
pub fn plan(d: &DomainDescription, n: usize, opts: &PlanOptions) -> Result<PlanReport, PlanError> {
    Ok(run(prepare(d, n, opts), n, opts))
}
