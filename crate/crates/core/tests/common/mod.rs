//! Random domains and brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use actplan::b::encoder::{encode_step, BOptions};
use actplan::b::{all_states, BDomain, BDyn, BExec, BLit, BStatic};
use actplan::fd::{Arith, Constraint, Domain, Linear, Lit, RelOp, VarId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rand_lit<R: Rng>(rng: &mut R, nf: usize) -> BLit {
    BLit::new(rng.gen_range(0..nf), rng.gen_bool(0.5))
}

pub fn rand_lits<R: Rng>(rng: &mut R, nf: usize, max: usize) -> Vec<BLit> {
    let k = rng.gen_range(0..=max);
    let mut v: Vec<BLit> = Vec::new();
    for _ in 0..k {
        let l = rand_lit(rng, nf);
        if !v.iter().any(|x| x.f == l.f) {
            v.push(l);
        }
    }
    v
}

/// A random B domain with at most `max_f` fluents, `max_a` actions and
/// `max_s` static laws. Static laws favour positive literals so that
/// cyclic dependencies are common.
pub fn random_b_domain<R: Rng>(rng: &mut R, max_f: usize, max_a: usize, max_s: usize) -> BDomain {
    let nf = rng.gen_range(1..=max_f);
    let na = rng.gen_range(1..=max_a);
    let mut dynamic = Vec::new();
    for _ in 0..rng.gen_range(0..=2 * na + 1) {
        dynamic.push(BDyn { action: rng.gen_range(0..na), effect: rand_lit(rng, nf), pre: rand_lits(rng, nf, 2) });
    }
    let mut statics = Vec::new();
    for _ in 0..rng.gen_range(0..=max_s) {
        let head = if rng.gen_bool(0.7) { BLit::new(rng.gen_range(0..nf), true) } else { rand_lit(rng, nf) };
        let mut body = rand_lits(rng, nf, 2);
        if rng.gen_bool(0.6) {
            body.iter_mut().for_each(|l| l.pos = true);
        }
        statics.push(BStatic { body, head });
    }
    let mut exec = Vec::new();
    for a in 0..na {
        for _ in 0..rng.gen_range(1..=2) {
            exec.push(BExec { action: a, cond: rand_lits(rng, nf, 1) });
        }
    }
    let mut nonexec = Vec::new();
    if rng.gen_bool(0.2) {
        nonexec.push(BExec { action: rng.gen_range(0..na), cond: rand_lits(rng, nf, 1) });
    }
    BDomain {
        fluent_names: (0..nf).map(|i| format!("f{i}")).collect(),
        action_names: (0..na).map(|i| format!("a{i}")).collect(),
        n_fluents: nf,
        n_actions: na,
        dynamic,
        statics,
        exec,
        nonexec,
        initially: vec![],
        goal: vec![],
    }
}

pub type BTriple = (Vec<bool>, usize, Vec<bool>);

/// Transitions of the reference semantics from closed states.
pub fn oracle_transitions(d: &BDomain) -> BTreeSet<BTriple> {
    let mut out = BTreeSet::new();
    for u in all_states(d.n_fluents).filter(|u| d.is_closed(u)) {
        for a in 0..d.n_actions {
            for v in d.successors(&u, a, 16).unwrap() {
                out.insert((u.clone(), a, v));
            }
        }
    }
    out
}

/// Solutions of the one-step encoding, projected to (u, a, v), from closed u.
pub fn encoder_transitions(d: &BDomain, opts: &BOptions) -> BTreeSet<BTriple> {
    let mut enc = encode_step(d, opts);
    let order: Vec<_> = enc.fluents[0].iter().chain(&enc.actions[0]).chain(&enc.fluents[1]).copied().collect();
    let sols = enc.model.solver.all_solutions(&order);
    let mut out = BTreeSet::new();
    for s in sols {
        let u: Vec<bool> = enc.fluents[0].iter().map(|x| s[x.idx()] == 1).collect();
        if !d.is_closed(&u) {
            continue;
        }
        let a = enc.actions[0].iter().position(|x| s[x.idx()] == 1).unwrap();
        let v: Vec<bool> = enc.fluents[1].iter().map(|x| s[x.idx()] == 1).collect();
        assert!(out.insert((u, a, v)), "duplicate projected solution");
    }
    out
}

pub fn lit_value(s: &[i64], l: Lit) -> bool {
    l.eval(s[l.var.idx()])
}

fn mv_term<R: Rng>(rng: &mut R, nf: usize, past: bool) -> String {
    let f = |rng: &mut R| {
        let i = rng.gen_range(0..nf);
        if past && rng.gen_bool(0.3) {
            format!("f{i}^(-1)")
        } else {
            format!("f{i}")
        }
    };
    match rng.gen_range(0..5) {
        0 => rng.gen_range(0..4).to_string(),
        1 => format!("{}+1", f(rng)),
        2 => format!("{}-{}", f(rng), f(rng)),
        _ => f(rng),
    }
}

/// A random primitive constraint `fI op term`.
pub fn mv_prim<R: Rng>(rng: &mut R, nf: usize, past: bool) -> String {
    const OPS: [&str; 6] = ["eq", "neq", "lt", "leq", "gt", "geq"];
    let op = OPS[rng.gen_range(0..OPS.len())];
    format!("f{} {op} {}", rng.gen_range(0..nf), mv_term(rng, nf, past))
}

fn mv_list<R: Rng>(rng: &mut R, nf: usize, max: usize) -> String {
    let k = rng.gen_range(0..=max);
    let items: Vec<String> = (0..k).map(|_| mv_prim(rng, nf, false)).collect();
    format!("[{}]", items.join(", "))
}

/// Program text of a random B^MV domain with at most `max_f` fluents over
/// domains of at most four values, `max_a` actions and `max_s` static laws.
/// Effects may refer to the previous state.
pub fn random_mv_text<R: Rng>(rng: &mut R, max_f: usize, max_a: usize, max_s: usize) -> String {
    let nf = rng.gen_range(1..=max_f);
    let na = rng.gen_range(1..=max_a);
    let mut s = String::new();
    for i in 0..nf {
        s += &format!("fluent(f{i},0,{}).\n", rng.gen_range(1..=3));
    }
    for a in 0..na {
        s += &format!("action(a{a}).\n");
        for _ in 0..rng.gen_range(1..=2) {
            s += &format!("executable(a{a}, {}).\n", mv_list(rng, nf, 1));
        }
    }
    for _ in 0..rng.gen_range(0..=2 * na + 1) {
        let a = rng.gen_range(0..na);
        s += &format!("causes(a{a}, {}, {}).\n", mv_prim(rng, nf, true), mv_list(rng, nf, 1));
    }
    for _ in 0..rng.gen_range(0..=max_s) {
        s += &format!("caused({}, {}).\n", mv_list(rng, nf, 1), mv_prim(rng, nf, false));
    }
    if rng.gen_bool(0.2) {
        s += &format!("nonexecutable(a{}, {}).\n", rng.gen_range(0..na), mv_list(rng, nf, 1));
    }
    s
}

/// All complete states over the fluent domains.
pub fn all_mv_states(d: &actplan::frontend::DomainDescription) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for f in &d.fluents {
        out = out.into_iter().flat_map(|p: Vec<i64>| f.dom.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

pub type MvTriple = (Vec<i64>, usize, Vec<i64>);

/// Transitions of the reference semantics from closed states.
pub fn mv_oracle_transitions(d: &actplan::frontend::DomainDescription) -> BTreeSet<MvTriple> {
    use actplan::bmv::{complete, oracle};
    let mut out = BTreeSet::new();
    for u in all_mv_states(d) {
        let cu = complete(&u);
        if !oracle::is_closed_seq(d, std::slice::from_ref(&cu)) {
            continue;
        }
        for a in 0..d.actions.len() {
            for w in oracle::successors(d, &cu, a, 1 << 16).unwrap() {
                out.insert((u.clone(), a, w.iter().map(|x| x.unwrap()).collect()));
            }
        }
    }
    out
}

/// Transitions of the step encoding from closed states.
pub fn mv_encoder_transitions(
    d: &actplan::frontend::DomainDescription,
    opts: &actplan::bmv::encoder::MvOptions,
) -> BTreeSet<MvTriple> {
    use actplan::bmv::{complete, encoder, oracle};
    let mut out = BTreeSet::new();
    for u in all_mv_states(d) {
        if !oracle::is_closed_seq(d, &[complete(&u)]) {
            continue;
        }
        for a in 0..d.actions.len() {
            for w in encoder::transition_solutions(d, &u, a, opts) {
                out.insert((u.clone(), a, w));
            }
        }
    }
    out
}

/// Every trajectory of length `n` under the reference semantics, by
/// enumerating initial states and extensions.
pub fn mv_oracle_trajectories(
    d: &actplan::frontend::DomainDescription,
    n: usize,
) -> Vec<actplan::traj::Trajectory> {
    use actplan::bmv::oracle::{extensions, initial_states, verify_trajectory};
    use actplan::bmv::MvState;
    use actplan::traj::Trajectory;
    fn go(
        d: &actplan::frontend::DomainDescription,
        n: usize,
        states: &mut Vec<MvState>,
        acts: &mut Vec<usize>,
        out: &mut Vec<Trajectory>,
    ) {
        if acts.len() == n {
            let t = Trajectory {
                states: states.iter().map(|s| s.iter().map(|x| x.unwrap()).collect()).collect(),
                actions: acts.clone(),
            };
            if verify_trajectory(d, &t).is_ok() {
                out.push(t);
            }
            return;
        }
        for a in 0..d.actions.len() {
            for w in extensions(d, states, acts, a, n, 1 << 20).unwrap() {
                states.push(w);
                acts.push(a);
                go(d, n, states, acts, out);
                states.pop();
                acts.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s0 in initial_states(d, 1 << 20).unwrap() {
        go(d, n, &mut vec![s0], &mut Vec::new(), &mut out);
    }
    out
}

/// A random CSP over at most six variables with at most 10^5 tuples.
pub fn random_csp(rng: &mut ChaCha8Rng) -> (Vec<Domain>, Vec<Constraint>) {
    let n = rng.gen_range(2..=6);
    let mut doms = Vec::new();
    let mut total: u64 = 1;
    for _ in 0..n {
        let d = loop {
            let lo = rng.gen_range(-5..=3);
            let hi = lo + rng.gen_range(0..=6);
            let vals: Vec<i64> = (lo..=hi).filter(|_| rng.gen_bool(0.8)).collect();
            if !vals.is_empty() {
                break Domain::from_values(vals);
            }
        };
        if total * d.size() > 100_000 {
            doms.push(Domain::boolean());
            total *= 2;
        } else {
            total *= d.size();
            doms.push(d);
        }
    }
    let var = |rng: &mut ChaCha8Rng| VarId(rng.gen_range(0..n) as u32);
    let op = |rng: &mut ChaCha8Rng| {
        [RelOp::Eq, RelOp::Ne, RelOp::Le, RelOp::Lt, RelOp::Ge, RelOp::Gt][rng.gen_range(0..6)]
    };
    let bools: Vec<VarId> = (0..n)
        .filter(|&i| doms[i].min() >= 0 && doms[i].max() <= 1)
        .map(|i| VarId(i as u32))
        .collect();
    let lit = |rng: &mut ChaCha8Rng| -> Option<Lit> {
        if bools.is_empty() {
            None
        } else {
            Some(Lit { var: bools[rng.gen_range(0..bools.len())], pos: rng.gen_bool(0.5) })
        }
    };
    let linear = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..=3);
        let terms = (0..k).map(|_| (rng.gen_range(-3i64..=3), var(rng))).collect();
        Linear::new(terms, op(rng), rng.gen_range(-6..=6))
    };
    let m = rng.gen_range(1..=5);
    let mut cons = Vec::new();
    for _ in 0..m {
        let c = match rng.gen_range(0..8) {
            0 | 1 => Constraint::Linear(linear(rng)),
            2 => {
                let op = [Arith::Times, Arith::Div, Arith::Mod][rng.gen_range(0..3)];
                Constraint::Arith { op, x: var(rng), y: var(rng), z: var(rng) }
            }
            3 => Constraint::Abs { x: var(rng), z: var(rng) },
            4 => match lit(rng) {
                Some(_) => Constraint::Clause((0..rng.gen_range(1..=3)).filter_map(|_| lit(rng)).collect()),
                None => Constraint::Linear(linear(rng)),
            },
            5 => match lit(rng) {
                Some(b) => {
                    let lits = (0..rng.gen_range(0..=3)).filter_map(|_| lit(rng)).collect();
                    if rng.gen_bool(0.5) {
                        Constraint::AndEq { b, lits }
                    } else {
                        Constraint::OrEq { b, lits }
                    }
                }
                None => Constraint::Linear(linear(rng)),
            },
            6 => match lit(rng) {
                Some(b) => Constraint::Reif { b, lin: linear(rng) },
                None => Constraint::Linear(linear(rng)),
            },
            _ => match lit(rng) {
                Some(b) => Constraint::Implies { b, lin: linear(rng) },
                None => Constraint::Linear(linear(rng)),
            },
        };
        cons.push(c);
    }
    (doms, cons)
}

pub fn brute_force(doms: &[Domain], cons: &[Constraint]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; doms.len()];
    fn rec(i: usize, doms: &[Domain], cons: &[Constraint], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == doms.len() {
            let f = |v: VarId| cur[v.idx()];
            if cons.iter().all(|c| c.holds(&f)) {
                out.push(cur.clone());
            }
            return;
        }
        for v in doms[i].iter() {
            cur[i] = v;
            rec(i + 1, doms, cons, cur, out);
        }
    }
    rec(0, doms, cons, &mut cur, &mut out);
    out
}
