//! Constraint encoding of B transitions and plans.
//!
//! One 0/1 variable per fluent and layer; the complementary literal is its
//! negation, so completeness and consistency of every layer are structural.
//! Static laws with cyclic positive dependencies additionally need loop
//! formulae, encoded in factored form: for a loop `L`, if no literal of `L`
//! has support from outside `L` then every literal of `L` is false.

use super::{BDomain, BError, BLit};
use crate::fd::{Constraint, Linear, Lit, RelOp, VarId};
use crate::model::Model;
use std::collections::HashSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopMode {
    On,
    Off,
    /// Loop formulae only when the dependency graph is cyclic.
    Auto,
}

#[derive(Clone, Debug)]
pub struct BOptions {
    pub loops: LoopMode,
    /// Most loops enumerated before giving up.
    pub max_loops: usize,
    /// Most candidate literal sets examined during loop enumeration.
    pub max_loop_candidates: usize,
    pub dump: bool,
}

impl Default for BOptions {
    fn default() -> Self {
        BOptions { loops: LoopMode::Auto, max_loops: 10_000, max_loop_candidates: 1_000_000, dump: false }
    }
}

/// Loops of a dependency graph, or an overflow marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loops {
    /// Literal index sets, each sorted.
    Complete(Vec<Vec<usize>>),
    /// The enumeration cap was hit; the sets found so far.
    Overflow(Vec<Vec<usize>>),
}

impl Loops {
    pub fn sets(&self) -> &[Vec<usize>] {
        match self {
            Loops::Complete(v) | Loops::Overflow(v) => v,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Loops::Complete(_))
    }
}

/// Strongly connected components (iterative Tarjan), each sorted.
pub fn sccs(g: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < g[v].len() {
                let w = g[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on[w] = true;
                    work.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(p, _)) = work.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut c = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on[w] = false;
                        c.push(w);
                        if w == v {
                            break;
                        }
                    }
                    c.sort();
                    out.push(c);
                }
            }
        }
    }
    out
}

fn strongly_connected(g: &[Vec<usize>], set: &[usize]) -> bool {
    let inside: HashSet<usize> = set.iter().copied().collect();
    let reach = |rev: bool| {
        let mut seen = HashSet::from([set[0]]);
        let mut todo = vec![set[0]];
        while let Some(v) = todo.pop() {
            for &w in set {
                let edge = if rev { g[w].contains(&v) } else { g[v].contains(&w) };
                if edge && inside.contains(&w) && seen.insert(w) {
                    todo.push(w);
                }
            }
        }
        seen.len() == set.len()
    };
    reach(false) && reach(true)
}

/// All non-empty literal sets inducing a strongly connected subgraph that
/// contains at least one edge (self-loops included). Unions of overlapping
/// cycles count, not only single cycles.
pub fn find_loops(g: &[Vec<usize>], max_loops: usize, max_candidates: usize) -> Loops {
    let mut found = Vec::new();
    let mut budget = max_candidates;
    for comp in sccs(g) {
        if comp.len() == 1 {
            let v = comp[0];
            if g[v].contains(&v) {
                found.push(vec![v]);
            }
            continue;
        }
        // Undirected adjacency restricted to the component.
        let inside: HashSet<usize> = comp.iter().copied().collect();
        let mut adj: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for &v in &comp {
            for &w in &g[v] {
                if w != v && inside.contains(&w) {
                    adj.entry(v).or_default().push(w);
                    adj.entry(w).or_default().push(v);
                }
            }
        }
        for list in adj.values_mut() {
            list.sort();
            list.dedup();
        }
        // Enumerate connected subsets whose least element is `root`.
        for (ri, &root) in comp.iter().enumerate() {
            let banned: HashSet<usize> = comp[..ri].iter().copied().collect();
            let ext: Vec<usize> = adj[&root].iter().copied().filter(|w| !banned.contains(w)).collect();
            let mut ok = true;
            grow(
                &mut vec![root],
                ext,
                banned,
                &adj,
                &mut |set: &[usize]| {
                    if budget == 0 {
                        ok = false;
                        return false;
                    }
                    budget -= 1;
                    let self_loop = set.len() == 1 && g[set[0]].contains(&set[0]);
                    if (set.len() > 1 && strongly_connected(g, set)) || self_loop {
                        let mut s = set.to_vec();
                        s.sort();
                        found.push(s);
                        if found.len() > max_loops {
                            ok = false;
                            return false;
                        }
                    }
                    true
                },
            );
            if !ok {
                found.truncate(max_loops);
                return Loops::Overflow(found);
            }
        }
    }
    Loops::Complete(found)
}

/// Reports every connected superset of `set` built from `ext` and its
/// neighbourhood, each exactly once. Returns false when `report` asks to stop.
fn grow(
    set: &mut Vec<usize>,
    ext: Vec<usize>,
    banned: HashSet<usize>,
    adj: &std::collections::HashMap<usize, Vec<usize>>,
    report: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if !report(set) {
        return false;
    }
    let mut banned = banned;
    for (i, &w) in ext.iter().enumerate() {
        let rest = &ext[i + 1..];
        let mut next: Vec<usize> = rest.to_vec();
        for &x in adj.get(&w).map(|v| v.as_slice()).unwrap_or(&[]) {
            if !set.contains(&x) && x != w && !banned.contains(&x) && !ext.contains(&x) && !next.contains(&x) {
                next.push(x);
            }
        }
        set.push(w);
        let cont = grow(set, next, banned.clone(), adj, report);
        set.pop();
        if !cont {
            return false;
        }
        banned.insert(w);
    }
    true
}

/// A built constraint model for a plan of fixed length.
pub struct BEncoding {
    pub model: Model,
    /// `fluents[i][f]`: value of fluent `f` in state `i`.
    pub fluents: Vec<Vec<VarId>>,
    /// `actions[j][a]`: whether action `a` is the `j+1`-th action.
    pub actions: Vec<Vec<VarId>>,
    /// Whether every loop received its formula.
    pub loops_complete: bool,
    pub n_loops: usize,
}

impl BEncoding {
    /// Decision order: action variables step by step.
    pub fn decision_order(&self) -> Vec<VarId> {
        self.actions.iter().flatten().copied().collect()
    }
}

fn lit_at(layer: &[VarId], l: BLit) -> Lit {
    Lit { var: layer[l.f], pos: l.pos }
}

/// Posts the constraints of one transition from layer `u` to `v` with
/// action variables `a`; `step` only names auxiliary variables.
pub fn encode_transition(
    m: &mut Model,
    d: &BDomain,
    u: &[VarId],
    v: &[VarId],
    a: &[VarId],
    step: usize,
    loops: &[Vec<usize>],
) {
    let n_lits = 2 * d.n_fluents;
    // One reified condition per law, shared by the per-literal disjunctions
    // and by the loop formulae.
    let dl: Vec<Lit> = d
        .dynamic
        .iter()
        .enumerate()
        .map(|(k, law)| {
            let mut lits = vec![Lit::pos(a[law.action])];
            lits.extend(law.pre.iter().map(|&p| lit_at(u, p)));
            m.and_lit(lits, || format!("D{k}({step})"))
        })
        .collect();
    let sl: Vec<Lit> = d
        .statics
        .iter()
        .enumerate()
        .map(|(k, law)| {
            let lits = law.body.iter().map(|&p| lit_at(v, p)).collect();
            m.and_lit(lits, || format!("S{k}({})", step + 1))
        })
        .collect();

    let mut fired = Vec::with_capacity(n_lits);
    for li in 0..n_lits {
        let l = BLit::from_idx(li);
        let name = d.lit_name(l);
        let dyn_l: Vec<Lit> = d.dynamic.iter().zip(&dl).filter(|(law, _)| law.effect == l).map(|x| *x.1).collect();
        let dyn_l = m.or_lit(dyn_l, || format!("Dyn({name},{step})"));
        let stat_l: Vec<Lit> = d.statics.iter().zip(&sl).filter(|(law, _)| law.head == l).map(|x| *x.1).collect();
        let stat_l = m.or_lit(stat_l, || format!("Stat({name},{})", step + 1));
        fired.push(m.or_lit(vec![dyn_l, stat_l], || format!("Fired({name},{step})")));
    }
    for f in 0..d.n_fluents {
        let (p, n) = (BLit::new(f, true), BLit::new(f, false));
        m.post(Constraint::Clause(vec![fired[p.idx()].negate(), fired[n.idx()].negate()]));
        for l in [p, n] {
            let name = d.lit_name(l);
            let inert = m.and_lit(vec![fired[l.complement().idx()].negate(), lit_at(u, l)], || {
                format!("Inert({name},{step})")
            });
            let lits = vec![fired[l.idx()], inert];
            let b = lit_at(v, l);
            let t = m.true_lit();
            if lits.contains(&t) {
                m.post(Constraint::Clause(vec![b]));
            } else {
                m.post(Constraint::OrEq { b, lits });
            }
        }
    }

    // Exactly one action, and it must be executable.
    m.post(Constraint::Linear(Linear::new(a.iter().map(|&x| (1, x)).collect(), RelOp::Eq, 1)));
    for (ai, &av) in a.iter().enumerate() {
        let mut clause = vec![Lit::neg(av)];
        for (k, law) in d.exec.iter().enumerate().filter(|(_, l)| l.action == ai) {
            let lits = law.cond.iter().map(|&p| lit_at(u, p)).collect();
            clause.push(m.and_lit(lits, || format!("Exec{k}({step})")));
        }
        m.post(Constraint::Clause(clause));
        for law in d.nonexec.iter().filter(|l| l.action == ai) {
            let mut clause = vec![Lit::neg(av)];
            clause.extend(law.cond.iter().map(|&p| lit_at(u, p).negate()));
            m.post(Constraint::Clause(clause));
        }
    }

    for (li, lp) in loops.iter().enumerate() {
        let members: HashSet<usize> = lp.iter().copied().collect();
        let mut supports = Vec::new();
        for &x in lp {
            let l = BLit::from_idx(x);
            let mut s: Vec<Lit> =
                d.dynamic.iter().zip(&dl).filter(|(law, _)| law.effect == l).map(|x| *x.1).collect();
            s.extend(
                d.statics
                    .iter()
                    .zip(&sl)
                    .filter(|(law, _)| law.head == l && law.body.iter().all(|b| !members.contains(&b.idx())))
                    .map(|x| *x.1),
            );
            let name = d.lit_name(l);
            s.push(m.and_lit(vec![lit_at(u, l), lit_at(v, l)], || format!("Keep({name},{step})")));
            supports.push(m.or_lit(s, || format!("Supp{li}({name},{step})")));
        }
        for &x in lp {
            let mut clause = supports.clone();
            clause.push(lit_at(v, BLit::from_idx(x)).negate());
            m.post(Constraint::Clause(clause));
        }
    }
}

fn layer(m: &mut Model, d: &BDomain, i: usize) -> Vec<VarId> {
    (0..d.n_fluents).map(|f| m.bool_var(format!("F({},{i})", d.fluent_names[f]))).collect()
}

fn action_layer(m: &mut Model, d: &BDomain, j: usize) -> Vec<VarId> {
    (0..d.n_actions).map(|a| m.bool_var(format!("A({},{j})", d.action_names[a]))).collect()
}

fn loops_for(d: &BDomain, opts: &BOptions) -> Loops {
    match opts.loops {
        LoopMode::Off => Loops::Complete(vec![]),
        LoopMode::On | LoopMode::Auto => {
            find_loops(&d.dependency_graph(), opts.max_loops, opts.max_loop_candidates)
        }
    }
}

/// A single transition with free source, target and action, for checking
/// the encoding against the reference semantics.
pub fn encode_step(d: &BDomain, opts: &BOptions) -> BEncoding {
    let mut m = Model::new(opts.dump);
    let u = layer(&mut m, d, 0);
    let v = layer(&mut m, d, 1);
    let a = action_layer(&mut m, d, 0);
    let loops = loops_for(d, opts);
    encode_transition(&mut m, d, &u, &v, &a, 0, loops.sets());
    BEncoding {
        model: m,
        fluents: vec![u, v],
        actions: vec![a],
        loops_complete: loops.is_complete(),
        n_loops: loops.sets().len(),
    }
}

/// The plan-existence problem for length `n`: the initial state pinned on
/// layer 0, the goal on layer `n`, and one transition per step.
pub fn encode_problem(d: &BDomain, n: usize, opts: &BOptions) -> Result<BEncoding, BError> {
    let s0 = d.initial_state()?;
    let mut m = Model::new(opts.dump);
    let loops = loops_for(d, opts);
    let fluents: Vec<Vec<VarId>> = (0..=n).map(|i| layer(&mut m, d, i)).collect();
    let actions: Vec<Vec<VarId>> = (0..n).map(|j| action_layer(&mut m, d, j)).collect();
    for (f, &val) in s0.iter().enumerate() {
        m.fix(fluents[0][f], val as i64);
    }
    for j in 0..n {
        encode_transition(&mut m, d, &fluents[j], &fluents[j + 1], &actions[j], j, loops.sets());
    }
    for &g in &d.goal {
        m.fix(fluents[n][g.f], g.pos as i64);
    }
    Ok(BEncoding { model: m, fluents, actions, loops_complete: loops.is_complete(), n_loops: loops.sets().len() })
}
