//! The multi-valued language B^MV: reference semantics, the constraint
//! encoding, and plan search.
//!
//! States are vectors indexed by fluent id; `None` marks an undefined
//! value. Only complete states occur in trajectories.

pub mod encoder;
pub mod oracle;
pub mod planner;

use crate::frontend::{Cons, DomainDescription, Expr, FluentId};
use thiserror::Error;

pub type MvState = Vec<Option<i64>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MvError {
    #[error("{what} needs {needed} candidates, over the limit of {limit}")]
    Budget { what: &'static str, needed: u128, limit: u128 },
    #[error("initial state: {0}")]
    InitialState(String),
}

pub fn complete(s: &[i64]) -> MvState {
    s.iter().map(|&x| Some(x)).collect()
}

/// Fluents a constraint mentions, through relative or absolute references.
pub fn mentioned(c: &Cons, out: &mut Vec<bool>) {
    c.visit_leaves(&mut |e| match e {
        Expr::Fluent(f, _) | Expr::At(f, _) => out[*f] = true,
        _ => {}
    });
}

/// Partition of the fluents into clusters: two fluents share a cluster when
/// some static law mentions both, closed transitively. Each cluster is
/// sorted and clusters are ordered by their smallest member.
pub fn clusters(d: &DomainDescription) -> Vec<Vec<FluentId>> {
    let n = d.fluents.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for law in &d.statics {
        let mut m = vec![false; n];
        mentioned(&law.cond, &mut m);
        mentioned(&law.head, &mut m);
        let mut it = (0..n).filter(|&f| m[f]);
        if let Some(first) = it.next() {
            for g in it {
                let (a, b) = (find(&mut parent, first), find(&mut parent, g));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<Vec<FluentId>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for f in 0..n {
        let r = find(&mut parent, f);
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push(Vec::new());
        }
        out[slot[r]].push(f);
    }
    out
}

/// Fluents occurring in at least one static law.
pub fn static_fluents(d: &DomainDescription) -> Vec<bool> {
    let mut m = vec![false; d.fluents.len()];
    for law in &d.statics {
        mentioned(&law.cond, &mut m);
        mentioned(&law.head, &mut m);
    }
    m
}

/// Static laws refer only to the layer they are evaluated at.
pub fn markov_statics(d: &DomainDescription) -> bool {
    let mut ok = true;
    for law in &d.statics {
        for c in [&law.cond, &law.head] {
            c.visit_leaves(&mut |e| match e {
                Expr::Fluent(_, k) if *k != 0 => ok = false,
                Expr::At(..) => ok = false,
                _ => {}
            });
        }
    }
    ok
}

/// Index of the law set touching each cluster: statics mentioning a fluent
/// of the cluster.
pub fn cluster_laws(d: &DomainDescription, cl: &[FluentId]) -> Vec<usize> {
    let n = d.fluents.len();
    (0..d.statics.len())
        .filter(|&k| {
            let mut m = vec![false; n];
            mentioned(&d.statics[k].cond, &mut m);
            mentioned(&d.statics[k].head, &mut m);
            cl.iter().any(|&f| m[f])
        })
        .collect()
}

/// One line per cluster: members and the number of static laws involved.
pub fn explain_clusters(d: &DomainDescription) -> String {
    let mut s = String::new();
    for cl in clusters(d) {
        let names: Vec<String> = cl.iter().map(|&f| d.fluent_name(f)).collect();
        s.push_str(&format!("{{{}}} laws={}\n", names.join(", "), cluster_laws(d, &cl).len()));
    }
    s
}
