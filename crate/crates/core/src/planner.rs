//! Plan search: build the encoding for a length, label, extract the
//! trajectory and check it against the reference semantics. A candidate
//! the reference rejects is skipped and the search resumes.

use crate::b::encoder::{encode_problem, BOptions, LoopMode};
use crate::b::{BDomain, BError};
use crate::fd::{Limits, NoCheck, NodeCheck, Outcome, Search, VarId};
use crate::frontend::{DomainDescription, Lang};
use crate::model::Model;
use crate::traj::Trajectory;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    B(#[from] BError),
    #[error("{0}")]
    Encoding(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minimality {
    /// Fluents change only when touched by a fired law; states closed.
    Off,
    /// Inertia over whole clusters of statically linked fluents.
    Cluster,
    /// Cluster constraints plus an exact minimal-closure check.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Plan,
    Goal,
}

#[derive(Clone, Debug)]
pub struct PlanOptions {
    pub loops: LoopMode,
    pub minimality: Minimality,
    pub minimize: Option<Objective>,
    pub time_limit: Option<Duration>,
    pub max_nodes: Option<u64>,
    /// B^MV only: reject plans that revisit a state.
    pub no_loop: bool,
    /// Permutes the order in which the actions of each step are tried.
    pub seed: Option<u64>,
    pub dump: bool,
    /// Streams every domain change of the search to stderr.
    pub trace: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            loops: LoopMode::Auto,
            minimality: Minimality::Full,
            minimize: None,
            time_limit: None,
            max_nodes: None,
            no_loop: false,
            seed: None,
            dump: false,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Plan(Trajectory),
    NoPlan,
    /// Time or node budget exhausted.
    Unknown,
}

#[derive(Clone, Debug)]
pub struct PlanReport {
    pub length: usize,
    pub answer: Answer,
    /// Objective value of the returned plan when optimizing.
    pub cost: Option<i64>,
    pub nodes: u64,
    /// Candidates the reference semantics rejected.
    pub rejected: usize,
    pub elapsed: Duration,
    pub constraints: Vec<String>,
}

/// What the generic search loop needs from an encoding.
pub(crate) struct Prepared<'a> {
    pub model: Model,
    pub order: Vec<VarId>,
    /// `actions[j]`: action variables of step `j`.
    pub actions: Vec<Vec<VarId>>,
    pub objective: Option<VarId>,
    pub extract: Box<dyn Fn(&[i64]) -> Trajectory + 'a>,
    pub verify: Box<dyn Fn(&Trajectory) -> Result<(), String> + 'a>,
    pub check: Box<dyn NodeCheck + 'a>,
    /// Present when constraints only link layers within `lookback` of each
    /// other, so failed states can be memoized.
    pub layering: Option<Layering>,
}

/// Variable blocks of a layered encoding.
pub(crate) struct Layering {
    /// `blocks[j]`: variables labeled for step `j` (its actions, then the
    /// fluents of layer `j+1`).
    pub blocks: Vec<Vec<VarId>>,
    /// `states[i]`: fluent variables of layer `i`.
    pub states: Vec<Vec<VarId>>,
    /// Number of consecutive layers that determine the future.
    pub lookback: usize,
}

enum Flow {
    Found(Trajectory),
    Budget,
    /// Subtree exhausted; true when it produced any complete candidate.
    Exhausted(bool),
}

/// Depth-first labeling block by block, remembering `(layer, window)`
/// pairs whose subtree produced no candidate at all. Candidates rejected by
/// the reference semantics do not mark a state dead, since the rejection
/// may come from the prefix.
struct Driver<'p, 'a> {
    p: &'p mut Prepared<'a>,
    dead: HashSet<(usize, Vec<i64>)>,
    deadline: Option<Instant>,
    max_nodes: Option<u64>,
    rejected: usize,
}

impl Driver<'_, '_> {
    fn over_budget(&self) -> bool {
        let s = &self.p.model.solver;
        self.max_nodes.is_some_and(|m| s.stats.nodes >= m)
            || self.deadline.is_some_and(|d| s.stats.nodes % 64 == 0 && Instant::now() >= d)
    }

    fn key(&self, layer: usize) -> Option<(usize, Vec<i64>)> {
        let l = self.p.layering.as_ref().unwrap();
        let lo = (layer + 1).saturating_sub(l.lookback);
        let mut vals = Vec::new();
        for st in &l.states[lo..=layer] {
            for &v in st {
                vals.push(self.p.model.solver.value(v)?);
            }
        }
        Some((layer, vals))
    }

    fn block(&mut self, j: usize) -> Flow {
        let n_blocks = self.p.layering.as_ref().unwrap().blocks.len();
        if j == n_blocks {
            return self.label(j, 0);
        }
        self.label(j, 0)
    }

    fn next_var(&self, j: usize, k: usize) -> Option<(VarId, usize)> {
        let s = &self.p.model.solver;
        let l = self.p.layering.as_ref().unwrap();
        if j < l.blocks.len() {
            l.blocks[j][k..].iter().position(|&v| s.value(v).is_none()).map(|i| (l.blocks[j][k + i], k + i))
        } else {
            (k..s.num_vars()).map(|i| VarId(i as u32)).find(|&v| s.value(v).is_none()).map(|v| (v, v.idx()))
        }
    }

    fn label(&mut self, j: usize, k: usize) -> Flow {
        if self.over_budget() {
            return Flow::Budget;
        }
        let (v, pos) = match self.next_var(j, k) {
            Some(x) => x,
            None => return self.block_done(j),
        };
        let mut seen = false;
        self.p.model.solver.push_level();
        loop {
            let val = self.p.model.solver.dom(v).min();
            self.p.model.solver.push_level();
            if self.p.model.solver.assign(v, val) && self.p.check.check(&self.p.model.solver) {
                match self.label(j, pos) {
                    Flow::Exhausted(s) => seen |= s,
                    other => {
                        self.p.model.solver.pop_level();
                        self.p.model.solver.pop_level();
                        return other;
                    }
                }
            }
            self.p.model.solver.pop_level();
            if !(self.p.model.solver.exclude(v, val) && self.p.check.check(&self.p.model.solver)) {
                break;
            }
        }
        self.p.model.solver.pop_level();
        Flow::Exhausted(seen)
    }

    fn block_done(&mut self, j: usize) -> Flow {
        let n_blocks = self.p.layering.as_ref().unwrap().blocks.len();
        if j == n_blocks {
            let sol = self.p.model.solver.assignment();
            let t = (self.p.extract)(&sol);
            return match (self.p.verify)(&t) {
                Ok(()) => Flow::Found(t),
                Err(_) => {
                    self.rejected += 1;
                    Flow::Exhausted(true)
                }
            };
        }
        let key = self.key(j + 1);
        if let Some(k) = &key {
            if self.dead.contains(k) {
                return Flow::Exhausted(false);
            }
        }
        let r = self.block(j + 1);
        if let (Flow::Exhausted(false), Some(k)) = (&r, key) {
            self.dead.insert(k);
        }
        r
    }
}

fn run_layered(mut p: Prepared<'_>, length: usize, opts: &PlanOptions) -> PlanReport {
    let start = Instant::now();
    let constraints = p.model.dump().to_vec();
    let (answer, rejected) = if !p.model.solver.propagate() || !p.check.check(&p.model.solver) {
        (Answer::NoPlan, 0)
    } else {
        let mut d = Driver {
            p: &mut p,
            dead: HashSet::new(),
            deadline: opts.time_limit.map(|t| start + t),
            max_nodes: opts.max_nodes,
            rejected: 0,
        };
        let a = match d.block(0) {
            Flow::Found(t) => Answer::Plan(t),
            Flow::Budget => Answer::Unknown,
            Flow::Exhausted(_) => Answer::NoPlan,
        };
        (a, d.rejected)
    };
    PlanReport {
        length,
        answer,
        cost: None,
        nodes: p.model.solver.stats.nodes,
        rejected,
        elapsed: start.elapsed(),
        constraints,
    }
}

/// Replaces, in order of appearance, the members of `set` in `seq` by `perm`.
fn permute(seq: &mut [VarId], set: &[VarId], perm: &[VarId]) {
    let mut next = perm.iter();
    for v in seq.iter_mut().filter(|v| set.contains(v)) {
        *v = *next.next().unwrap();
    }
}

fn shuffle_actions(p: &mut Prepared<'_>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for step in &p.actions {
        let mut perm = step.clone();
        perm.shuffle(&mut rng);
        permute(&mut p.order, step, &perm);
        if let Some(l) = &mut p.layering {
            for b in &mut l.blocks {
                permute(b, step, &perm);
            }
        }
    }
}

pub(crate) fn run(mut p: Prepared<'_>, length: usize, opts: &PlanOptions) -> PlanReport {
    if let Some(seed) = opts.seed {
        shuffle_actions(&mut p, seed);
    }
    if opts.trace {
        p.model.solver.set_trace(Box::new(std::io::stderr()));
    }
    if p.layering.is_some() && p.objective.is_none() {
        return run_layered(p, length, opts);
    }
    let start = Instant::now();
    let constraints = p.model.dump().to_vec();
    let mut search = match p.objective {
        Some(obj) => Search::minimizing(p.order.clone(), obj),
        None => Search::new(p.order.clone()),
    };
    search.limits = Limits { deadline: opts.time_limit.map(|t| start + t), max_nodes: opts.max_nodes };
    let mut rejected = 0;
    let mut best: Option<(Trajectory, i64)> = None;
    let answer = loop {
        match search.next(&mut p.model.solver, p.check.as_mut()) {
            Outcome::Solution(sol) => {
                let t = (p.extract)(&sol);
                if (p.verify)(&t).is_err() {
                    rejected += 1;
                    continue;
                }
                match p.objective {
                    None => break Answer::Plan(t),
                    Some(obj) => best = Some((t, sol[obj.idx()])),
                }
            }
            Outcome::Exhausted => {
                break match best.take() {
                    Some((t, c)) => {
                        best = Some((t.clone(), c));
                        Answer::Plan(t)
                    }
                    None => Answer::NoPlan,
                }
            }
            // A budget stop keeps the best plan so far, without a proof of optimality.
            Outcome::Budget => {
                break match &best {
                    Some((t, _)) => Answer::Plan(t.clone()),
                    None => Answer::Unknown,
                }
            }
        }
    };
    search.reset(&mut p.model.solver);
    PlanReport {
        length,
        answer,
        cost: best.map(|b| b.1),
        nodes: p.model.solver.stats.nodes,
        rejected,
        elapsed: start.elapsed(),
        constraints,
    }
}

fn prepare_b<'a>(bd: &'a BDomain, n: usize, opts: &PlanOptions) -> Result<Prepared<'a>, PlanError> {
    let b_opts = BOptions { loops: opts.loops, dump: opts.dump, ..BOptions::default() };
    let enc = encode_problem(bd, n, &b_opts)?;
    let fluents = enc.fluents.clone();
    let actions = enc.actions.clone();
    let blocks: Vec<Vec<VarId>> =
        (0..n).map(|j| actions[j].iter().chain(&fluents[j + 1]).copied().collect()).collect();
    let order = blocks.iter().flatten().copied().collect();
    let layering = Layering { blocks, states: fluents.clone(), lookback: 1 };
    Ok(Prepared {
        model: enc.model,
        order,
        actions: actions.clone(),
        objective: None,
        extract: Box::new(move |sol: &[i64]| Trajectory {
            states: fluents.iter().map(|l| l.iter().map(|v| sol[v.idx()]).collect()).collect(),
            actions: actions.iter().map(|l| l.iter().position(|v| sol[v.idx()] == 1).unwrap()).collect(),
        }),
        verify: Box::new(move |t: &Trajectory| bd.verify_trajectory(t)),
        check: Box::new(NoCheck),
        layering: Some(layering),
    })
}

/// Searches for a plan of exactly `n` actions.
pub fn plan(d: &DomainDescription, n: usize, opts: &PlanOptions) -> Result<PlanReport, PlanError> {
    match d.lang {
        Lang::B => {
            if opts.minimize.is_some() {
                return Err(PlanError::Encoding("cost optimization needs a B^MV description".into()));
            }
            let bd = BDomain::from_description(d)?;
            let p = prepare_b(&bd, n, opts)?;
            Ok(run(p, n, opts))
        }
        Lang::Bmv => crate::bmv::planner::plan(d, n, opts),
    }
}

/// Tries each length in order and stops at the first plan found.
pub fn plan_range(
    d: &DomainDescription,
    lengths: impl IntoIterator<Item = usize>,
    opts: &PlanOptions,
) -> Result<Vec<PlanReport>, PlanError> {
    let mut out = Vec::new();
    for n in lengths {
        let r = plan(d, n, opts)?;
        let found = matches!(r.answer, Answer::Plan(_));
        out.push(r);
        if found {
            break;
        }
    }
    Ok(out)
}

/// Checks a trajectory against the reference semantics of its language.
pub fn verify(d: &DomainDescription, t: &Trajectory) -> Result<(), String> {
    match d.lang {
        Lang::B => BDomain::from_description(d).map_err(|e| e.to_string())?.verify_trajectory(t),
        Lang::Bmv => crate::bmv::oracle::verify_trajectory(d, t),
    }
}
