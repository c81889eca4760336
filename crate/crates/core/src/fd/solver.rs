//! Propagation queue, depth-first labeling and branch-and-bound.

use super::constraint::{Constraint, VarId};
use super::domain::Domain;
use super::propagators;
use super::store::{Store, CAUSE_DECISION};
use std::collections::VecDeque;
use std::io::Write;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FdError {
    #[error("variable created with an empty domain")]
    EmptyDomain,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub nodes: u64,
    pub failures: u64,
    pub propagations: u64,
}

/// Hook run after every successful fixpoint during search. Returning false
/// rejects the node.
pub trait NodeCheck {
    fn check(&mut self, solver: &Solver) -> bool;
}

/// Accepts every node.
pub struct NoCheck;

impl NodeCheck for NoCheck {
    fn check(&mut self, _: &Solver) -> bool {
        true
    }
}

pub struct Solver {
    store: Store,
    cons: Vec<Constraint>,
    watchers: Vec<Vec<u32>>,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
    failed: bool,
    pub stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            store: Store::new(),
            cons: Vec::new(),
            watchers: Vec::new(),
            queue: VecDeque::new(),
            in_queue: Vec::new(),
            failed: false,
            stats: Stats::default(),
        }
    }

    pub fn new_var(&mut self, dom: Domain) -> Result<VarId, FdError> {
        if dom.is_empty() {
            return Err(FdError::EmptyDomain);
        }
        self.watchers.push(Vec::new());
        Ok(self.store.add(dom))
    }

    pub fn new_range(&mut self, lo: i64, hi: i64) -> Result<VarId, FdError> {
        self.new_var(Domain::range(lo, hi))
    }

    pub fn new_bool(&mut self) -> VarId {
        self.new_var(Domain::boolean()).expect("boolean domain is non-empty")
    }

    /// A variable fixed to `v`.
    pub fn constant(&mut self, v: i64) -> VarId {
        self.new_var(Domain::singleton(v)).expect("singleton is non-empty")
    }

    pub fn num_vars(&self) -> usize {
        self.store.len()
    }

    pub fn dom(&self, v: VarId) -> &Domain {
        self.store.dom(v)
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.store.value(v)
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    /// Streams `var=<id> dom=<interval-set> cause=<constraint-id>` records.
    pub fn set_trace(&mut self, w: Box<dyn Write + Send>) {
        self.store.trace = Some(w);
    }

    /// Records the constraint and propagates to a fixpoint. Returns false
    /// once the problem is known to be unsatisfiable.
    pub fn post(&mut self, c: Constraint) -> bool {
        let id = self.cons.len() as u32;
        for v in c.vars() {
            self.watchers[v.idx()].push(id);
        }
        self.cons.push(c);
        self.in_queue.push(false);
        if self.failed {
            return false;
        }
        self.enqueue(id);
        self.propagate()
    }

    /// Narrows a domain at the current level and propagates.
    pub fn restrict(&mut self, v: VarId, d: &Domain) -> bool {
        if self.failed {
            return false;
        }
        self.store.cause = CAUSE_DECISION;
        if self.store.intersect(v, d).is_err() {
            self.failed_cleanup();
            return false;
        }
        self.propagate()
    }

    /// Removes one value at the current level and propagates.
    pub fn exclude(&mut self, v: VarId, val: i64) -> bool {
        if self.failed {
            return false;
        }
        self.stats.nodes += 1;
        self.store.cause = CAUSE_DECISION;
        if self.store.remove(v, val).is_err() {
            self.failed_cleanup();
            return false;
        }
        self.propagate()
    }

    /// Fixes one value at the current level and propagates.
    pub fn assign(&mut self, v: VarId, val: i64) -> bool {
        if self.failed {
            return false;
        }
        self.stats.nodes += 1;
        self.store.cause = CAUSE_DECISION;
        if self.store.fix(v, val).is_err() {
            self.failed_cleanup();
            return false;
        }
        self.propagate()
    }

    fn enqueue(&mut self, id: u32) {
        if !self.in_queue[id as usize] {
            self.in_queue[id as usize] = true;
            self.queue.push_back(id);
        }
    }

    fn failed_cleanup(&mut self) {
        for id in self.queue.drain(..) {
            self.in_queue[id as usize] = false;
        }
        self.store.clear_changed();
        self.failed = true;
        self.stats.failures += 1;
    }

    fn schedule_changed(&mut self) {
        for v in self.store.take_changed() {
            for k in 0..self.watchers[v.idx()].len() {
                let id = self.watchers[v.idx()][k];
                self.enqueue(id);
            }
        }
    }

    pub fn propagate(&mut self) -> bool {
        if self.failed {
            return false;
        }
        self.schedule_changed();
        while let Some(id) = self.queue.pop_front() {
            self.in_queue[id as usize] = false;
            self.store.cause = id;
            self.stats.propagations += 1;
            if propagators::propagate(&self.cons[id as usize], &mut self.store).is_err() {
                self.failed_cleanup();
                return false;
            }
            self.schedule_changed();
        }
        true
    }

    /// Opens a choice point for an external search driver.
    pub fn push_level(&mut self) {
        self.store.push_level();
    }

    /// Undoes every change since the matching [`Solver::push_level`],
    /// including a failure.
    pub fn pop_level(&mut self) {
        self.store.pop_level();
        self.failed = false;
    }

    pub fn depth(&self) -> usize {
        self.store.depth()
    }

    /// Every constraint holds under the (complete) current assignment.
    pub fn check_assignment(&self, vals: &[i64]) -> bool {
        let f = |v: VarId| vals[v.idx()];
        self.cons.iter().all(|c| c.holds(&f))
    }

    /// Lower bounds of all domains; the assignment once every variable is fixed.
    pub fn assignment(&self) -> Vec<i64> {
        (0..self.store.len()).map(|i| self.store.min(VarId(i as u32))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Solution(Vec<i64>),
    Exhausted,
    Budget,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub max_nodes: Option<u64>,
}

/// Resumable depth-first search. Variables in `order` are branched first,
/// the rest by index, always on the smallest value (x = v, then x ≠ v), so
/// exhaustive enumeration yields each solution exactly once.
pub struct Search {
    order: Vec<VarId>,
    stack: Vec<(VarId, i64)>,
    started: bool,
    base: bool,
    done: bool,
    objective: Option<VarId>,
    bound: Option<i64>,
    pub limits: Limits,
}

impl Search {
    pub fn new(order: Vec<VarId>) -> Self {
        Search {
            order,
            stack: Vec::new(),
            started: false,
            base: false,
            done: false,
            objective: None,
            bound: None,
            limits: Limits::default(),
        }
    }

    /// Branch-and-bound mode: each solution tightens `obj` below its value.
    pub fn minimizing(order: Vec<VarId>, obj: VarId) -> Self {
        let mut s = Search::new(order);
        s.objective = Some(obj);
        s
    }

    fn pick(&self, solver: &Solver) -> Option<VarId> {
        if let Some(&v) = self.order.iter().find(|&&v| !solver.store.fixed(v)) {
            return Some(v);
        }
        (0..solver.num_vars() as u32).map(VarId).find(|&v| !solver.store.fixed(v))
    }

    /// Applies the objective bound, propagates and runs the node check.
    fn settle(&mut self, solver: &mut Solver, check: &mut dyn NodeCheck) -> bool {
        if let (Some(obj), Some(b)) = (self.objective, self.bound) {
            solver.store.cause = CAUSE_DECISION;
            if solver.store.set_max(obj, b).is_err() {
                solver.failed_cleanup();
                return false;
            }
        }
        solver.propagate() && check.check(solver)
    }

    fn over_budget(&self, solver: &Solver) -> bool {
        if let Some(m) = self.limits.max_nodes {
            if solver.stats.nodes >= m {
                return true;
            }
        }
        if let Some(d) = self.limits.deadline {
            if solver.stats.nodes % 64 == 0 && Instant::now() >= d {
                return true;
            }
        }
        false
    }

    /// Backtracks to the most recent untried right branch. False when none is left.
    fn backtrack(&mut self, solver: &mut Solver, check: &mut dyn NodeCheck) -> bool {
        while let Some((v, val)) = self.stack.pop() {
            solver.pop_level();
            solver.store.cause = CAUSE_DECISION;
            if solver.store.remove(v, val).is_err() {
                solver.failed_cleanup();
                continue;
            }
            solver.stats.nodes += 1;
            if self.settle(solver, check) {
                return true;
            }
        }
        false
    }

    pub fn next(&mut self, solver: &mut Solver, check: &mut dyn NodeCheck) -> Outcome {
        if self.done {
            return Outcome::Exhausted;
        }
        let mut ok = if !self.started {
            self.started = true;
            if solver.failed {
                self.done = true;
                return Outcome::Exhausted;
            }
            // Base level so that right branches taken at depth 0 are undone on reset.
            solver.push_level();
            self.base = true;
            let ok = self.settle(solver, check);
            if !ok {
                self.finish(solver);
                return Outcome::Exhausted;
            }
            true
        } else {
            false
        };
        loop {
            if !ok {
                if !self.backtrack(solver, check) {
                    self.finish(solver);
                    return Outcome::Exhausted;
                }
            }
            if self.over_budget(solver) {
                return Outcome::Budget;
            }
            match self.pick(solver) {
                None => {
                    let sol = solver.assignment();
                    if let Some(obj) = self.objective {
                        self.bound = Some(sol[obj.idx()] - 1);
                    }
                    return Outcome::Solution(sol);
                }
                Some(v) => {
                    let val = solver.store.min(v);
                    solver.push_level();
                    self.stack.push((v, val));
                    solver.stats.nodes += 1;
                    solver.store.cause = CAUSE_DECISION;
                    ok = solver.store.fix(v, val).is_ok() && self.settle(solver, check);
                    if !ok && !solver.failed {
                        solver.failed_cleanup();
                    }
                }
            }
        }
    }

    fn finish(&mut self, solver: &mut Solver) {
        self.done = true;
        self.reset(solver);
    }

    /// Restores the solver to its state before the search started.
    pub fn reset(&mut self, solver: &mut Solver) {
        while self.stack.pop().is_some() {
            solver.pop_level();
        }
        if self.base {
            solver.pop_level();
            self.base = false;
        }
        self.done = true;
    }
}

impl Solver {
    pub fn solve(&mut self, order: &[VarId]) -> Option<Vec<i64>> {
        let mut s = Search::new(order.to_vec());
        let r = s.next(self, &mut NoCheck);
        s.reset(self);
        match r {
            Outcome::Solution(v) => Some(v),
            _ => None,
        }
    }

    pub fn all_solutions(&mut self, order: &[VarId]) -> Vec<Vec<i64>> {
        let mut s = Search::new(order.to_vec());
        let mut out = Vec::new();
        while let Outcome::Solution(v) = s.next(self, &mut NoCheck) {
            out.push(v);
        }
        s.reset(self);
        out
    }

    /// Optimal solution for `obj`, or None when unsatisfiable.
    pub fn minimize(&mut self, obj: VarId, order: &[VarId]) -> Option<Vec<i64>> {
        let mut s = Search::minimizing(order.to_vec(), obj);
        let mut best = None;
        while let Outcome::Solution(v) = s.next(self, &mut NoCheck) {
            best = Some(v);
        }
        s.reset(self);
        best
    }
}
