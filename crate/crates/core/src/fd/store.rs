//! Domain store with a chronological trail. Each variable's domain is saved
//! at most once per search level; undo restores saved domains in reverse.

use super::constraint::VarId;
use super::domain::Domain;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fail;

pub type PropResult = Result<(), Fail>;

/// Cause recorded for search decisions in the propagation trace.
pub const CAUSE_DECISION: u32 = u32::MAX;

pub struct Store {
    doms: Vec<Domain>,
    stamp: Vec<u64>,
    trail: Vec<(VarId, Domain)>,
    /// (trail length, level id) for every open level.
    levels: Vec<(usize, u64)>,
    cur_id: u64,
    next_id: u64,
    dirty: Vec<bool>,
    pub(crate) changed: Vec<VarId>,
    pub(crate) cause: u32,
    pub(crate) trace: Option<Box<dyn Write + Send>>,
}

impl Store {
    pub fn new() -> Self {
        Store {
            doms: Vec::new(),
            stamp: Vec::new(),
            trail: Vec::new(),
            levels: Vec::new(),
            cur_id: 0,
            next_id: 1,
            dirty: Vec::new(),
            changed: Vec::new(),
            cause: CAUSE_DECISION,
            trace: None,
        }
    }

    pub fn add(&mut self, d: Domain) -> VarId {
        let id = VarId(self.doms.len() as u32);
        self.doms.push(d);
        self.stamp.push(0);
        self.dirty.push(false);
        id
    }

    pub fn len(&self) -> usize {
        self.doms.len()
    }

    pub fn dom(&self, v: VarId) -> &Domain {
        &self.doms[v.idx()]
    }

    pub fn min(&self, v: VarId) -> i64 {
        self.doms[v.idx()].min()
    }

    pub fn max(&self, v: VarId) -> i64 {
        self.doms[v.idx()].max()
    }

    pub fn fixed(&self, v: VarId) -> bool {
        self.doms[v.idx()].is_fixed()
    }

    pub fn value(&self, v: VarId) -> Option<i64> {
        self.doms[v.idx()].value()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn push_level(&mut self) {
        self.levels.push((self.trail.len(), self.cur_id));
        self.cur_id = self.next_id;
        self.next_id += 1;
    }

    pub fn pop_level(&mut self) {
        let (mark, prev_id) = self.levels.pop().expect("pop_level at root");
        while self.trail.len() > mark {
            let (v, d) = self.trail.pop().unwrap();
            self.doms[v.idx()] = d;
        }
        self.cur_id = prev_id;
    }

    fn save(&mut self, v: VarId) {
        let i = v.idx();
        if self.stamp[i] != self.cur_id {
            self.stamp[i] = self.cur_id;
            if !self.levels.is_empty() {
                self.trail.push((v, self.doms[i].clone()));
            }
        }
    }

    fn after_change(&mut self, v: VarId) -> PropResult {
        let i = v.idx();
        if let Some(w) = self.trace.as_mut() {
            let cause = if self.cause == CAUSE_DECISION {
                "decision".to_string()
            } else {
                format!("c{}", self.cause)
            };
            // Trace output is best-effort diagnostics.
            let _ = writeln!(w, "var={} dom={} cause={}", v.0, self.doms[i], cause);
        }
        if self.doms[i].is_empty() {
            return Err(Fail);
        }
        if !self.dirty[i] {
            self.dirty[i] = true;
            self.changed.push(v);
        }
        Ok(())
    }

    pub(crate) fn take_changed(&mut self) -> Vec<VarId> {
        let ch = std::mem::take(&mut self.changed);
        for v in &ch {
            self.dirty[v.idx()] = false;
        }
        ch
    }

    pub(crate) fn clear_changed(&mut self) {
        let _ = self.take_changed();
    }

    pub fn set_min(&mut self, v: VarId, lo: i64) -> PropResult {
        if lo <= self.doms[v.idx()].min() {
            return Ok(());
        }
        self.save(v);
        self.doms[v.idx()].restrict_min(lo);
        self.after_change(v)
    }

    pub fn set_max(&mut self, v: VarId, hi: i64) -> PropResult {
        if hi >= self.doms[v.idx()].max() {
            return Ok(());
        }
        self.save(v);
        self.doms[v.idx()].restrict_max(hi);
        self.after_change(v)
    }

    pub fn remove(&mut self, v: VarId, x: i64) -> PropResult {
        if !self.doms[v.idx()].contains(x) {
            return Ok(());
        }
        self.save(v);
        self.doms[v.idx()].remove(x);
        self.after_change(v)
    }

    pub fn fix(&mut self, v: VarId, x: i64) -> PropResult {
        let d = &self.doms[v.idx()];
        if d.is_fixed() && d.min() == x {
            return Ok(());
        }
        self.save(v);
        self.doms[v.idx()].fix(x);
        self.after_change(v)
    }

    pub fn intersect(&mut self, v: VarId, other: &Domain) -> PropResult {
        let mut d = self.doms[v.idx()].clone();
        if !d.intersect(other) {
            return Ok(());
        }
        self.save(v);
        self.doms[v.idx()] = d;
        self.after_change(v)
    }

    /// Restricts a variable to a sorted list of values.
    pub fn keep_values(&mut self, v: VarId, vals: &[i64]) -> PropResult {
        if vals.len() as u64 == self.doms[v.idx()].size() {
            return Ok(());
        }
        let d = Domain::from_values(vals.iter().copied());
        self.intersect(v, &d)
    }
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}
