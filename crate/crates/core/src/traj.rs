//! Trajectories shared by both languages: states are full fluent
//! valuations indexed by fluent id.

use crate::frontend::{ActionId, DomainDescription};
use std::collections::HashMap;
use std::fmt::Write;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trajectory {
    /// `states.len() == actions.len() + 1`.
    pub states: Vec<Vec<i64>>,
    pub actions: Vec<ActionId>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Human-readable listing: one line per action, then the final state.
    pub fn to_text(&self, d: &DomainDescription) -> String {
        let mut s = String::new();
        for (i, a) in self.actions.iter().enumerate() {
            let _ = writeln!(s, "{:>3}: {}", i + 1, d.action_name(*a));
        }
        s.push_str("final state:");
        for (f, v) in self.states.last().unwrap().iter().enumerate() {
            if d.lang == crate::frontend::Lang::B {
                if *v == 1 {
                    let _ = write!(s, " {}", d.fluent_name(f));
                }
            } else {
                let _ = write!(s, " {}={}", d.fluent_name(f), v);
            }
        }
        s.push('\n');
        s
    }

    /// Line-delimited records: `state <i> <fluent>=<value> ...` for each
    /// state, each followed by `action <i> <name>` except the last. Names
    /// are printed without whitespace.
    pub fn to_records(&self, d: &DomainDescription) -> String {
        let mut s = String::new();
        for (i, st) in self.states.iter().enumerate() {
            let _ = write!(s, "state {i}");
            for (f, v) in st.iter().enumerate() {
                let _ = write!(s, " {}={v}", compact(&d.fluent_name(f)));
            }
            s.push('\n');
            if let Some(a) = self.actions.get(i) {
                let _ = writeln!(s, "action {i} {}", compact(&d.action_name(*a)));
            }
        }
        s
    }

    /// Reads the output of [`Trajectory::to_records`]. Blank lines and lines
    /// starting with `#` are skipped; every fluent must be given in every state.
    pub fn from_records(d: &DomainDescription, text: &str) -> Result<Trajectory, RecordError> {
        let fluents: HashMap<String, usize> = (0..d.fluents.len()).map(|f| (compact(&d.fluent_name(f)), f)).collect();
        let names: HashMap<String, usize> = (0..d.actions.len()).map(|a| (compact(&d.action_name(a)), a)).collect();
        let mut states: Vec<Vec<i64>> = Vec::new();
        let mut actions = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| RecordError { line: ln, msg };
            let mut it = line.split_whitespace();
            let kind = it.next().unwrap_or_default();
            let idx: usize = it
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| bad("missing index".into()))?;
            match kind {
                "state" => {
                    if idx != states.len() || idx != actions.len() {
                        return Err(bad(format!("state {idx} out of order")));
                    }
                    let mut st: Vec<Option<i64>> = vec![None; d.fluents.len()];
                    for item in it {
                        let (name, val) = item.rsplit_once('=').ok_or_else(|| bad(format!("expected fluent=value, got `{item}`")))?;
                        let f = *fluents.get(name).ok_or_else(|| bad(format!("unknown fluent `{name}`")))?;
                        st[f] = Some(val.parse().map_err(|_| bad(format!("bad value `{val}`")))?);
                    }
                    let st: Option<Vec<i64>> = st.into_iter().collect();
                    states.push(st.ok_or_else(|| bad("incomplete state".into()))?);
                }
                "action" => {
                    if idx + 1 != states.len() || idx != actions.len() {
                        return Err(bad(format!("action {idx} out of order")));
                    }
                    let name = compact(&it.collect::<String>());
                    actions.push(*names.get(&name).ok_or_else(|| bad(format!("unknown action `{name}`")))?);
                }
                other => return Err(bad(format!("unknown record `{other}`"))),
            }
        }
        if states.len() != actions.len() + 1 {
            return Err(RecordError { line: 0, msg: "trajectory must end with a state".into() });
        }
        Ok(Trajectory { states, actions })
    }
}

/// A name with all whitespace removed, as used in records.
fn compact(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct RecordError {
    pub line: usize,
    pub msg: String,
}
