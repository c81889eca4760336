//! Integer domains stored as sorted, disjoint, non-adjacent closed intervals.

use smallvec::SmallVec;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Domain {
    ivs: SmallVec<[(i64, i64); 2]>,
}

impl Domain {
    pub fn empty() -> Self {
        Domain { ivs: SmallVec::new() }
    }

    pub fn range(lo: i64, hi: i64) -> Self {
        let mut d = Domain::empty();
        if lo <= hi {
            d.ivs.push((lo, hi));
        }
        d
    }

    pub fn singleton(v: i64) -> Self {
        Domain::range(v, v)
    }

    pub fn boolean() -> Self {
        Domain::range(0, 1)
    }

    /// Builds a domain from arbitrary values (duplicates allowed).
    pub fn from_values<I: IntoIterator<Item = i64>>(vals: I) -> Self {
        let mut v: Vec<i64> = vals.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let mut d = Domain::empty();
        for x in v {
            match d.ivs.last_mut() {
                Some(last) if last.1 + 1 == x => last.1 = x,
                _ => d.ivs.push((x, x)),
            }
        }
        d
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn min(&self) -> i64 {
        self.ivs[0].0
    }

    pub fn max(&self) -> i64 {
        self.ivs[self.ivs.len() - 1].1
    }

    pub fn is_fixed(&self) -> bool {
        self.ivs.len() == 1 && self.ivs[0].0 == self.ivs[0].1
    }

    /// The single value, if fixed.
    pub fn value(&self) -> Option<i64> {
        if self.is_fixed() {
            Some(self.ivs[0].0)
        } else {
            None
        }
    }

    pub fn size(&self) -> u64 {
        self.ivs.iter().map(|&(a, b)| (b - a) as u64 + 1).sum()
    }

    pub fn contains(&self, v: i64) -> bool {
        // Domains are short; a linear scan beats binary search in practice.
        self.ivs.iter().any(|&(a, b)| a <= v && v <= b)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.ivs.iter().flat_map(|&(a, b)| a..=b)
    }

    /// Smallest value `>= v`, if any.
    pub fn next_geq(&self, v: i64) -> Option<i64> {
        for &(a, b) in &self.ivs {
            if v <= b {
                return Some(v.max(a));
            }
        }
        None
    }

    /// Largest value `<= v`, if any.
    pub fn prev_leq(&self, v: i64) -> Option<i64> {
        for &(a, b) in self.ivs.iter().rev() {
            if v >= a {
                return Some(v.min(b));
            }
        }
        None
    }

    /// Keeps values `>= lo`. Returns true if the domain changed.
    pub fn restrict_min(&mut self, lo: i64) -> bool {
        if self.is_empty() || lo <= self.min() {
            return false;
        }
        while let Some(&(_, b)) = self.ivs.first() {
            if b < lo {
                self.ivs.remove(0);
            } else {
                break;
            }
        }
        if let Some(first) = self.ivs.first_mut() {
            if first.0 < lo {
                first.0 = lo;
            }
        }
        true
    }

    /// Keeps values `<= hi`. Returns true if the domain changed.
    pub fn restrict_max(&mut self, hi: i64) -> bool {
        if self.is_empty() || hi >= self.max() {
            return false;
        }
        while let Some(&(a, _)) = self.ivs.last() {
            if a > hi {
                self.ivs.pop();
            } else {
                break;
            }
        }
        if let Some(last) = self.ivs.last_mut() {
            if last.1 > hi {
                last.1 = hi;
            }
        }
        true
    }

    pub fn remove(&mut self, v: i64) -> bool {
        for i in 0..self.ivs.len() {
            let (a, b) = self.ivs[i];
            if v < a {
                return false;
            }
            if v <= b {
                if a == b {
                    self.ivs.remove(i);
                } else if v == a {
                    self.ivs[i].0 = a + 1;
                } else if v == b {
                    self.ivs[i].1 = b - 1;
                } else {
                    self.ivs[i].1 = v - 1;
                    self.ivs.insert(i + 1, (v + 1, b));
                }
                return true;
            }
        }
        false
    }

    pub fn fix(&mut self, v: i64) -> bool {
        if self.is_fixed() && self.min() == v {
            return false;
        }
        if self.contains(v) {
            *self = Domain::singleton(v);
        } else {
            *self = Domain::empty();
        }
        true
    }

    pub fn intersect(&mut self, other: &Domain) -> bool {
        let mut out: SmallVec<[(i64, i64); 2]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ivs.len() && j < other.ivs.len() {
            let (a1, b1) = self.ivs[i];
            let (a2, b2) = other.ivs[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        if out == self.ivs {
            false
        } else {
            self.ivs = out;
            true
        }
    }
}

impl fmt::Display for Domain {
    /// `{}` for empty, `{a..b,c}` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, &(a, b)) in self.ivs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if a == b {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}..{b}")?;
            }
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
