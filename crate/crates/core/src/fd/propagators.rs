//! Stateless propagators. Each one re-reads the domains it needs, so the
//! trail only has to restore domains.

use super::constraint::{Arith, Constraint, Linear, Lit, RelOp, VarId};
use super::store::{Fail, PropResult, Store};

/// Above this many (x, y) pairs the arithmetic propagators fall back to bounds.
const SUPPORT_LIMIT: u64 = 4096;

pub(crate) fn propagate(c: &Constraint, s: &mut Store) -> PropResult {
    match c {
        Constraint::Linear(l) => prop_linear(&l.terms, l.op, l.rhs, s),
        Constraint::Arith { op, x, y, z } => prop_arith(*op, *x, *y, *z, s),
        Constraint::Abs { x, z } => prop_abs(*x, *z, s),
        Constraint::Clause(lits) => prop_clause(lits, s),
        Constraint::AndEq { b, lits } => prop_and_eq(*b, lits, false, s),
        Constraint::OrEq { b, lits } => prop_and_eq(b.negate(), lits, true, s),
        Constraint::Reif { b, lin } => match lit_value(*b, s) {
            Some(true) => prop_lin(lin, s),
            Some(false) => prop_lin(&lin.negated(), s),
            None => {
                if entailed(lin, s) {
                    set_lit(*b, true, s)
                } else if entailed(&lin.negated(), s) {
                    set_lit(*b, false, s)
                } else {
                    Ok(())
                }
            }
        },
        Constraint::Implies { b, lin } => match lit_value(*b, s) {
            Some(true) => prop_lin(lin, s),
            Some(false) => Ok(()),
            None => {
                if entailed(&lin.negated(), s) {
                    set_lit(*b, false, s)
                } else {
                    Ok(())
                }
            }
        },
    }
}

fn lit_value(l: Lit, s: &Store) -> Option<bool> {
    s.value(l.var).map(|v| l.eval(v))
}

fn set_lit(l: Lit, val: bool, s: &mut Store) -> PropResult {
    s.fix(l.var, if val == l.pos { 1 } else { 0 })
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

fn clamp64(x: i128) -> i64 {
    x.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

fn term_min(c: i64, x: VarId, s: &Store) -> i128 {
    if c >= 0 {
        c as i128 * s.min(x) as i128
    } else {
        c as i128 * s.max(x) as i128
    }
}

fn term_max(c: i64, x: VarId, s: &Store) -> i128 {
    if c >= 0 {
        c as i128 * s.max(x) as i128
    } else {
        c as i128 * s.min(x) as i128
    }
}

fn prop_lin(l: &Linear, s: &mut Store) -> PropResult {
    prop_linear(&l.terms, l.op, l.rhs, s)
}

/// `Σ c·x ≤ k`, bounds consistent.
fn prop_le(terms: &[(i64, VarId)], k: i128, sign: i64, s: &mut Store) -> PropResult {
    let minsum: i128 = terms.iter().map(|&(c, x)| term_min(sign * c, x, s)).sum();
    if minsum > k {
        return Err(Fail);
    }
    for &(c0, x) in terms {
        let c = sign * c0;
        if c == 0 {
            continue;
        }
        let slack = k - (minsum - term_min(c, x, s));
        if c > 0 {
            s.set_max(x, clamp64(div_floor(slack, c as i128)))?;
        } else {
            s.set_min(x, clamp64(div_ceil(slack, c as i128)))?;
        }
    }
    Ok(())
}

fn prop_linear(terms: &[(i64, VarId)], op: RelOp, rhs: i64, s: &mut Store) -> PropResult {
    let k = rhs as i128;
    match op {
        RelOp::Le => prop_le(terms, k, 1, s),
        RelOp::Lt => prop_le(terms, k - 1, 1, s),
        RelOp::Ge => prop_le(terms, -k, -1, s),
        RelOp::Gt => prop_le(terms, -k - 1, -1, s),
        RelOp::Eq => {
            prop_le(terms, k, 1, s)?;
            prop_le(terms, -k, -1, s)
        }
        RelOp::Ne => {
            let mut free = None;
            let mut sum: i128 = 0;
            for &(c, x) in terms {
                match s.value(x) {
                    Some(v) => sum += c as i128 * v as i128,
                    None if c == 0 => {}
                    None => {
                        if free.is_some() {
                            return Ok(());
                        }
                        free = Some((c, x));
                    }
                }
            }
            match free {
                None if sum == k => Err(Fail),
                None => Ok(()),
                Some((c, x)) => {
                    let r = k - sum;
                    if r % c as i128 == 0 {
                        let v = r / c as i128;
                        if v >= i64::MIN as i128 && v <= i64::MAX as i128 {
                            s.remove(x, v as i64)?;
                        }
                    }
                    Ok(())
                }
            }
        }
    }
}

/// True when every assignment within the current domains satisfies `l`.
pub(crate) fn entailed(l: &Linear, s: &Store) -> bool {
    let k = l.rhs as i128;
    let lo: i128 = l.terms.iter().map(|&(c, x)| term_min(c, x, s)).sum();
    let hi: i128 = l.terms.iter().map(|&(c, x)| term_max(c, x, s)).sum();
    match l.op {
        RelOp::Le => hi <= k,
        RelOp::Lt => hi < k,
        RelOp::Ge => lo >= k,
        RelOp::Gt => lo > k,
        RelOp::Eq => lo == hi && lo == k,
        RelOp::Ne => {
            if k < lo || k > hi {
                return true;
            }
            // With one open term the excluded value is checked exactly.
            let mut free = None;
            let mut sum: i128 = 0;
            for &(c, x) in &l.terms {
                match s.value(x) {
                    Some(v) => sum += c as i128 * v as i128,
                    None if c == 0 => {}
                    None => {
                        if free.is_some() {
                            return false;
                        }
                        free = Some((c, x));
                    }
                }
            }
            match free {
                None => sum != k,
                Some((c, x)) => {
                    let r = k - sum;
                    if r % c as i128 != 0 {
                        return true;
                    }
                    let v = r / c as i128;
                    v < i64::MIN as i128 || v > i64::MAX as i128 || !s.dom(x).contains(v as i64)
                }
            }
        }
    }
}

fn prop_clause(lits: &[Lit], s: &mut Store) -> PropResult {
    let mut open = None;
    for &l in lits {
        match lit_value(l, s) {
            Some(true) => return Ok(()),
            Some(false) => {}
            None => {
                if open.is_some() {
                    return Ok(());
                }
                open = Some(l);
            }
        }
    }
    match open {
        None => Err(Fail),
        Some(l) => set_lit(l, true, s),
    }
}

/// `b ↔ ∧ lits`; with `negate_lits`, each literal is read negated.
fn prop_and_eq(b: Lit, lits: &[Lit], negate_lits: bool, s: &mut Store) -> PropResult {
    let get = |l: Lit| if negate_lits { l.negate() } else { l };
    let mut open = None;
    let mut n_open = 0;
    for &l0 in lits {
        let l = get(l0);
        match lit_value(l, s) {
            Some(true) => {}
            Some(false) => return set_lit(b, false, s),
            None => {
                n_open += 1;
                open = Some(l);
            }
        }
    }
    if n_open == 0 {
        return set_lit(b, true, s);
    }
    match lit_value(b, s) {
        Some(true) => {
            for &l0 in lits {
                set_lit(get(l0), true, s)?;
            }
            Ok(())
        }
        Some(false) if n_open == 1 => set_lit(open.unwrap(), false, s),
        _ => Ok(()),
    }
}

fn prop_arith(op: Arith, x: VarId, y: VarId, z: VarId, s: &mut Store) -> PropResult {
    if matches!(op, Arith::Div | Arith::Mod) {
        s.remove(y, 0)?;
    }
    let (dx, dy) = (s.dom(x).size(), s.dom(y).size());
    if dx.saturating_mul(dy) <= SUPPORT_LIMIT {
        let dz = s.dom(z).clone();
        let mut sx = Vec::new();
        let mut sy = Vec::new();
        let mut sz = Vec::new();
        let ys: Vec<i64> = s.dom(y).iter().collect();
        for a in s.dom(x).iter() {
            let mut any = false;
            for &b in &ys {
                if let Some(r) = op.apply(a, b) {
                    if dz.contains(r) {
                        any = true;
                        sy.push(b);
                        sz.push(r);
                    }
                }
            }
            if any {
                sx.push(a);
            }
        }
        sy.sort_unstable();
        sy.dedup();
        sz.sort_unstable();
        sz.dedup();
        s.keep_values(x, &sx)?;
        s.keep_values(y, &sy)?;
        return s.keep_values(z, &sz);
    }
    match op {
        Arith::Times => times_bounds(x, y, z, s),
        Arith::Div => div_bounds(x, y, z, s),
        Arith::Mod => mod_bounds(x, y, z, s),
    }
}

fn times_bounds(x: VarId, y: VarId, z: VarId, s: &mut Store) -> PropResult {
    let cands = [
        s.min(x) as i128 * s.min(y) as i128,
        s.min(x) as i128 * s.max(y) as i128,
        s.max(x) as i128 * s.min(y) as i128,
        s.max(x) as i128 * s.max(y) as i128,
    ];
    s.set_min(z, clamp64(*cands.iter().min().unwrap()))?;
    s.set_max(z, clamp64(*cands.iter().max().unwrap()))?;
    // With one factor fixed and nonzero the other is bounded by z / factor.
    for (a, b) in [(x, y), (y, x)] {
        if let Some(c) = s.value(a) {
            if c != 0 {
                let (zl, zh) = (s.min(z) as i128, s.max(z) as i128);
                let c = c as i128;
                let (lo, hi) = if c > 0 {
                    (div_ceil(zl, c), div_floor(zh, c))
                } else {
                    (div_ceil(zh, c), div_floor(zl, c))
                };
                s.set_min(b, clamp64(lo))?;
                s.set_max(b, clamp64(hi))?;
            }
        }
    }
    Ok(())
}

fn div_bounds(x: VarId, y: VarId, z: VarId, s: &mut Store) -> PropResult {
    let ax = (s.min(x) as i128).abs().max((s.max(x) as i128).abs());
    s.set_min(z, clamp64(-ax))?;
    s.set_max(z, clamp64(ax))?;
    if let Some(d) = s.value(y) {
        // x ↦ x / d is monotone, so the image of [min x, max x] is an interval.
        let (a, b) = (s.min(x), s.max(x));
        let (qa, qb) = (a / d, b / d);
        s.set_min(z, qa.min(qb))?;
        s.set_max(z, qa.max(qb))?;
        let (zl, zh) = (s.min(z), s.max(z));
        let ok = |v: i64| {
            let q = v / d;
            zl <= q && q <= zh
        };
        let lo = first_true(a, b, |v| if d > 0 { v / d >= zl } else { v / d <= zh });
        let hi = last_true(a, b, |v| if d > 0 { v / d <= zh } else { v / d >= zl });
        match (lo, hi) {
            (Some(lo), Some(hi)) if lo <= hi && ok(lo) && ok(hi) => {
                s.set_min(x, lo)?;
                s.set_max(x, hi)?;
            }
            _ => return Err(Fail),
        }
    }
    Ok(())
}

/// Smallest v in [a, b] with p(v), for p monotone false→true.
fn first_true(a: i64, b: i64, p: impl Fn(i64) -> bool) -> Option<i64> {
    if !p(b) {
        return None;
    }
    let (mut lo, mut hi) = (a as i128, b as i128);
    while lo < hi {
        let mid = div_floor(lo + hi, 2);
        if p(mid as i64) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo as i64)
}

/// Largest v in [a, b] with p(v), for p monotone true→false.
fn last_true(a: i64, b: i64, p: impl Fn(i64) -> bool) -> Option<i64> {
    if !p(a) {
        return None;
    }
    let (mut lo, mut hi) = (a as i128, b as i128);
    while lo < hi {
        let mid = div_floor(lo + hi + 1, 2);
        if p(mid as i64) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Some(lo as i64)
}

fn mod_bounds(x: VarId, y: VarId, z: VarId, s: &mut Store) -> PropResult {
    let ay = (s.min(y) as i128).abs().max((s.max(y) as i128).abs()) - 1;
    let (lo, hi) = if s.min(x) >= 0 {
        (0, ay.min(s.max(x) as i128))
    } else if s.max(x) <= 0 {
        ((-ay).max(s.min(x) as i128), 0)
    } else {
        ((-ay).max(s.min(x) as i128), ay.min(s.max(x) as i128))
    };
    s.set_min(z, clamp64(lo))?;
    s.set_max(z, clamp64(hi))
}

fn prop_abs(x: VarId, z: VarId, s: &mut Store) -> PropResult {
    s.set_min(z, 0)?;
    if s.dom(x).size() <= SUPPORT_LIMIT && s.dom(z).size() <= SUPPORT_LIMIT {
        let dz = s.dom(z).clone();
        let sx: Vec<i64> = s.dom(x).iter().filter(|v| dz.contains(v.abs())).collect();
        let mut sz: Vec<i64> = sx.iter().map(|v| v.abs()).collect();
        sz.sort_unstable();
        sz.dedup();
        s.keep_values(x, &sx)?;
        return s.keep_values(z, &sz);
    }
    let zmax = s.max(z);
    s.set_min(x, -zmax)?;
    s.set_max(x, zmax)?;
    let (a, b) = (s.min(x), s.max(x));
    let (lo, hi) = if a >= 0 {
        (a, b)
    } else if b <= 0 {
        (-b, -a)
    } else {
        (0, (-a).max(b))
    };
    s.set_min(z, lo)?;
    s.set_max(z, hi)
}
