//! A constraint model with human-readable variable names, shared by the
//! encoders. Every posted constraint can be rendered for `--dump-constraints`.

use crate::fd::{Constraint, Domain, Linear, Lit, RelOp, Solver, VarId};

pub struct Model {
    pub solver: Solver,
    names: Vec<String>,
    log: Option<Vec<String>>,
    one: Option<VarId>,
}

impl Model {
    pub fn new(dump: bool) -> Self {
        Model { solver: Solver::new(), names: Vec::new(), log: dump.then(Vec::new), one: None }
    }

    fn named(&mut self, v: VarId, name: String) -> VarId {
        if self.names.len() <= v.idx() {
            self.names.resize(v.idx() + 1, String::new());
        }
        self.names[v.idx()] = name;
        v
    }

    pub fn bool_var(&mut self, name: impl Into<String>) -> VarId {
        let v = self.solver.new_bool();
        self.named(v, name.into())
    }

    /// A variable over `dom`; an empty domain makes the model unsatisfiable.
    pub fn var(&mut self, dom: Domain, name: impl Into<String>) -> VarId {
        let v = match self.solver.new_var(dom) {
            Ok(v) => v,
            Err(_) => {
                let v = self.solver.new_bool();
                self.post(Constraint::Clause(vec![]));
                v
            }
        };
        self.named(v, name.into())
    }

    pub fn constant(&mut self, c: i64) -> VarId {
        let v = self.solver.constant(c);
        self.named(v, c.to_string())
    }

    pub fn true_lit(&mut self) -> Lit {
        let one = match self.one {
            Some(v) => v,
            None => {
                let v = self.solver.constant(1);
                self.one = Some(v);
                self.named(v, "true".into())
            }
        };
        Lit::pos(one)
    }

    pub fn false_lit(&mut self) -> Lit {
        self.true_lit().negate()
    }

    pub fn post(&mut self, c: Constraint) {
        if self.log.is_some() {
            let s = self.render(&c);
            self.log.as_mut().unwrap().push(s);
        }
        self.solver.post(c);
    }

    pub fn fix(&mut self, v: VarId, val: i64) {
        self.post(Constraint::Linear(Linear::new(vec![(1, v)], RelOp::Eq, val)));
    }

    /// `b ↔ ∧ lits`, reusing trivial cases.
    pub fn and_lit(&mut self, lits: Vec<Lit>, name: impl FnOnce() -> String) -> Lit {
        let t = self.true_lit();
        if lits.contains(&t.negate()) {
            return t.negate();
        }
        let mut lits: Vec<Lit> = lits.into_iter().filter(|&l| l != t).collect();
        lits.dedup();
        match lits.len() {
            0 => self.true_lit(),
            1 => lits[0],
            _ => {
                let b = Lit::pos(self.bool_var(name()));
                self.post(Constraint::AndEq { b, lits });
                b
            }
        }
    }

    /// `b ↔ ∨ lits`, reusing trivial cases.
    pub fn or_lit(&mut self, lits: Vec<Lit>, name: impl FnOnce() -> String) -> Lit {
        let t = self.true_lit();
        if lits.contains(&t) {
            return t;
        }
        let mut lits: Vec<Lit> = lits.into_iter().filter(|&l| l != t.negate()).collect();
        lits.dedup();
        match lits.len() {
            0 => self.false_lit(),
            1 => lits[0],
            _ => {
                let b = Lit::pos(self.bool_var(name()));
                self.post(Constraint::OrEq { b, lits });
                b
            }
        }
    }

    pub fn name(&self, v: VarId) -> String {
        match self.names.get(v.idx()) {
            Some(n) if !n.is_empty() => n.clone(),
            _ => v.to_string(),
        }
    }

    /// The constraint's text with variable ids replaced by names.
    pub fn render(&self, c: &Constraint) -> String {
        let raw = c.to_string();
        let mut out = String::with_capacity(raw.len());
        let b = raw.as_bytes();
        let mut i = 0;
        while i < b.len() {
            // `!F(f,i)` reads as the complementary literal `F(neg(f),i)`.
            if b[i] == b'!' && i + 2 < b.len() && b[i + 1] == b'x' && b[i + 2].is_ascii_digit() {
                let mut j = i + 2;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                let name = self.name(VarId(raw[i + 2..j].parse().unwrap()));
                match (name.strip_prefix("F("), name.rfind(',')) {
                    (Some(_), Some(k)) if name.ends_with(')') => {
                        out.push_str(&format!("F(neg({}){}", &name[2..k], &name[k..]));
                    }
                    _ => {
                        out.push('!');
                        out.push_str(&name);
                    }
                }
                i = j;
                continue;
            }
            let boundary = i == 0 || !(b[i - 1].is_ascii_alphanumeric() || b[i - 1] == b'_');
            if boundary && b[i] == b'x' && i + 1 < b.len() && b[i + 1].is_ascii_digit() {
                let mut j = i + 1;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                let id: u32 = raw[i + 1..j].parse().unwrap();
                out.push_str(&self.name(VarId(id)));
                i = j;
            } else {
                out.push(b[i] as char);
                i += 1;
            }
        }
        out
    }

    pub fn dump(&self) -> &[String] {
        self.log.as_deref().unwrap_or(&[])
    }
}
