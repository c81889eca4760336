//! Grounded action theories.

use super::ast::{ActionId, Cons, Expr, FluentId};
use super::term::{Clause, Span, Term};
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lang {
    B,
    Bmv,
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lang::B => "b",
            Lang::Bmv => "bmv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fluent {
    pub name: Term,
    /// Sorted, non-empty.
    pub dom: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynLaw {
    pub action: ActionId,
    pub effect: Cons,
    pub pre: Cons,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticLaw {
    pub cond: Cons,
    pub head: Cons,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecLaw {
    pub action: ActionId,
    pub cond: Cons,
    pub span: Span,
}

/// A grounded planning problem. In B mode every fluent ranges over
/// `{0,1}` and every constraint is a conjunction of `f = 1` / `f = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainDescription {
    pub lang: Lang,
    pub fluents: Vec<Fluent>,
    pub actions: Vec<Term>,
    pub dynamic: Vec<DynLaw>,
    pub statics: Vec<StaticLaw>,
    pub exec: Vec<ExecLaw>,
    pub nonexec: Vec<ExecLaw>,
    pub initially: Vec<Cons>,
    pub goal: Vec<Cons>,
    /// `holds(C, n)`.
    pub holds: Vec<(Cons, i64)>,
    pub always: Vec<Cons>,
    pub time_constraints: Vec<Cons>,
    pub action_costs: Vec<(ActionId, Expr)>,
    pub state_cost: Option<Expr>,
    pub cost_constraints: Vec<Cons>,
    pub minimize: Option<Expr>,
}

impl DomainDescription {
    pub fn empty(lang: Lang) -> Self {
        DomainDescription {
            lang,
            fluents: Vec::new(),
            actions: Vec::new(),
            dynamic: Vec::new(),
            statics: Vec::new(),
            exec: Vec::new(),
            nonexec: Vec::new(),
            initially: Vec::new(),
            goal: Vec::new(),
            holds: Vec::new(),
            always: Vec::new(),
            time_constraints: Vec::new(),
            action_costs: Vec::new(),
            state_cost: None,
            cost_constraints: Vec::new(),
            minimize: None,
        }
    }

    pub fn fluent_names(&self) -> Vec<Term> {
        self.fluents.iter().map(|f| f.name.clone()).collect()
    }

    pub fn fluent_index(&self) -> HashMap<Term, FluentId> {
        self.fluents.iter().enumerate().map(|(i, f)| (f.name.clone(), i)).collect()
    }

    pub fn fluent_id(&self, name: &str) -> Option<FluentId> {
        self.fluents.iter().position(|f| f.name.to_string() == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.to_string() == name)
    }

    pub fn action_name(&self, a: ActionId) -> String {
        self.actions[a].to_string()
    }

    pub fn fluent_name(&self, f: FluentId) -> String {
        self.fluents[f].name.to_string()
    }

    pub fn has_cost_info(&self) -> bool {
        !self.action_costs.is_empty()
            || self.state_cost.is_some()
            || !self.cost_constraints.is_empty()
            || self.minimize.is_some()
    }

    /// Cost expression of an action (default 1).
    pub fn action_cost(&self, a: ActionId) -> Expr {
        self.action_costs.iter().find(|c| c.0 == a).map(|c| c.1.clone()).unwrap_or(Expr::Const(1))
    }

    /// The theory as B^MV clauses; `extract_domain` on the grounded text
    /// reproduces it (in B^MV mode).
    pub fn to_clauses(&self) -> Vec<Clause> {
        let names = self.fluent_names();
        let mut out = Vec::new();
        let mut fact = |name: &str, args: Vec<Term>| {
            out.push(Clause { head: Term::app(name, args), body: Vec::new(), span: Span::default() })
        };
        for fl in &self.fluents {
            let lo = fl.dom[0];
            let hi = *fl.dom.last().unwrap();
            if fl.dom.len() as i64 == hi - lo + 1 {
                fact("fluent", vec![fl.name.clone(), Term::Int(lo), Term::Int(hi)]);
            } else {
                fact("fluent", vec![fl.name.clone(), Term::List(fl.dom.iter().map(|&v| Term::Int(v)).collect())]);
            }
        }
        for a in &self.actions {
            fact("action", vec![a.clone()]);
        }
        for l in &self.exec {
            fact("executable", vec![self.actions[l.action].clone(), l.cond.to_term(&names)]);
        }
        for l in &self.nonexec {
            fact("nonexecutable", vec![self.actions[l.action].clone(), l.cond.to_term(&names)]);
        }
        for l in &self.dynamic {
            fact(
                "causes",
                vec![self.actions[l.action].clone(), l.effect.to_term(&names), l.pre.to_term(&names)],
            );
        }
        for l in &self.statics {
            fact("caused", vec![l.cond.to_term(&names), l.head.to_term(&names)]);
        }
        for c in &self.initially {
            fact("initially", vec![c.to_term(&names)]);
        }
        for c in &self.goal {
            fact("goal", vec![c.to_term(&names)]);
        }
        for (c, n) in &self.holds {
            fact("holds", vec![c.to_term(&names), Term::Int(*n)]);
        }
        for c in &self.always {
            fact("always", vec![c.to_term(&names)]);
        }
        for c in &self.time_constraints {
            fact("time_constraint", vec![c.to_term(&names)]);
        }
        for (a, e) in &self.action_costs {
            fact("action_cost", vec![self.actions[*a].clone(), e.to_term(&names)]);
        }
        if let Some(e) = &self.state_cost {
            fact("state_cost", vec![e.to_term(&names)]);
        }
        for c in &self.cost_constraints {
            fact("cost_constraint", vec![c.to_term(&names)]);
        }
        if let Some(e) = &self.minimize {
            fact("minimize_cost", vec![e.to_term(&names)]);
        }
        out
    }

    pub fn to_program_text(&self) -> String {
        let mut s = String::new();
        for c in self.to_clauses() {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}
