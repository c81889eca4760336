//! Finite-domain constraint engine: interval-set domains, trailed
//! propagation to fixpoint, resumable depth-first labeling and
//! branch-and-bound minimization.

mod constraint;
mod domain;
mod propagators;
mod solver;
mod store;

pub use constraint::{Arith, Constraint, Linear, Lit, RelOp, VarId};
pub use domain::Domain;
pub use solver::{FdError, Limits, NoCheck, NodeCheck, Outcome, Search, Solver, Stats};
