mod common;

use actplan::bmv::oracle::*;
use actplan::bmv::{clusters, complete, MvState};
use actplan::frontend::*;
use actplan::traj::Trajectory;
use common::mv_oracle_trajectories;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn mv(text: &str) -> DomainDescription {
    load_domain(text, Lang::Bmv).unwrap_or_else(|e| panic!("{e}"))
}

fn st(v: &[i64]) -> MvState {
    complete(v)
}

fn cons(d: &DomainDescription, text: &str) -> Cons {
    // Effects admit every kind of reference.
    let e = mv(&format!("{}\ncauses({}, {text}, true).", d.to_program_text(), d.action_name(0)));
    e.dynamic.last().unwrap().effect.clone()
}

const FGH: &str = "fluent(f,1,5). fluent(g,1,5). fluent(h,1,5). action(a). executable(a, true).";

const NONDET: &str = "fluent(f,1,5). fluent(g,1,5). fluent(h,1,5). action(a).
    causes(a, f eq g+2, [g lt 3]). executable(a, true).
    initially(f eq 1). initially(g eq 1). initially(h eq 1). goal(f eq 5).";

const COUPLED: &str = "fluent(f,0,1). fluent(g,0,1). fluent(h,0,1). action(a).
    executable(a, h eq 0). causes(a, h eq 1, true).
    caused(f eq 1, g eq 1). caused(f eq 0, g eq 0).";

const TEMPORAL: &str = "fluent(f,1,5). fluent(g,1,5). fluent(h,1,5). action(a). action(b).
    executable(a, true). executable(b, true).
    causes(a, g^0 eq g^(-1)+2, true). causes(b, f^0 eq g^(-1)+h^(-2), true).
    initially(f eq 1). initially(g eq 1). initially(h lt 3). goal(f gt 4).";

fn map(pairs: &[(usize, i64)]) -> BTreeMap<usize, i64> {
    pairs.iter().copied().collect()
}

#[test]
fn solutions_are_exactly_the_satisfying_pairs() {
    let d = mv(FGH);
    let c = cons(&d, "f gt g+2");
    let doms: Vec<Vec<i64>> = d.fluents.iter().map(|f| f.dom.clone()).collect();
    let s = solutions(&c, &doms, 1000).unwrap();
    assert_eq!(s, vec![map(&[(0, 4), (1, 1)]), map(&[(0, 5), (1, 1)]), map(&[(0, 5), (1, 2)])]);
    assert!(s.iter().all(|x| !x.contains_key(&2)), "h is not a fluent of the constraint");
    assert!(satisfies(&st(&[5, 2, 1]), &c));
}

#[test]
fn true_has_one_empty_solution() {
    let s = solutions(&Cons::True, &[vec![0, 1]], 10).unwrap();
    assert_eq!(s, vec![BTreeMap::new()]);
}

#[test]
fn solution_budget_is_enforced() {
    let d = mv(FGH);
    let c = cons(&d, "f gt g+2");
    let doms: Vec<Vec<i64>> = d.fluents.iter().map(|f| f.dom.clone()).collect();
    assert!(solutions(&c, &doms, 24).is_err());
}

#[test]
fn undefined_values_prove_nothing() {
    let d = mv(FGH);
    let v: MvState = vec![None, Some(1), Some(1)];
    assert_eq!(eval(&v, &Expr::Bin(BinOp::Add, Box::new(Expr::fluent(0)), Box::new(Expr::Const(1)))), Val::Undef);
    assert!(!satisfies(&v, &cons(&d, "f eq 1")));
    assert!(!satisfies(&v, &cons(&d, "neg(f eq 1)")));
    assert!(!satisfies(&v, &cons(&d, "f neq 1")));
    // Reification is never undefined.
    assert_eq!(eval(&v, &Expr::Rei(Box::new(cons(&d, "f eq 1")))), Val::Def(0));
    assert_eq!(eval(&v, &Expr::Rei(Box::new(cons(&d, "neg(f eq 1)")))), Val::Def(0));
}

#[test]
fn reification_and_division() {
    let d = mv(FGH);
    let v = st(&[4, 2, 1]);
    assert_eq!(eval(&v, &Expr::Rei(Box::new(Cons::eq(Expr::Const(1), Expr::Const(1))))), Val::Def(1));
    assert!(satisfies(&v, &cons(&d, "f/g eq 2")));
    assert!(satisfies(&v, &cons(&d, "f mod 3 eq 1")));
    assert!(satisfies(&v, &cons(&d, "rei(f gt g) + rei(g gt f) eq 1")));
    assert!(satisfies(&v, &cons(&d, "abs(g - f) eq 2")));
    // Division by zero is undefined, so neither polarity holds.
    assert!(!satisfies(&v, &cons(&d, "f/(g-2) eq 0")));
    assert!(!satisfies(&v, &cons(&d, "neg(f/(g-2) eq 0)")));
}

#[test]
fn temporal_references() {
    let d = mv("fluent(f,0,5). fluent(g,0,5). action(a). executable(a,true).");
    let seq = vec![st(&[2, 1]), st(&[1, 2]), st(&[1, 3])];
    assert!(satisfies_at(&seq, 2, &cons(&d, "g eq f^(-1)+f^(-2)")));
    // Past references before the start clamp to the first state.
    assert!(satisfies_at(&seq, 0, &cons(&d, "f eq f^(-1)")));
    assert!(satisfies_at(&seq, 0, &cons(&d, "f^(-3) eq 2")));
    assert!(satisfies_at(&seq, 1, &cons(&d, "g@2 eq 3")));
    assert!(!satisfies_at(&seq, 1, &cons(&d, "g@2 eq 2")));
    // Absolute references outside the sequence hold vacuously.
    assert!(satisfies_at(&seq, 1, &cons(&d, "g@7 eq 2")));
    assert!(satisfies_at(&seq, 1, &cons(&d, "neg(g@7 eq 2)")));
}

#[test]
fn one_solution_with_past_references() {
    let d = mv("fluent(f,1,5). fluent(g,1,5). action(a). executable(a,true).");
    let prefix = vec![st(&[2, 1]), st(&[1, 2])];
    let c = cons(&d, "g^0 eq f^(-1)+f^(-2)");
    let doms: Vec<Vec<i64>> = d.fluents.iter().map(|f| f.dom.clone()).collect();
    let s = i_solutions(&prefix, 3, &c, &doms, 100).unwrap();
    let want: BTreeMap<(usize, i64), i64> = [((1, 0), 3)].into_iter().collect();
    assert_eq!(s, vec![want]);
}

#[test]
fn i_solutions_cover_future_references() {
    let d = mv("fluent(f,0,3). action(a). executable(a,true).");
    let doms = vec![d.fluents[0].dom.clone()];
    let c = cons(&d, "f^1 eq f^0 + 1");
    let s = i_solutions(&[st(&[0])], 3, &c, &doms, 100).unwrap();
    assert_eq!(s.len(), 3);
    // Clamped onto the last layer, both references name one value.
    let s = i_solutions(&[st(&[0])], 1, &c, &doms, 100).unwrap();
    assert!(s.is_empty());
}

#[test]
fn inertia_completion() {
    let v = st(&[1, 1, 1]);
    assert_eq!(ine(&map(&[(0, 5), (1, 2)]), &v), st(&[5, 2, 1]));
    assert_eq!(ine(&BTreeMap::new(), &v), v);
    assert_eq!(ine(&map(&[(0, 3), (1, 3), (2, 3)]), &v), st(&[3, 3, 3]));
}

#[test]
fn delta_and_set_operations() {
    let v = st(&[0, 0, 0]);
    let w = st(&[1, 1, 1]);
    assert_eq!(delta(&v, &w, &[]), w);
    assert_eq!(delta(&v, &w, &[0, 1, 2]), v);
    assert_eq!(delta(&v, &w, &[0, 1]), st(&[0, 0, 1]));
    let p: MvState = vec![Some(1), None, Some(2)];
    let q: MvState = vec![Some(1), Some(4), Some(3)];
    assert_eq!(union(&p, &q), vec![Some(1), Some(4), None]);
    assert_eq!(intersection(&p, &q), vec![Some(1), None, None]);
}

#[test]
fn minimal_closure_prefers_inertia() {
    let d = mv(COUPLED);
    let v = st(&[0, 0, 0]);
    let inertial = [true, true, false];
    assert!(is_minimally_closed(&d, &[v.clone()], &st(&[0, 0, 1]), &inertial).unwrap());
    assert!(!is_minimally_closed(&d, &[v.clone()], &st(&[1, 1, 1]), &inertial).unwrap());
    // Nothing inertial: closedness alone.
    assert!(is_minimally_closed(&d, &[v.clone()], &st(&[1, 1, 1]), &[false; 3]).unwrap());
    assert!(!is_minimally_closed(&d, &[v], &st(&[1, 0, 1]), &[false; 3]).unwrap());
}

#[test]
fn transition_keeps_unaffected_cluster() {
    let d = mv(COUPLED);
    let v = st(&[0, 0, 0]);
    assert!(valid_transition(&d, &v, 0, &st(&[0, 0, 1])).is_ok());
    let err = valid_transition(&d, &v, 0, &st(&[1, 1, 1])).unwrap_err();
    assert!(err.contains("minimally closed"), "{err}");
    assert_eq!(successors(&d, &v, 0, 1000).unwrap(), vec![st(&[0, 0, 1])]);
}

#[test]
fn nondeterministic_effect() {
    let d = mv(NONDET);
    let t = Trajectory { states: vec![vec![1, 1, 1], vec![5, 3, 1]], actions: vec![0] };
    assert_eq!(verify_trajectory(&d, &t), Ok(()));
    let mut succ = successors(&d, &st(&[1, 1, 1]), 0, 1000).unwrap();
    succ.sort();
    let want: Vec<MvState> = (1..=3).map(|g| st(&[g + 2, g, 1])).collect();
    assert_eq!(succ, want);
    let effect = eff(&d, &[st(&[1, 1, 1])], 0, 0);
    assert_eq!(effect, d.dynamic[0].effect);
    assert_eq!(eff(&d, &[st(&[1, 3, 1])], 0, 0), Cons::True);
}

#[test]
fn verification_names_the_broken_condition() {
    let d = mv(NONDET);
    let bad_inertia = Trajectory { states: vec![vec![1, 1, 1], vec![5, 3, 2]], actions: vec![0] };
    assert!(verify_trajectory(&d, &bad_inertia).unwrap_err().contains("minimally closed"));
    let bad_effect = Trajectory { states: vec![vec![1, 1, 1], vec![4, 3, 1]], actions: vec![0] };
    assert!(verify_trajectory(&d, &bad_effect).unwrap_err().contains("effect"));
    let bad_goal = Trajectory { states: vec![vec![1, 1, 1], vec![4, 2, 1]], actions: vec![0] };
    assert!(verify_trajectory(&d, &bad_goal).unwrap_err().contains("goal"));
    let bad_init = Trajectory { states: vec![vec![2, 1, 1]], actions: vec![] };
    assert!(verify_trajectory(&d, &bad_init).unwrap_err().contains("initially"));
    let out_of_dom = Trajectory { states: vec![vec![1, 1, 9]], actions: vec![] };
    assert!(verify_trajectory(&d, &out_of_dom).unwrap_err().contains("domain"));
}

/// All valid trajectories of length `n`, by brute force over extensions.
#[test]
fn past_references_have_one_trajectory() {
    let d = mv(TEMPORAL);
    let want = Trajectory { states: vec![vec![1, 1, 2], vec![1, 3, 2], vec![5, 3, 2]], actions: vec![0, 1] };
    assert_eq!(verify_trajectory(&d, &want), Ok(()));
    assert_eq!(mv_oracle_trajectories(&d, 2), vec![want]);
}

#[test]
fn effect_sequence_yields_the_step_solutions() {
    let d = mv(TEMPORAL);
    let doms: Vec<Vec<i64>> = d.fluents.iter().map(|f| f.dom.clone()).collect();
    let v0 = st(&[1, 1, 2]);
    let e0 = eff_seq(&d, &[v0.clone()], &[0]);
    let s = i_solutions(&[v0.clone()], 2, &e0, &doms, 1 << 16).unwrap();
    assert_eq!(s, vec![[((1, 0), 3)].into_iter().collect()]);
    let v1 = st(&[1, 3, 2]);
    let e1 = eff_seq(&d, &[v0, v1], &[0, 1]);
    let s = i_solutions(&[st(&[1, 1, 2]), st(&[1, 3, 2])], 2, &e1, &doms, 1 << 16).unwrap();
    assert_eq!(s, vec![[((0, 0), 5)].into_iter().collect()]);
}

#[test]
fn delayed_effect_lands_ahead() {
    let d = mv(
        "fluent(b,0,200). action(dep). action(wait). executable(dep,true). executable(wait,true).
         causes(dep, b^2 eq b^(-1)+50, true). initially(b eq 0).",
    );
    let ok = Trajectory { states: vec![vec![0], vec![0], vec![0], vec![50]], actions: vec![0, 1, 1] };
    assert_eq!(verify_trajectory(&d, &ok), Ok(()));
    let early = Trajectory { states: vec![vec![0], vec![50], vec![50], vec![50]], actions: vec![0, 1, 1] };
    assert!(verify_trajectory(&d, &early).is_err());
    // Beyond the last state the reference clamps onto it.
    let clamped = Trajectory { states: vec![vec![0], vec![50]], actions: vec![0] };
    assert_eq!(verify_trajectory(&d, &clamped), Ok(()));
}

#[test]
fn clusters_partition_fluents() {
    let d = mv("fluent(f,0,5). fluent(g,0,5). fluent(h,0,5). fluent(r,0,5). action(a). executable(a,true).
        caused(true, f eq 1). caused(g eq 2, h eq 3). caused(h lt 5, r eq 2).");
    assert_eq!(clusters(&d), vec![vec![0], vec![1, 2, 3]]);
    let d = mv(FGH);
    assert_eq!(clusters(&d), vec![vec![0], vec![1], vec![2]]);
    let d = mv("fluent(f,0,1). fluent(g,0,1). fluent(h,0,1). fluent(k,0,1). action(a). executable(a,true).
        caused(f eq 1, g+h eq 1).");
    assert_eq!(clusters(&d), vec![vec![0, 1, 2], vec![3]]);
}

#[test]
fn assertions_and_costs() {
    let d = mv("fluent(f,0,9). action(a). executable(a, true). causes(a, f eq f^(-1)+1, true).
        initially(f eq 0). always(f lt 3). holds(f eq 1, 1). cost_constraint(plan eq 2).");
    let t = Trajectory { states: vec![vec![0], vec![1], vec![2]], actions: vec![0, 0] };
    assert_eq!(costs(&d, &t).plan, Val::Def(2));
    assert!(check_assertions(&d, &t).iter().all(|x| x.1));
    assert_eq!(verify_trajectory(&d, &t), Ok(()));
    let t3 = Trajectory { states: vec![vec![0], vec![1], vec![2], vec![3]], actions: vec![0, 0, 0] };
    let failed: Vec<String> = check_assertions(&d, &t3).into_iter().filter(|x| !x.1).map(|x| x.0).collect();
    assert_eq!(failed.len(), 2, "{failed:?}");
    assert!(failed[0].starts_with("always"));
    assert!(failed[1].starts_with("cost_constraint"));
}

#[test]
fn default_costs_are_one() {
    let d = mv("fluent(f,0,9). action(a). executable(a, true). causes(a, f eq f^(-1)+1, true).");
    let t = Trajectory { states: (0..8).map(|i| vec![i]).collect(), actions: vec![0; 7] };
    let c = costs(&d, &t);
    assert_eq!(c.plan, Val::Def(7));
    assert!(c.states.iter().all(|&x| x == Val::Def(1)));
}

#[test]
fn state_costs_outside_the_plan_are_zero() {
    let d = mv("fluent(f,0,9). action(a). executable(a, true). state_cost(f+10).
        cost_constraint(state(5) eq 0). cost_constraint(state(1) eq 11). cost_constraint(goal eq 11).");
    let t = Trajectory { states: vec![vec![0], vec![1]], actions: vec![0] };
    assert!(check_assertions(&d, &t).iter().all(|x| x.1), "{:?}", check_assertions(&d, &t));
}

#[test]
fn holds_at_zero_acts_as_initially() {
    let a = mv("fluent(f,0,3). action(a). executable(a,true). holds(f eq 2, 0).");
    let b = mv("fluent(f,0,3). action(a). executable(a,true). initially(f eq 2).");
    assert_eq!(initial_states(&a, 100).unwrap(), initial_states(&b, 100).unwrap());
    assert_eq!(initial_states(&a, 100).unwrap(), vec![st(&[2])]);
}

fn arb_state(n: usize) -> impl Strategy<Value = MvState> {
    proptest::collection::vec(proptest::option::weighted(0.8, 0i64..4), n)
}

proptest! {
    #[test]
    fn ine_is_idempotent(v in arb_state(4), sig in proptest::collection::btree_map(0usize..4, 0i64..4, 0..4)) {
        let once = ine(&sig, &v);
        prop_assert_eq!(ine(&sig, &once), once);
    }

    #[test]
    fn delta_of_equal_states(v in arb_state(4), s in proptest::collection::vec(0usize..4, 0..4)) {
        prop_assert_eq!(delta(&v, &v, &s), v);
    }

    #[test]
    fn without_statics_minimal_closure_is_inertia(
        u in proptest::collection::vec(0i64..3, 3),
        w in proptest::collection::vec(0i64..3, 3),
        inertial in proptest::collection::vec(any::<bool>(), 3),
    ) {
        let d = mv("fluent(f,0,2). fluent(g,0,2). fluent(h,0,2). action(a). executable(a,true).");
        let (u, w) = (st(&u), st(&w));
        let keep: Vec<usize> = (0..3).filter(|&f| inertial[f]).collect();
        let mc = is_minimally_closed(&d, &[u.clone()], &w, &inertial).unwrap();
        prop_assert_eq!(mc, delta(&u, &w, &keep) == w);
    }
}
