mod common;

use actplan::b::encoder::{encode_problem, encode_step, find_loops, sccs, BOptions, LoopMode};
use actplan::b::{all_states, BDomain, BDyn, BExec, BLit, BStatic, LitSet};
use actplan::frontend::{load_domain, Lang};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn lit(f: usize) -> BLit {
    BLit::new(f, true)
}
fn nlit(f: usize) -> BLit {
    BLit::new(f, false)
}

fn domain(nf: usize, na: usize) -> BDomain {
    BDomain {
        fluent_names: (0..nf)
            .map(|i| ["f", "g", "h", "k", "m"].get(i).map(|s| s.to_string()).unwrap_or(format!("p{i}")))
            .collect(),
        action_names: (0..na).map(|i| format!("a{i}")).collect(),
        n_fluents: nf,
        n_actions: na,
        dynamic: vec![],
        statics: vec![],
        exec: (0..na).map(|a| BExec { action: a, cond: vec![] }).collect(),
        nonexec: vec![],
        initially: vec![],
        goal: vec![],
    }
}

/// f, g, h with `causes(a,f,[])`, `caused([g],h)`, `caused([h],g)`.
fn cyclic_example() -> BDomain {
    let mut d = domain(3, 1);
    d.dynamic.push(BDyn { action: 0, effect: lit(0), pre: vec![] });
    d.statics.push(BStatic { body: vec![lit(1)], head: lit(2) });
    d.statics.push(BStatic { body: vec![lit(2)], head: lit(1) });
    d
}

#[test]
fn closure_examples() {
    let d = cyclic_example();
    let s = LitSet::from_lits(3, [lit(0)]);
    assert_eq!(d.closure(&s), s);
    let mut e = domain(1, 1);
    assert_eq!(e.closure(&LitSet::new(1)), LitSet::new(1));
    e.statics.push(BStatic { body: vec![], head: lit(0) });
    assert_eq!(e.closure(&LitSet::new(1)), LitSet::from_lits(1, [lit(0)]));
}

#[test]
fn direct_effects_examples() {
    let mut d = domain(1, 2);
    d.dynamic.push(BDyn { action: 0, effect: lit(0), pre: vec![] });
    d.dynamic.push(BDyn { action: 0, effect: nlit(0), pre: vec![] });
    let e = d.direct_effects(0, &[false]);
    assert!(e.contains(lit(0)) && e.contains(nlit(0)) && !e.is_consistent());
    assert!(d.direct_effects(1, &[false]).is_empty());
    // Contradictory effects leave no successor.
    assert!(d.successors(&[false], 0, 16).unwrap().is_empty());
    assert!(d.successors(&[true], 0, 16).unwrap().is_empty());
}

#[test]
fn barrels_fill_effects() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/barrels_12_7_5.b.pl")).unwrap();
    let dd = load_domain(&text, Lang::B).unwrap();
    let d = BDomain::from_description(&dd).unwrap();
    let s0 = d.initial_state().unwrap();
    let a = dd.action_id("fill(12, 7)").unwrap();
    let e = d.direct_effects(a, &s0);
    let f = |n: &str| dd.fluent_id(n).unwrap();
    assert!(e.contains(lit(f("cont(12, 5)"))));
    assert!(e.contains(lit(f("cont(7, 7)"))));
    assert!(d.is_executable(a, &s0));
    assert!(d.is_transition(&s0, a, &{
        let mut v = vec![false; d.n_fluents];
        for n in ["cont(12, 5)", "cont(7, 7)", "cont(5, 0)"] {
            v[f(n)] = true;
        }
        v
    }));
}

#[test]
fn executability_examples() {
    let mut d = domain(1, 1);
    assert!(d.is_executable(0, &[false]) && d.is_executable(0, &[true]));
    d.nonexec.push(BExec { action: 0, cond: vec![lit(0)] });
    assert!(!d.is_executable(0, &[true]));
    assert!(d.is_executable(0, &[false]));
    let mut e = domain(2, 1);
    e.exec[0].cond = vec![lit(0), lit(1)];
    assert!(!e.is_executable(0, &[false, false]));
}

#[test]
fn cyclic_successors_exclude_unsupported_loop() {
    let d = cyclic_example();
    let u = [false, false, false];
    assert_eq!(d.successors(&u, 0, 16).unwrap(), vec![vec![true, false, false]]);
}

#[test]
fn no_static_laws_means_at_most_one_successor() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mut d = random_b_domain(&mut rng, 4, 3, 0);
        d.statics.clear();
        for u in all_states(d.n_fluents) {
            for a in 0..d.n_actions {
                assert!(d.successors(&u, a, 16).unwrap().len() <= 1);
            }
        }
    }
}

#[test]
fn enumeration_limit() {
    let d = domain(17, 1);
    assert!(d.successors(&[false; 17], 0, 16).is_err());
}

#[test]
fn loop_examples() {
    let d = cyclic_example();
    let loops = find_loops(&d.dependency_graph(), 100, 10_000);
    assert_eq!(loops.sets(), &[vec![lit(1).idx(), lit(2).idx()]]);
    let mut chain = domain(3, 1);
    chain.statics.push(BStatic { body: vec![lit(0)], head: lit(1) });
    chain.statics.push(BStatic { body: vec![lit(1)], head: lit(2) });
    assert!(find_loops(&chain.dependency_graph(), 100, 10_000).sets().is_empty());
    assert!(find_loops(&domain(3, 1).dependency_graph(), 100, 10_000).sets().is_empty());
    let mut selfloop = domain(1, 1);
    selfloop.statics.push(BStatic { body: vec![lit(0)], head: lit(0) });
    assert_eq!(find_loops(&selfloop.dependency_graph(), 100, 10_000).sets(), &[vec![0]]);
}

#[test]
fn overlapping_cycles_form_a_loop() {
    // f <-> g <-> h: elementary cycles {f,g} and {g,h}, plus their union.
    let mut d = domain(3, 1);
    for (x, y) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
        d.statics.push(BStatic { body: vec![lit(x)], head: lit(y) });
    }
    let loops: BTreeSet<Vec<usize>> = find_loops(&d.dependency_graph(), 100, 10_000).sets().iter().cloned().collect();
    assert_eq!(loops, BTreeSet::from([vec![0, 2], vec![2, 4], vec![0, 2, 4]]));
    // The union matters: from all-false, no action support for g or h.
    d.dynamic.push(BDyn { action: 0, effect: nlit(0), pre: vec![] });
    assert_eq!(oracle_transitions(&d), encoder_transitions(&d, &BOptions::default()));
}

fn brute_loops(g: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let n = g.len();
    let mut out = BTreeSet::new();
    for m in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
        let edge = |a: usize, b: usize| g[a].contains(&b);
        let reach = |rev: bool| {
            let mut seen = vec![set[0]];
            let mut todo = vec![set[0]];
            while let Some(v) = todo.pop() {
                for &w in &set {
                    let e = if rev { edge(w, v) } else { edge(v, w) };
                    if e && !seen.contains(&w) {
                        seen.push(w);
                        todo.push(w);
                    }
                }
            }
            seen.len() == set.len()
        };
        let ok = if set.len() == 1 { edge(set[0], set[0]) } else { reach(false) && reach(true) };
        if ok {
            out.insert(set);
        }
    }
    out
}

#[test]
fn loops_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(1..=8);
        let g: Vec<Vec<usize>> =
            (0..n).map(|_| (0..n).filter(|_| rng.gen_bool(0.3)).collect()).collect();
        let got: BTreeSet<Vec<usize>> = find_loops(&g, 100_000, 10_000_000).sets().iter().cloned().collect();
        assert_eq!(got, brute_loops(&g), "{g:?}");
        let comps = sccs(&g);
        assert_eq!(comps.iter().map(|c| c.len()).sum::<usize>(), n);
    }
}

#[test]
fn loop_cap_reports_overflow() {
    let n = 8;
    let g: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
    assert!(!find_loops(&g, 10, 1_000_000).is_complete());
    assert!(!find_loops(&g, 1_000_000, 20).is_complete());
}

#[test]
fn step_encoding_examples() {
    // Contradictory effects: no solution with the action taken.
    let mut d = domain(1, 1);
    d.dynamic.push(BDyn { action: 0, effect: lit(0), pre: vec![] });
    d.dynamic.push(BDyn { action: 0, effect: nlit(0), pre: vec![] });
    assert!(encoder_transitions(&d, &BOptions::default()).is_empty());
    // No laws: pure inertia.
    let d = domain(3, 1);
    let t = encoder_transitions(&d, &BOptions::default());
    assert_eq!(t.len(), 8);
    assert!(t.iter().all(|(u, _, v)| u == v));
}

#[test]
fn loop_formulae_remove_unsupported_successor() {
    let d = cyclic_example();
    let u = vec![false, false, false];
    let from_u = |opts: &BOptions| -> Vec<Vec<bool>> {
        encoder_transitions(&d, opts).into_iter().filter(|t| t.0 == u).map(|t| t.2).collect()
    };
    let off = BOptions { loops: LoopMode::Off, ..BOptions::default() };
    assert_eq!(from_u(&off), vec![vec![true, false, false], vec![true, true, true]]);
    assert_eq!(from_u(&BOptions::default()), vec![vec![true, false, false]]);
}

#[test]
fn random_domains_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cyclic = 0;
    for i in 0..150 {
        let d = random_b_domain(&mut rng, 5, 3, 4);
        let oracle = oracle_transitions(&d);
        let with = encoder_transitions(&d, &BOptions::default());
        assert_eq!(with, oracle, "domain {i}: {d:?}");
        let without = encoder_transitions(&d, &BOptions { loops: LoopMode::Off, ..BOptions::default() });
        assert!(without.is_superset(&oracle), "domain {i}");
        // Every solution of the weaker encoding is at least closed and
        // contains the closure of effects plus persisting literals.
        for (u, a, v) in &without {
            let lu = LitSet::of_state(u);
            let lv = LitSet::of_state(v);
            assert!(d.closure(&d.direct_effects(*a, u).union(&lu.intersect(&lv))).is_subset(&lv));
        }
        if !find_loops(&d.dependency_graph(), 100, 10_000).sets().is_empty() {
            cyclic += 1;
        }
    }
    assert!(cyclic > 20, "only {cyclic} cyclic domains");
}

#[test]
fn dump_uses_canonical_names() {
    let d = cyclic_example();
    let enc = encode_step(&d, &BOptions { dump: true, ..BOptions::default() });
    let text = enc.model.dump().join("\n");
    assert!(text.contains("F(f,1)"), "{text}");
    assert!(text.contains("A(a0,0)"), "{text}");
    assert!(text.contains("F(neg(g),1)"), "{text}");
}

#[test]
fn initial_state_must_be_determined() {
    let mut d = domain(2, 1);
    d.initially = vec![lit(0)];
    assert!(encode_problem(&d, 1, &BOptions::default()).is_err());
    d.statics.push(BStatic { body: vec![lit(0)], head: nlit(1) });
    assert!(encode_problem(&d, 1, &BOptions::default()).is_ok());
}

proptest! {
    #[test]
    fn closure_is_monotone_extensive_idempotent(seed in any::<u64>(), a in any::<u16>(), b in any::<u16>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_b_domain(&mut rng, 5, 1, 4);
        let n = d.n_fluents;
        let set = |m: u16| LitSet::from_lits(n, (0..2 * n).filter(|i| m >> i & 1 == 1).map(BLit::from_idx));
        let s = set(a);
        let t = s.union(&set(b));
        let cs = d.closure(&s);
        prop_assert!(s.is_subset(&cs));
        prop_assert_eq!(d.closure(&cs), cs.clone());
        prop_assert!(cs.is_subset(&d.closure(&t)));
    }

    #[test]
    fn successors_are_closed_transitions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_b_domain(&mut rng, 4, 2, 4);
        for u in all_states(d.n_fluents).filter(|u| d.is_closed(u)) {
            for a in 0..d.n_actions {
                for v in d.successors(&u, a, 16).unwrap() {
                    prop_assert!(d.is_closed(&v));
                    prop_assert!(d.is_transition(&u, a, &v));
                }
            }
        }
    }
}
