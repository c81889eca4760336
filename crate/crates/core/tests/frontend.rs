use actplan::frontend::*;
use proptest::prelude::*;
use std::path::PathBuf;

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn ground_text(text: &str) -> Vec<Fact> {
    ground_program(&parse_program(text).unwrap()).unwrap()
}

#[test]
fn parses_a_fact() {
    let cs = parse_program("barrel(5).").unwrap();
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].head, Term::App("barrel".into(), vec![Term::Int(5)]));
    assert!(cs[0].body.is_empty());
}

#[test]
fn empty_program() {
    assert!(parse_program("").unwrap().is_empty());
    assert!(parse_program("% only a comment\n").unwrap().is_empty());
}

#[test]
fn parses_a_rule_with_operators() {
    let cs = parse_program(
        "causes(fill(X,Y), cont(X) eq 0, [Y-cont(Y) geq cont(X)]) :- action(fill(X,Y)).",
    )
    .unwrap();
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].body.len(), 1);
    let eff = &cs[0].head.args()[1];
    assert_eq!(eff.functor(), Some(("eq", 2)));
}

#[test]
fn syntax_errors_carry_positions() {
    match parse_program("a(1).\nb(2 .").unwrap_err() {
        FrontendError::Syntax { span, .. } => assert_eq!(span.line, 2),
        e => panic!("unexpected {e}"),
    }
    assert!(matches!(parse_program("a(1)"), Err(FrontendError::Syntax { .. })));
}

#[test]
fn nesting_bound() {
    assert!(parse_program("p(a(b(c(d)))).").is_ok());
    assert!(matches!(
        parse_program("p(a(b(c(d(e))))).").unwrap_err(),
        FrontendError::TooDeep { depth: 5, max: 4, .. }
    ));
    // Operators and constraint functors do not count.
    assert!(parse_program("p(q(r(neg(abs(x(1)) + 3 eq 2)))).").is_ok());
}

#[test]
fn grounding_interval() {
    let facts = ground_text("person(X) :- interval(X,1,4).");
    let got: Vec<String> = facts.iter().map(|f| f.atom.to_string()).collect();
    assert_eq!(got, ["person(1)", "person(2)", "person(3)", "person(4)"]);
}

#[test]
fn ground_fact_is_itself() {
    let facts = ground_text("p(a, 3).");
    assert_eq!(facts.len(), 1);
    assert_eq!(facts[0].atom.to_string(), "p(a, 3)");
}

#[test]
fn range_restriction_is_enforced() {
    let cs = parse_program("p(X) :- q(1).").unwrap();
    assert!(matches!(ground_program(&cs), Err(FrontendError::NotRangeRestricted { .. })));
    let cs = parse_program("q(1). p(Y) :- q(X), Y > X.").unwrap();
    assert!(matches!(ground_program(&cs), Err(FrontendError::NotRangeRestricted { .. })));
}

#[test]
fn atom_budget() {
    let cs = parse_program("n(X) :- interval(X,1,1000).").unwrap();
    let cfg = GroundConfig { max_atoms: 100, ..GroundConfig::default() };
    assert!(matches!(ground_program_with(&cs, &cfg), Err(FrontendError::Ground { .. })));
}

#[test]
fn barrels_boolean_has_27_fluents() {
    let facts = ground_text(&corpus("barrels_12_7_5.b.pl"));
    let n = facts.iter().filter(|f| f.atom.functor() == Some(("fluent", 1))).count();
    assert_eq!(n, 6 + 8 + 13);
    let d = extract_domain(&facts, Lang::B).unwrap();
    assert_eq!(d.fluents.len(), 27);
    assert_eq!(d.actions.len(), 6);
    assert!(d.actions.iter().all(|a| a.args()[0] != a.args()[1]));
    assert!(d.fluents.iter().all(|f| f.dom == [0, 1]));
}

#[test]
fn barrels_mv_domains() {
    let d = load_domain(&corpus("barrels_12_7_5.bmv.pl"), Lang::Bmv).unwrap();
    let doms: Vec<(String, i64, i64)> =
        d.fluents.iter().map(|f| (f.name.to_string(), f.dom[0], *f.dom.last().unwrap())).collect();
    assert_eq!(
        doms,
        [("cont(5)".into(), 0, 5), ("cont(7)".into(), 0, 7), ("cont(12)".into(), 0, 12)]
    );
    assert_eq!(d.dynamic.len(), 24);
    assert_eq!(d.statics.len(), 1);
}

#[test]
fn every_corpus_program_loads() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut n = 0;
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().to_string();
        let lang = if name.ends_with(".b.pl") { Lang::B } else { Lang::Bmv };
        let d = load_domain(&std::fs::read_to_string(&p).unwrap(), lang)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!d.fluents.is_empty() && !d.actions.is_empty(), "{name}");
        n += 1;
    }
    assert!(n >= 12);
}

#[test]
fn gas_executability_lists_other_gates() {
    let d = load_domain(&corpus("gas_a1.bmv.pl"), Lang::Bmv).unwrap();
    let a = d.action_id("open(1, 2)").unwrap();
    let law = d.exec.iter().find(|l| l.action == a).unwrap();
    let names = d.fluent_names();
    // gates at 1: (1,7), (1,11) plus itself; gates at 2: (2,3).
    let t = law.cond.to_term(&names).to_string();
    assert_eq!(
        t,
        "[is_open(1, 2) eq 0, is_open(1, 7) eq 0, is_open(1, 11) eq 0, is_open(2, 3) eq 0]"
    );
}

#[test]
fn protein_cost_expression() {
    let d = load_domain(&corpus("protein_1x7.bmv.pl"), Lang::Bmv).unwrap();
    let names = d.fluent_names();
    let fe = d.state_cost.as_ref().unwrap().to_term(&names).to_string();
    // Pairs (1,4), (1,6), (2,5), (2,7), (3,6), (4,7).
    for (i, j) in [(1, 4), (1, 6), (2, 5), (2, 7), (3, 6), (4, 7)] {
        assert!(fe.contains(&format!("type({i}) * type({j})")), "{fe}");
    }
    assert_eq!(fe.matches("rei(").count(), 6);
    assert_eq!(d.always.len(), 4);
}

#[test]
fn missing_executable_is_rejected() {
    let e = load_domain("fluent(f). action(a). causes(a, f, []).", Lang::B).unwrap_err();
    assert!(matches!(e, FrontendError::MissingExecutable { .. }));
}

#[test]
fn extraction_errors() {
    let e = load_domain("fluent(f). action(a). executable(a, [g]).", Lang::B).unwrap_err();
    assert!(matches!(e, FrontendError::UndeclaredFluent { .. }), "{e}");
    let e = load_domain("fluent(f). executable(b, []).", Lang::B).unwrap_err();
    assert!(matches!(e, FrontendError::UndeclaredAction { .. }), "{e}");
    let e = load_domain("fluent(f,3,1).", Lang::Bmv).unwrap_err();
    assert!(matches!(e, FrontendError::EmptyDomain { .. }), "{e}");
    let e = load_domain("fluent(f,0,3).", Lang::B).unwrap_err();
    assert!(matches!(e, FrontendError::NonBoolean { .. }), "{e}");
    let e = load_domain("fluent(f). action(a). executable(a, [f eq 2]).", Lang::B).unwrap_err();
    assert!(matches!(e, FrontendError::NonBoolean { .. }), "{e}");
    let e = load_domain("fluent(f,0,3). action(a). executable(a, [f^1 eq 2]).", Lang::Bmv).unwrap_err();
    assert!(matches!(e, FrontendError::MisplacedAnnotation { .. }), "{e}");
    let e = load_domain("fluent(f,0,3). initially(f eq 7).", Lang::Bmv).unwrap_err();
    assert!(matches!(e, FrontendError::InitiallyOutOfDomain { value: 7, .. }), "{e}");
}

#[test]
fn b_literals_normalize_to_equalities() {
    let d = load_domain(
        "fluent(f). fluent(g). action(a). executable(a, []). causes(a, neg(f), [g]). initially(f).",
        Lang::B,
    )
    .unwrap();
    let names = d.fluent_names();
    assert_eq!(d.dynamic[0].effect.to_term(&names).to_string(), "f eq 0");
    assert_eq!(d.dynamic[0].pre.to_term(&names).to_string(), "g eq 1");
    assert_eq!(d.initially[0].to_term(&names).to_string(), "f eq 1");
}

#[test]
fn duplicate_laws_are_dropped() {
    let d = load_domain(
        "fluent(f). action(a). executable(a, []). executable(a, []). \
         causes(a, f, []). p(1). p(2). causes(a, f, []) :- p(X).",
        Lang::B,
    )
    .unwrap();
    assert_eq!(d.exec.len(), 1);
    assert_eq!(d.dynamic.len(), 1);
}

#[test]
fn grounding_is_idempotent_on_corpus() {
    for name in ["barrels_12_7_5.b.pl", "gas_a1.bmv.pl", "protein_1x7.bmv.pl", "wgc.b.pl"] {
        let facts = ground_text(&corpus(name));
        let again = ground_text(&dump_ground(&facts));
        let a: Vec<&Term> = facts.iter().map(|f| &f.atom).collect();
        let mut b: Vec<&Term> = again.iter().map(|f| &f.atom).collect();
        let mut a2 = a.clone();
        a2.sort();
        b.sort();
        assert_eq!(a2, b, "{name}");
    }
}

#[test]
fn description_text_round_trips() {
    for name in ["barrels_8_5_3.bmv.pl", "gas_a1.bmv.pl", "protein_1x7.bmv.pl", "wgc.bmv.pl"] {
        let d = load_domain(&corpus(name), Lang::Bmv).unwrap();
        let mut e = load_domain(&d.to_program_text(), Lang::Bmv).unwrap();
        strip_spans(&mut e);
        let mut d = d;
        strip_spans(&mut d);
        assert_eq!(d, e, "{name}");
    }
}

fn strip_spans(d: &mut DomainDescription) {
    d.dynamic.iter_mut().for_each(|l| l.span = Span::default());
    d.statics.iter_mut().for_each(|l| l.span = Span::default());
    d.exec.iter_mut().for_each(|l| l.span = Span::default());
    d.nonexec.iter_mut().for_each(|l| l.span = Span::default());
}

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (-50i64..50).prop_map(Term::Int),
        "[A-Z][a-z0-9]{0,2}".prop_map(Term::Var),
        "[a-z][a-z0-9_]{0,3}".prop_map(Term::Atom),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        let ops = prop::sample::select(vec![
            "+", "-", "*", "/", "mod", "eq", "neq", "geq", "lt", "^", "@", "=", "\\=", ">=", "=<",
        ]);
        prop_oneof![
            ("[a-z][a-z0-9]{0,2}", prop::collection::vec(inner.clone(), 1..3))
                .prop_map(|(f, a)| Term::App(f, a)),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Term::List),
            (ops, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Term::App(o.into(), vec![l, r])),
            inner.prop_map(|t| Term::App("-".into(), vec![t])),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(head in arb_term(), body in prop::collection::vec(arb_term(), 0..3)) {
        let head = match head {
            t @ Term::App(..) | t @ Term::Atom(_) => t,
            other => Term::App("p".into(), vec![other]),
        };
        let c = Clause { head, body, span: Span::default() };
        let text = c.to_string();
        let parsed = parse_program_with(&text, usize::MAX).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(parsed.len(), 1);
        prop_assert_eq!(&parsed[0].head, &c.head, "{}", text);
        prop_assert_eq!(&parsed[0].body, &c.body, "{}", text);
    }
}
