use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actplan")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn range_stops_at_first_plan() {
    let f = corpus("barrels_8_5_3.bmv.pl");
    let o = run(&["plan", f.to_str().unwrap(), "--length", "6..7"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.contains("UNSAT length=6"), "{out}");
    assert!(out.contains("SAT length=7") && out.contains("verified"), "{out}");
    assert!(out.contains("final state:"), "{out}");
}

#[test]
fn no_plan_exits_with_one() {
    let f = corpus("community_a4.bmv.pl");
    let o = run(&["plan", f.to_str().unwrap(), "--length", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("UNSAT length=5"));
}

#[test]
fn gas_diffusion_answers() {
    let f = corpus("gas_a1.bmv.pl");
    let o = run(&["plan", f.to_str().unwrap(), "--length", "6..7"]);
    let out = stdout(&o);
    assert!(out.contains("UNSAT length=6") && out.contains("SAT length=7"), "{out}");
}

#[test]
fn records_round_trip_and_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let f = corpus("wgc.b.pl");
    let o = run(&["plan", f.to_str().unwrap(), "--length", "23", "--format", "records"]);
    let out = stdout(&o);
    let records: String = out.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let good = write(dir.path(), "good.rec", &records);
    let v = run(&["verify", f.to_str().unwrap(), &good]);
    assert!(v.status.success(), "{}", stdout(&v));
    // Flip an inert fluent in the third state.
    let mut lines: Vec<String> = records.lines().map(String::from).collect();
    let k = lines.iter().position(|l| l.starts_with("state 2 ")).unwrap();
    lines[k] = lines[k].replace("boat_at(right)=0", "boat_at(right)=1");
    let bad = write(dir.path(), "bad.rec", &(lines.join("\n") + "\n"));
    let v = run(&["verify", f.to_str().unwrap(), &bad]);
    assert_eq!(v.status.code(), Some(1));
    let msg = stdout(&v);
    assert!(msg.contains("step 2") || msg.contains("state 2"), "{msg}");
}

#[test]
fn verify_accepts_a_hand_written_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "nondet.bmv.pl",
        "fluent(f,1,5). fluent(g,1,5). fluent(h,1,5). action(a).
         causes(a, f eq g+2, [g lt 3]). executable(a, true).
         initially(f eq 1). initially(g eq 1). initially(h eq 1). goal(f eq 5).",
    );
    let t = write(dir.path(), "t.rec", "state 0 f=1 g=1 h=1\naction 0 a\nstate 1 f=5 g=3 h=1\n");
    assert!(run(&["verify", &d, &t]).status.success());
    let t = write(dir.path(), "u.rec", "state 0 f=1 g=1 h=1\naction 0 a\nstate 1 f=5 g=3 h=2\n");
    assert_eq!(run(&["verify", &d, &t]).status.code(), Some(1));
}

#[test]
fn minimize_prefers_cheap_action() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "toy.bmv.pl",
        "fluent(f,0,1). action(a). action(b). executable(a, true). executable(b, true).
         causes(a, f eq 1, true). causes(b, f eq 1, true).
         action_cost(a, 5). action_cost(b, 1). initially(f eq 0). goal(f eq 1).",
    );
    let o = run(&["plan", &d, "--length", "1", "--minimize", "plan"]);
    let out = stdout(&o);
    assert!(out.contains("cost=1") && out.contains("1: b"), "{out}");
}

#[test]
fn diagnostics_outputs() {
    let f = corpus("barrels_8_5_3.bmv.pl");
    let f = f.to_str().unwrap();
    let o = run(&["plan", f, "--explain-clusters"]);
    assert!(stdout(&o).contains("laws=1"), "{}", stdout(&o));
    let o = run(&["plan", f, "--dump-ground"]);
    assert!(stdout(&o).contains("fluent(cont(8), 0, 8)."), "{}", stdout(&o));
    let o = run(&["plan", f, "--length", "1", "--dump-constraints"]);
    assert!(stdout(&o).contains("F(cont(8),1)"), "{}", stdout(&o));
    let o = run(&["plan", f, "--length", "1", "--trace-propagation"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().any(|l| l.starts_with("var=") && l.contains(" dom=") && l.contains(" cause=")), "{err}");
}

#[test]
fn seeded_runs_are_reproducible() {
    let f = corpus("community_a4.b.pl");
    let a = run(&["plan", f.to_str().unwrap(), "--length", "6", "--seed", "7"]);
    let b = run(&["plan", f.to_str().unwrap(), "--length", "6", "--seed", "7"]);
    assert!(a.status.success());
    let plan = |o: &Output| stdout(o).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(plan(&a), plan(&b));
}

#[test]
fn bad_arguments_are_reported() {
    let f = corpus("wgc.b.pl");
    assert_eq!(run(&["plan", f.to_str().unwrap(), "--length", "5..2"]).status.code(), Some(2));
    assert_eq!(run(&["plan", "/nonexistent.pl", "--length", "1"]).status.code(), Some(2));
}

#[test]
fn bench_handles_empty_and_broken_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    let o = run(&["bench", "--corpus", p]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1, "header only");
    write(dir.path(), "gas_a1.bmv.pl", "fluent(oops");
    let o = run(&["bench", "--corpus", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("error:"), "{}", stdout(&o));
}
