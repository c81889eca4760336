//! The benchmark table: instances of the corpus with the expected answer
//! for each plan length, and a runner that checks every plan found.

use crate::frontend::{load_domain, Lang};
use crate::planner::{plan, verify, Answer, Minimality, PlanOptions};
use std::path::Path;
use std::time::Duration;

#[derive(Clone, Debug)]
pub struct BenchCase {
    pub file: &'static str,
    pub lang: Lang,
    pub length: usize,
    /// Whether a plan of exactly this length exists.
    pub expect: bool,
    pub minimality: Minimality,
    /// Wall-clock allowance.
    pub limit: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Plan,
    NoPlan,
    Budget,
    /// A plan was found but the reference semantics rejected it.
    Invalid(String),
    Error(String),
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub case: BenchCase,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

impl BenchRow {
    pub fn matches(&self) -> bool {
        matches!((&self.outcome, self.case.expect), (Outcome::Plan, true) | (Outcome::NoPlan, false))
    }

    /// `file N expected got seconds status`, tab separated.
    pub fn to_line(&self) -> String {
        let yn = |b: bool| if b { "Y" } else { "N" };
        let got = match &self.outcome {
            Outcome::Plan => "Y".to_string(),
            Outcome::NoPlan => "N".to_string(),
            Outcome::Budget => "budget".to_string(),
            Outcome::Invalid(m) => format!("invalid: {m}"),
            Outcome::Error(m) => format!("error: {m}"),
        };
        format!(
            "{}\t{}\t{}\t{}\t{:.3}\t{}",
            self.case.file,
            self.case.length,
            yn(self.case.expect),
            got,
            self.elapsed.as_secs_f64(),
            if self.matches() { "ok" } else { "MISMATCH" }
        )
    }
}

/// Expected answers for the corpus. The multi-valued wolf-goat-cabbage
/// encoding runs with minimality `off`: its static laws only derive
/// `alive eq 0`, and exact minimal closure would also let the other
/// passengers change instead, which admits shorter plans.
pub fn table() -> Vec<BenchCase> {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut out = Vec::new();
    let mut add = |file, lang, lens: &[(usize, bool)], minimality, limit| {
        for &(length, expect) in lens {
            out.push(BenchCase { file, lang, length, expect, minimality, limit });
        }
    };
    use Minimality::{Full, Off};
    let b = Lang::B;
    let mv = Lang::Bmv;
    add("barrels_8_5_3.b.pl", b, &[(6, false), (7, true), (8, true), (9, true)], Full, min(5));
    add("barrels_8_5_3.bmv.pl", mv, &[(6, false), (7, true), (8, true), (9, true)], Full, min(5));
    add("barrels_12_7_5.b.pl", b, &[(10, false), (11, true)], Full, min(10));
    add("barrels_12_7_5.bmv.pl", mv, &[(10, false), (11, true)], Full, min(10));
    add("community_a4.b.pl", b, &[(5, false), (6, true), (7, true)], Full, min(5));
    add("community_a4.bmv.pl", mv, &[(5, false), (6, true), (7, true)], Full, min(5));
    add("wgc.b.pl", b, &[(21, false), (22, false), (23, true)], Full, min(5));
    add("wgc.bmv.pl", mv, &[(21, false), (22, false), (23, true)], Off, min(5));
    add("tile_i1.b.pl", b, &[(9, false), (10, true)], Full, min(15));
    add("tile_i1.bmv.pl", mv, &[(9, false), (10, true)], Full, min(15));
    add("gas_a1.bmv.pl", mv, &[(6, false), (7, true)], Full, min(15));
    add("protein_1x7.bmv.pl", mv, &[(3, true)], Full, min(5));
    out
}

/// Runs one case from the corpus directory `dir`. `limit` overrides the
/// case's allowance.
pub fn run_case(dir: &Path, case: &BenchCase, limit: Option<Duration>) -> BenchRow {
    let start = std::time::Instant::now();
    let outcome = match std::fs::read_to_string(dir.join(case.file)) {
        Err(e) => Outcome::Error(e.to_string()),
        Ok(text) => match load_domain(&text, case.lang) {
            Err(e) => Outcome::Error(e.to_string()),
            Ok(d) => {
                let opts = PlanOptions {
                    minimality: case.minimality,
                    time_limit: Some(limit.unwrap_or(case.limit)),
                    ..PlanOptions::default()
                };
                match plan(&d, case.length, &opts) {
                    Err(e) => Outcome::Error(e.to_string()),
                    Ok(r) => match r.answer {
                        Answer::Plan(t) => match verify(&d, &t) {
                            Ok(()) => Outcome::Plan,
                            Err(m) => Outcome::Invalid(m),
                        },
                        Answer::NoPlan => Outcome::NoPlan,
                        Answer::Unknown => Outcome::Budget,
                    },
                }
            }
        },
    };
    BenchRow { case: case.clone(), outcome, elapsed: start.elapsed() }
}
