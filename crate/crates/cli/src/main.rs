//! `actplan`: plan, verify and benchmark action descriptions.

use actplan::b::encoder::LoopMode;
use actplan::bench;
use actplan::bmv::explain_clusters;
use actplan::frontend::{dump_ground, ground_program, load_domain, parse_program, DomainDescription, FrontendError, Lang};
use actplan::planner::{plan, verify, Answer, Minimality, Objective, PlanOptions, PlanReport};
use actplan::traj::Trajectory;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "actplan", version, about = "Constraint-based planning for the action languages B and B^MV")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a plan, trying each length of the range in turn.
    Plan(PlanArgs),
    /// Check a trajectory in records format against a domain.
    Verify {
        domain: PathBuf,
        trajectory: PathBuf,
        #[arg(long, value_enum, default_value_t = LangArg::Auto)]
        lang: LangArg,
    },
    /// Run the benchmark table over a corpus directory.
    Bench {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        /// Per-instance limit in seconds, replacing the table's allowance.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Only instances whose file name contains this text.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Parser)]
struct PlanArgs {
    file: PathBuf,
    /// A length `n` or an inclusive range `a..b`.
    #[arg(long, value_parser = parse_lengths)]
    length: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value_t = LangArg::Auto)]
    lang: LangArg,
    #[arg(long, value_enum, default_value_t = MinArg::Full)]
    minimality: MinArg,
    #[arg(long = "loop-formulae", value_enum, default_value_t = LoopArg::Auto)]
    loop_formulae: LoopArg,
    #[arg(long, value_enum)]
    minimize: Option<ObjArg>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print the posted constraints of each length tried.
    #[arg(long)]
    dump_constraints: bool,
    /// Print the grounded program and stop.
    #[arg(long)]
    dump_ground: bool,
    /// Print the static-law clusters and stop.
    #[arg(long)]
    explain_clusters: bool,
    /// Permute the order in which actions are tried.
    #[arg(long)]
    seed: Option<u64>,
    /// Seconds allowed per length.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Reject plans that revisit a state (B^MV).
    #[arg(long)]
    no_loop: bool,
    /// Stream domain changes to stderr as `var=<id> dom=<set> cause=<c>`.
    #[arg(long)]
    trace_propagation: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LangArg {
    Auto,
    B,
    Bmv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MinArg {
    Off,
    Cluster,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum LoopArg {
    On,
    Off,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjArg {
    Plan,
    Goal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

fn parse_lengths(s: &str) -> Result<(usize, usize), String> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("not a length: `{x}`"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            Ok((a, b))
        }
        None => num(s).map(|n| (n, n)),
    }
}

/// Chooses the language from the argument, the file name (`*.b.pl`,
/// `*.bmv.pl`), or else by trying B first.
fn load(path: &Path, lang: LangArg) -> Result<DomainDescription> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let lang = match lang {
        LangArg::B => Lang::B,
        LangArg::Bmv => Lang::Bmv,
        LangArg::Auto if name.contains(".bmv.") => Lang::Bmv,
        LangArg::Auto if name.contains(".b.") => Lang::B,
        LangArg::Auto => match load_domain(&text, Lang::B) {
            Ok(d) => return Ok(d),
            Err(FrontendError::NonBoolean { .. }) => Lang::Bmv,
            Err(e) => bail!("{}: {e}", path.display()),
        },
    };
    load_domain(&text, lang).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn report_line(r: &PlanReport) -> String {
    let status = match r.answer {
        Answer::Plan(_) => "SAT",
        Answer::NoPlan => "UNSAT",
        Answer::Unknown => "BUDGET",
    };
    let cost = r.cost.map(|c| format!(" cost={c}")).unwrap_or_default();
    format!(
        "{status} length={}{cost} nodes={} rejected={} time={:.3}s",
        r.length,
        r.nodes,
        r.rejected,
        r.elapsed.as_secs_f64()
    )
}

fn cmd_plan(a: PlanArgs) -> Result<ExitCode> {
    if a.dump_ground {
        let text = std::fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
        let facts = parse_program(&text).and_then(|c| ground_program(&c)).map_err(|e| anyhow::anyhow!("{e}"))?;
        print!("{}", dump_ground(&facts));
        return Ok(ExitCode::SUCCESS);
    }
    let d = load(&a.file, a.lang)?;
    if a.explain_clusters {
        print!("{}", explain_clusters(&d));
        return Ok(ExitCode::SUCCESS);
    }
    let Some((lo, hi)) = a.length else { bail!("--length is required") };
    let opts = PlanOptions {
        loops: match a.loop_formulae {
            LoopArg::On => LoopMode::On,
            LoopArg::Off => LoopMode::Off,
            LoopArg::Auto => LoopMode::Auto,
        },
        minimality: match a.minimality {
            MinArg::Off => Minimality::Off,
            MinArg::Cluster => Minimality::Cluster,
            MinArg::Full => Minimality::Full,
        },
        minimize: a.minimize.map(|o| match o {
            ObjArg::Plan => Objective::Plan,
            ObjArg::Goal => Objective::Goal,
        }),
        time_limit: a.time_limit.map(Duration::from_secs_f64),
        max_nodes: a.max_nodes,
        no_loop: a.no_loop,
        seed: a.seed,
        dump: a.dump_constraints,
        trace: a.trace_propagation,
    };
    let mut budget_hit = false;
    for n in lo..=hi {
        let r = plan(&d, n, &opts)?;
        if a.dump_constraints {
            println!("% constraints for length {n}");
            r.constraints.iter().for_each(|c| println!("{c}"));
        }
        let line = report_line(&r);
        match &r.answer {
            Answer::Plan(t) => {
                // Every reported plan is checked once more here.
                verify(&d, t).map_err(|m| anyhow::anyhow!("internal error: plan rejected: {m}"))?;
                println!("{line} verified");
                match a.format {
                    Format::Text => print!("{}", t.to_text(&d)),
                    Format::Records => print!("{}", t.to_records(&d)),
                }
                return Ok(ExitCode::SUCCESS);
            }
            Answer::NoPlan => println!("{line}"),
            Answer::Unknown => {
                budget_hit = true;
                println!("{line}");
            }
        }
    }
    Ok(ExitCode::from(if budget_hit { 3 } else { 1 }))
}

fn cmd_verify(domain: &Path, trajectory: &Path, lang: LangArg) -> Result<ExitCode> {
    let d = load(domain, lang)?;
    let text = std::fs::read_to_string(trajectory).with_context(|| format!("reading {}", trajectory.display()))?;
    let t = Trajectory::from_records(&d, &text)?;
    match verify(&d, &t) {
        Ok(()) => {
            println!("valid trajectory of length {}", t.len());
            Ok(ExitCode::SUCCESS)
        }
        Err(m) => {
            println!("invalid: {m}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_bench(corpus: &Path, limit: Option<f64>, only: Option<&str>) -> Result<ExitCode> {
    let mut all_ok = true;
    println!("instance\tN\texpected\tgot\tseconds\tstatus");
    for case in bench::table() {
        if only.is_some_and(|o| !case.file.contains(o)) {
            continue;
        }
        if !corpus.join(case.file).exists() {
            continue;
        }
        let row = bench::run_case(corpus, &case, limit.map(Duration::from_secs_f64));
        all_ok &= row.matches();
        println!("{}", row.to_line());
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Plan(a) => cmd_plan(a),
        Cmd::Verify { domain, trajectory, lang } => cmd_verify(&domain, &trajectory, lang),
        Cmd::Bench { corpus, time_limit, only } => cmd_bench(&corpus, time_limit, only.as_deref()),
    };
    match r {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
