use actplan::frontend::{load_domain, Lang};
use actplan::planner::{plan, Answer, PlanOptions};
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let text = std::fs::read_to_string(&args[1]).unwrap();
    let lang = if args[1].ends_with(".b.pl") { Lang::B } else { Lang::Bmv };
    let d = load_domain(&text, lang).unwrap();
    for n in args[2..].iter().map(|s| s.parse::<usize>().unwrap()) {
        let r = plan(&d, n, &PlanOptions::default()).unwrap();
        let a = match &r.answer { Answer::Plan(_) => "Y", Answer::NoPlan => "N", Answer::Unknown => "?" };
        println!("N={n} {a} nodes={} rejected={} {:?}", r.nodes, r.rejected, r.elapsed);
    }
}
