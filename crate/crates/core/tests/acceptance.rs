//! Acceptance run: each criterion over at least 200 seeded cases, one
//! PASS/FAIL line per criterion. Set JUNCTIONC_SEED to vary the corpus.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use junctionc::verify::{model_case, run_suite, Suite, SuiteReport, DEFAULT_SEED};

const CASES: usize = 200;

struct Criterion {
    id: usize,
    title: &'static str,
    suite: Suite,
    budget: Option<Duration>,
}

fn summary(r: &SuiteReport) -> String {
    match r.failures.first() {
        None => format!("{} cases", r.cases),
        Some(f) => format!(
            "{} of {} cases failed; case {}: {}",
            r.failures.len(),
            r.cases,
            f.case,
            f.message
        ),
    }
}

fn main() -> ExitCode {
    let seed = std::env::var("JUNCTIONC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let criteria = [
        Criterion {
            id: 1,
            title: "max-weight spanning trees = junction trees",
            suite: Suite::MaxWeightTrees,
            budget: Some(Duration::from_secs(60)),
        },
        Criterion {
            id: 2,
            title: "junction trees share one separator multiset",
            suite: Suite::SeparatorMultisets,
            budget: None,
        },
        Criterion {
            id: 3,
            title: "greedy trees have max weight and min cost (Kruskal and Prim)",
            suite: Suite::CheapestTree,
            budget: None,
        },
        Criterion {
            id: 4,
            title: "propagation matches the joint; calibrated; stable",
            suite: Suite::Propagation,
            budget: Some(Duration::from_secs(120)),
        },
        Criterion {
            id: 5,
            title: "Almond marginals, savings and n-1 storage",
            suite: Suite::Almond,
            budget: None,
        },
        Criterion {
            id: 6,
            title: "four-cycle possibility counterexample, n = 4, 5, 6",
            suite: Suite::CycleCounterexample,
            budget: None,
        },
        Criterion {
            id: 7,
            title: "heuristic triangulation vs exhaustive optimum",
            suite: Suite::Triangulation,
            budget: None,
        },
    ];
    println!("acceptance: seed {seed}");
    let mut all = true;
    for c in &criteria {
        let start = Instant::now();
        let r = run_suite(c.suite, seed, CASES);
        let elapsed = start.elapsed();
        let mut ok = r.passed();
        let mut extra = String::new();
        if let Some(b) = c.budget {
            if elapsed > b {
                ok = false;
                extra = format!("; over the {}s budget", b.as_secs());
            }
        }
        if c.suite == Suite::Almond {
            // the savings clause must not hold vacuously
            let repeated = (0..CASES)
                .filter(|&i| {
                    let (m, _) = model_case(seed, i);
                    let g = m.graph();
                    let t = junctionc::triangulate_heuristic(&g).unwrap();
                    let jg = junctionc::build_junction_graph(
                        &m.universe,
                        junctionc::cliques(&t.graph).unwrap(),
                    )
                    .unwrap();
                    let tree = junctionc::kruskal_min_cost_tree(&jg).unwrap();
                    junctionc::separator_multiset(&tree).max_multiplicity() >= 2
                })
                .count();
            extra.push_str(&format!("; {repeated} with a repeated separator"));
            ok &= repeated > 0;
        }
        if c.suite == Suite::CycleCounterexample {
            for n in &r.notes {
                println!("    {n}");
            }
        }
        all &= ok;
        println!(
            "criterion {} [{}] {}: {} ({:.2?}){extra}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            summary(&r),
            elapsed
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
