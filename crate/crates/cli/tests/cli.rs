use std::path::PathBuf;
use std::process::{Command, Output};

use junctionc::model::Model;
use junctionc::oracle::{joint_from_factors, oracle_distribution};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_junctionc"))
        .args(args)
        .env_remove("JUNCTIONC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn compile_chain() {
    let o = run(&[
        "compile",
        data("chain.json").to_str().unwrap(),
        "--emit",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["tree_weight"], 4);
    assert_eq!(r["tree_cost"], 32);
    assert_eq!(r["cliques"].as_array().unwrap().len(), 3);
    assert_eq!(r["fill_ins"].as_array().unwrap().len(), 0);
}

#[test]
fn compile_single_factor() {
    let o = run(&[
        "compile",
        data("single.json").to_str().unwrap(),
        "--emit",
        "json",
    ]);
    let r = json(&o);
    assert_eq!(r["cliques"].as_array().unwrap().len(), 1);
    assert_eq!(r["links"].as_array().unwrap().len(), 0);
}

#[test]
fn optimal_cycle_has_one_fill_in() {
    for objective in ["fill", "weight"] {
        let o = run(&[
            "compile",
            data("cycle4.json").to_str().unwrap(),
            "--optimal",
            "--objective",
            objective,
            "--emit",
            "json",
        ]);
        assert_eq!(json(&o)["fill_ins"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn almond_statistics_are_reported() {
    let o = run(&[
        "compile",
        data("chain.json").to_str().unwrap(),
        "--almond",
        "--emit",
        "json",
    ]);
    let a = &json(&o)["almond"];
    assert_eq!(a["budget"]["marginalizations"], 4);
    for s in a["separator_nodes"].as_array().unwrap() {
        assert_eq!(
            s["stored_tables"],
            s["neighbours"].as_array().unwrap().len() as u64 - 1
        );
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = data("sprinkler.json");
    let args = ["compile", path.to_str().unwrap(), "--almond", "--optimal"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let v = [
        "verify",
        "--suite",
        "almond",
        "--cases",
        "20",
        "--seed",
        "5",
        "--verbose",
    ];
    assert_eq!(run(&v).stdout, run(&v).stdout);
}

#[test]
fn uniform_model_gives_uniform_marginals() {
    let o = run(&[
        "query",
        data("uniform.json").to_str().unwrap(),
        "--emit",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for m in json(&o).as_array().unwrap() {
        let d = m["distribution"].as_array().unwrap();
        for pair in d {
            let p = pair[1].as_f64().unwrap();
            assert!((p - 1.0 / d.len() as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn query_matches_the_oracle() {
    let path = data("chain.json");
    let model: Model = std::fs::read_to_string(&path).unwrap().parse().unwrap();
    let ev = model.parse_evidence(&["A=1", "E=0"]).unwrap();
    let joint = joint_from_factors(&model.universe, &model.factors)
        .unwrap()
        .with_evidence(&ev)
        .unwrap();
    for extra in [None, Some("--almond")] {
        let mut args = vec![
            "query",
            path.to_str().unwrap(),
            "--evidence",
            "A=1",
            "--evidence",
            "E=0",
            "--emit",
            "json",
        ];
        args.extend(extra);
        let out = json(&run(&args));
        for (v, m) in out.as_array().unwrap().iter().enumerate() {
            let want = oracle_distribution(&joint, v).unwrap();
            for (pair, w) in m["distribution"].as_array().unwrap().iter().zip(want) {
                let got = pair[1].as_f64().unwrap();
                assert!(
                    (got - w).abs() <= 1e-9 * w.abs().max(f64::MIN_POSITIVE),
                    "{got} vs {w}"
                );
            }
        }
    }
}

#[test]
fn query_by_label_and_selected_marginal() {
    let o = run(&[
        "query",
        data("sprinkler.json").to_str().unwrap(),
        "--evidence",
        "Wet=wet",
        "--marginal",
        "Rain",
    ]);
    assert_eq!(stdout(&o), "Rain: no=0.292072323 yes=0.707927677\n");
}

#[test]
fn impossible_evidence_exits_4() {
    let o = run(&[
        "query",
        data("sprinkler.json").to_str().unwrap(),
        "--evidence",
        "Sprinkler=off",
        "--evidence",
        "Rain=no",
        "--evidence",
        "Wet=wet",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("impossible evidence"));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let o = run(&["compile", data("bad_syntax.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 7"));
    let missing = run(&["compile", "/nonexistent/model.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn semantic_errors_exit_3_naming_the_field() {
    let o = run(&["compile", data("bad_table.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("factors[0].table"));
    let bad_state = run(&[
        "query",
        data("sprinkler.json").to_str().unwrap(),
        "--evidence",
        "Rain=maybe",
    ]);
    assert_eq!(bad_state.status.code(), Some(3));
}

#[test]
fn disconnected_models_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.json");
    std::fs::write(
        &path,
        r#"{"version": "junctionc/1",
            "variables": [{"name": "A", "states": ["0", "1"]}, {"name": "B", "states": ["0", "1"]}],
            "factors": []}"#,
    )
    .unwrap();
    let o = run(&["compile", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disconnected"));
}

#[test]
fn verify_counterexample_suite_prints_the_tables() {
    let o = run(&["verify", "--suite", "example1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("example1: PASS"));
    assert!(text.contains("Pos'(C,D) local fixpoint [1, 1, 1, 1]"));
    assert!(text.contains("by enumeration [1, 0, 0, 1], junction tree [1, 0, 0, 1]"));
}

#[test]
fn verify_with_zero_cases_passes() {
    let o = run(&["verify", "--suite", "theorem1", "--cases", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "theorem1: PASS (0 cases, seed 24301)\n");
}

#[test]
fn verify_cheapest_tree_suite_with_seed_7() {
    let o = run(&[
        "verify", "--suite", "theorem2", "--seed", "7", "--cases", "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "theorem2: PASS (50 cases, seed 7)\n");
}

#[test]
fn seed_falls_back_to_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_junctionc"))
        .args(["verify", "--suite", "corollary1", "--cases", "3"])
        .env("JUNCTIONC_SEED", "1234")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "corollary1: PASS (3 cases, seed 1234)\n");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        run(&["verify", "--suite", "theorem9"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["compile"]).status.code(), Some(2));
}
