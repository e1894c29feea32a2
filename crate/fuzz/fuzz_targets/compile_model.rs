#![no_main]

use junctionc::compile::{compile_graph, CompileOptions};
use junctionc::model::Model;
use junctionc::Evidence;
use libfuzzer_sys::fuzz_target;

// keeps allocations small; larger models are valid but slow to fuzz
const MAX_TABLE: u64 = 1 << 16;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(model) = text.parse::<Model>() else {
        return;
    };
    if model.universe.len() > 24 {
        return;
    }
    for almond in [false, true] {
        let options = CompileOptions {
            almond,
            ..Default::default()
        };
        let Ok(c) = compile_graph(&model.markov_graph(), options) else {
            return;
        };
        if c.tree.cliques.iter().any(|k| k.table_size > MAX_TABLE) {
            return;
        }
        let vars: Vec<usize> = (0..model.universe.len()).collect();
        if let Ok(dists) = c.infer(&model.universe, &model.factors, &Evidence::new(), &vars) {
            for d in dists {
                let total: f64 = d.iter().sum();
                assert!(d.iter().all(|p| p.is_finite() && *p >= 0.0));
                assert!((total - 1.0).abs() < 1e-6);
            }
        }
    }
});
