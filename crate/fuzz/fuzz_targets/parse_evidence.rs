#![no_main]

use std::sync::OnceLock;

use junctionc::model::Model;
use libfuzzer_sys::fuzz_target;

const MODEL: &str = r#"{
  "version": "junctionc/1",
  "variables": [
    {"name": "Rain", "states": ["no", "yes"]},
    {"name": "Wet", "states": ["dry", "wet", "soaked"]}
  ],
  "factors": [
    {"scope": ["Rain", "Wet"], "table": [0.7, 0.2, 0.1, 0.1, 0.3, 0.6], "ordering": "sorted-scope, last-fastest"}
  ]
}"#;

static M: OnceLock<Model> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    let model = M.get_or_init(|| MODEL.parse().expect("built-in model is valid"));
    if let Ok(text) = std::str::from_utf8(data) {
        let items: Vec<&str> = text.lines().collect();
        if let Ok(ev) = model.parse_evidence(&items) {
            assert!(ev.len() <= model.universe.len());
        }
    }
});
