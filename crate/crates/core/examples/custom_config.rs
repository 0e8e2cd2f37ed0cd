//! Tuning the rules through the JSON config: extra deprecated class names,
//! in-house containers, severity overrides, and strict `std::` matching.
//!
//! Run with `cargo run --example custom_config`.

use stl_sentry::engine::Engine;
use stl_sentry::RuleConfig;

const CONFIG: &str = r#"{
  "rules": {"VEC_BOOL": {"severity": "error"}, "DEPRECATED": {"enabled": true}},
  "deprecated": ["LegacyString"],
  "containers": [{"name": "util::small_vector", "element_positions": [0]}],
  "match_unqualified": false
}"#;

const SOURCE: &str = r#"
LegacyString name;
util::small_vector<std::auto_ptr<Node>, 4> children;
std::vector<bool> mask;
vector<bool> unqualified;
"#;

fn main() {
    let config = RuleConfig::from_json(CONFIG).expect("valid config");
    let result = Engine::new(config).analyze_source("tree.cpp", SOURCE);
    for d in &result.diagnostics {
        println!("{}:{} {:<7} [{}] {}", d.line, d.col, d.severity, d.rule, d.detail);
    }

    match RuleConfig::from_json(r#"{"rules": {"COAP": {"severity": "note"}}}"#) {
        Ok(_) => println!("accepted?"),
        Err(e) => println!("rejected: {e}"),
    }
}
