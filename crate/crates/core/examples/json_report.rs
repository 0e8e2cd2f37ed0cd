//! Producing the machine-readable report and reading it back.
//!
//! Run with `cargo run --example json_report`.

use stl_sentry::engine::{Engine, Run};
use stl_sentry::report::{parse_json, render_json, render_text, TextOptions};

fn main() {
    let engine = Engine::default();
    let run = Run::new(vec![
        engine.analyze_source("flags.cpp", "std::vector<bool> flags;\n"),
        engine.analyze_source(
            "owners.cpp",
            "std::set<std::auto_ptr<int> > owners; // stl-sentry: believe-me(COAP)\n",
        ),
    ]);

    let json = render_json(&run);
    println!("{json}\n");

    let back = parse_json(&json).expect("a report we just wrote");
    assert_eq!(back, run);
    assert_eq!(render_json(&back), json);

    print!("{}", render_text(&back, TextOptions { show_suppressed: true }));
    println!("exit status would be {}", back.summary.exit_code(false));
}
