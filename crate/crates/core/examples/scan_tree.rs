//! Checks every C++ source under a directory, the way the command-line
//! tool does, and prints a per-file tally.
//!
//! Run with `cargo run --example scan_tree -- path/to/src`.

use std::path::PathBuf;

use stl_sentry::cli::collect_inputs;
use stl_sentry::engine::Engine;

fn main() {
    let root = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures")));
    let inputs = match collect_inputs(&[root]) {
        Ok(inputs) => inputs,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    };
    let run = match Engine::default().analyze_paths(&inputs) {
        Ok(run) => run,
        Err((path, e)) => {
            eprintln!("{}: {e}", path.display());
            std::process::exit(3);
        }
    };
    for file in &run.files {
        let live = file.diagnostics.iter().filter(|d| !d.suppressed).count();
        println!("{:>3} live {:>3} total  {}", live, file.diagnostics.len(), file.path);
    }
    let s = run.summary;
    println!("{} warnings, {} errors, {} suppressed in {} files", s.warnings, s.errors, s.suppressed, s.files);
}
