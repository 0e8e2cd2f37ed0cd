//! Finds `std::vector<bool>` wherever it appears in a type, including
//! nested inside other containers and behind `new`.
//!
//! Run with `cargo run --example vector_bool`.

use stl_sentry::engine::analyze;

const SOURCE: &str = r#"
std::vector<int> a;
a.push_back( 3 );
int* p = &a[0];

std::vector<bool> b;
b.push_back( true );
bool* q = &b[0];

std::map<std::string, std::vector<bool> > features;
auto* bits = new std::vector<bool>(64);
"#;

fn main() {
    let result = analyze(SOURCE);
    for d in &result.diagnostics {
        println!("line {:>2}, col {:>2}  {:<8} {}", d.line, d.col, d.rule, d.detail);
    }
    println!("{} uses of vector<bool>", result.diagnostics.len());
}
