//! Silencing intentional uses.
//!
//! `I_KNOW_VECTOR_BOOL` anywhere in a `vector<bool, ...>` argument list
//! marks that type, and a `stl-sentry: believe-me(RULE)` comment marks every
//! match of that rule on its line. A mark on a typedef covers every use of
//! the alias. Deprecated classes cannot be marked away, and a comment that
//! looks like a mark but is malformed gets a note.
//!
//! Run with `cargo run --example believe_me_marks`.

use stl_sentry::engine::analyze;

const SOURCE: &str = r#"
vector<bool, I_KNOW_VECTOR_BOOL> dense;
vector<bool, std::allocator<bool>, I_KNOW_VECTOR_BOOL> also_dense;
std::vector<bool> audited; // stl-sentry: believe-me(VEC_BOOL)
std::vector<std::auto_ptr<int> > legacy; /* stl-sentry: believe-me(COAP) */

typedef std::vector<bool> Bits; // stl-sentry: believe-me(VEC_BOOL)
Bits flags;

std::vector<bool> forgotten;
std::vector<bool> typo; // stl-sentry: believe-me(VECTOR_BOOL)

class Old : public Deprecated<Old> { };
Old o; // stl-sentry: believe-me(DEPRECATED)
"#;

fn main() {
    for d in analyze(SOURCE).diagnostics {
        let state = if d.suppressed {
            format!("suppressed by {}", d.mechanism)
        } else {
            d.severity.to_string()
        };
        println!("{:>2}: {:<12} {}", d.line, d.rule.as_str(), state);
    }
}
