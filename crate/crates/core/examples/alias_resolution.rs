//! `typedef` and `using` aliases are expanded at each use, so a
//! `vector<bool>` hidden behind two typedefs is still found at the line
//! that uses it. Cycles are reported instead of expanded.
//!
//! Run with `cargo run --example alias_resolution`.

use stl_sentry::lexer::tokenize;
use stl_sentry::scanner::{extract_sites, resolve_aliases};
use stl_sentry::type_parser::normalize;

const SOURCE: &str = r#"
typedef std::vector<bool> Flags;
typedef Flags FlagSet;
using Owners = std::list<std::auto_ptr<Owner> >;
namespace cfg { typedef std::map<int, FlagSet> Table; }

FlagSet enabled;
Owners owners;
cfg::Table table;

typedef Loop2 Loop1;
typedef Loop1 Loop2;
Loop1 spin;
"#;

fn main() {
    let lexed = tokenize(SOURCE);
    let extraction = extract_sites(&lexed.tokens);
    println!("aliases: {}", extraction.aliases.names().collect::<Vec<_>>().join(", "));
    let before = extraction.sites.clone();
    let after = resolve_aliases(extraction.sites, &extraction.aliases);
    for (b, a) in before.iter().zip(&after) {
        println!("{:>2}: {:<14} {:<22} => {}", b.line, b.kind.to_string(), normalize(&b.ty), normalize(&a.ty));
        for note in &a.notes {
            println!("    note: {note}");
        }
    }
}
