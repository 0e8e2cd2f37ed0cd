//! The type parser on its own: template argument trees, `>>` closing two
//! lists at once, and non-type arguments kept as text.
//!
//! Run with `cargo run --example type_parsing -- 'std::map<int, std::vector<bool>>'`.

use stl_sentry::type_parser::{normalize, parse_type_str, TypeArg, TypeExpr};

fn show(t: &TypeExpr, depth: usize) {
    println!("{:indent$}{}", "", t.qualified_name(), indent = depth * 2);
    for arg in &t.args {
        match arg {
            TypeArg::Type { ty, decoration } if !decoration.is_plain() => {
                println!("{:indent$}({decoration:?})", "", indent = depth * 2 + 2);
                show(ty, depth + 1);
            }
            TypeArg::Type { ty, .. } => show(ty, depth + 1),
            TypeArg::Opaque(text) => println!("{:indent$}[{text}]", "", indent = depth * 2 + 2),
        }
    }
}

fn main() {
    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if inputs.is_empty() {
        vec![
            "std::vector<std::vector<bool>>".to_string(),
            "const std::map<std::string, std::list<Foo*> >".to_string(),
            "std::array<int, 32>".to_string(),
            "std::vector<std::auto_ptr<int> v".to_string(),
        ]
    } else {
        inputs
    };
    for input in inputs {
        println!("{input}");
        match parse_type_str(&input) {
            Ok(t) => {
                println!("  normalized: {}", normalize(&t));
                show(&t, 1);
            }
            Err(e) => println!("  error at {}:{}: {}", e.line, e.col, e.message),
        }
    }
}
