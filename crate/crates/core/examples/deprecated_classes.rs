//! Classes become deprecated by deriving from `Deprecated<Self>`. Every
//! later use is reported, but the class's own definition is not.
//!
//! Run with `cargo run --example deprecated_classes`.

use stl_sentry::engine::analyze;

const SOURCE: &str = r#"
struct DeprecatedClass { };

template <class DEPRECATED>
struct Deprecated
{
  Deprecated()
  {
    warning( DeprecatedClass() );
  }
};

class Foo: public Deprecated<Foo>
{
public:
  Foo( int a, int b) { }
  Foo( const Foo& other );
};

Foo global( 1, 2 );
std::vector<Foo> many;

void use( const Foo& f )
{
  Foo* copy = new Foo( f );
}
"#;

fn main() {
    for d in analyze(SOURCE).diagnostics {
        println!("{}:{}  {}", d.line, d.col, d.message);
    }
}
