//! Containers of `auto_ptr` are errors; references and pointers to
//! `auto_ptr`, or an `auto_ptr` on its own, are fine.
//!
//! Run with `cargo run --example coap`.

use stl_sentry::engine::analyze;

const SOURCE: &str = r#"
struct Auto_ptr_less
{
  bool operator()( const std::auto_ptr<int>& a,
                   const std::auto_ptr<int>& b )
  {
    return *a < *b;
  }
};

std::vector<std::auto_ptr<int> > v;                     // flagged
std::map<int, std::auto_ptr<Widget> > by_id;            // flagged, value position
std::stack<int, std::deque<std::auto_ptr<int> > > s;    // flagged, underlying container
std::vector<std::auto_ptr<int>*> pointers;              // fine

void f()
{
  std::auto_ptr<int> p( new int( 5 ) );                 // fine
}
"#;

fn main() {
    for d in analyze(SOURCE).diagnostics {
        println!("{}:{} {} ({})\n    {}", d.line, d.col, d.severity, d.detail, d.message);
    }
}
