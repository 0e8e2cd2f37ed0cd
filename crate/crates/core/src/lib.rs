//! A linter for three classic STL pitfalls in C++ sources.
//!
//! * `VEC_BOOL`: uses of `std::vector<bool>`, which is a packed
//!   specialization rather than a container of `bool`.
//! * `COAP`: standard containers holding `std::auto_ptr` elements.
//! * `DEPRECATED`: uses of classes that derive from `Deprecated<Self>`, or
//!   that are listed as deprecated in the config.
//!
//! Intentional uses can be marked with `I_KNOW_VECTOR_BOOL` as a template
//! argument, or with a comment on the same line:
//!
//! ```
//! use stl_sentry::engine::{analyze, Code};
//!
//! let r = analyze("std::vector<bool> a;\nstd::vector<bool> b; // stl-sentry: believe-me(VEC_BOOL)\n");
//! let live: Vec<_> = r.diagnostics.iter().filter(|d| !d.suppressed).collect();
//! assert_eq!(live.len(), 1);
//! assert_eq!(live[0].rule, Code::VecBool);
//! assert_eq!(live[0].line, 1);
//! ```

pub mod cli;
pub mod config;
pub mod engine;
pub mod lexer;
pub mod report;
pub mod rules;
pub mod scanner;
pub mod suppression;
pub mod type_parser;

pub use config::{RuleConfig, Severity};
pub use engine::{analyze, Code, Diagnostic, Engine, FileResult, Run, Summary};
pub use rules::RuleId;
