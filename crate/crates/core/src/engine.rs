//! The per-file pipeline and multi-file runs.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RuleConfig, Severity};
use crate::lexer::{tokenize, TokenKind};
use crate::rules::{exclude_own_definition, match_all, RuleContext, RuleId, RuleMatch};
use crate::scanner::{extract_sites, resolve_aliases, DeprecatedSet, UseSite};
use crate::suppression::{is_suppressed, parse_mark, Mechanism};
use crate::type_parser::normalize;

/// What a diagnostic is about: one of the rules, or a remark from the
/// tool itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Code {
    #[serde(rename = "VEC_BOOL")]
    VecBool,
    #[serde(rename = "COAP")]
    Coap,
    #[serde(rename = "DEPRECATED")]
    Deprecated,
    /// A comment that starts like a believe-me mark but is not one.
    #[serde(rename = "MARK_SYNTAX")]
    MarkSyntax,
    /// An alias that could not be expanded.
    #[serde(rename = "ALIAS")]
    Alias,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::VecBool => "VEC_BOOL",
            Code::Coap => "COAP",
            Code::Deprecated => "DEPRECATED",
            Code::MarkSyntax => "MARK_SYNTAX",
            Code::Alias => "ALIAS",
        }
    }

    pub fn rule(self) -> Option<RuleId> {
        match self {
            Code::VecBool => Some(RuleId::VecBool),
            Code::Coap => Some(RuleId::Coap),
            Code::Deprecated => Some(RuleId::Deprecated),
            Code::MarkSyntax | Code::Alias => None,
        }
    }
}

impl From<RuleId> for Code {
    fn from(r: RuleId) -> Self {
        match r {
            RuleId::VecBool => Code::VecBool,
            RuleId::Coap => Code::Coap,
            RuleId::Deprecated => Code::Deprecated,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostic {
    pub rule: Code,
    pub severity: Severity,
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub message: String,
    pub suppressed: bool,
    pub mechanism: Mechanism,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseProblem {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileResult {
    pub path: String,
    pub diagnostics: Vec<Diagnostic>,
    pub parse_errors: Vec<ParseProblem>,
}

pub const VEC_BOOL_MESSAGE: &str = "VECTOR_BOOL_IS_IN_USE: std::vector<bool> is a specialized container, not an instantiation of the primary vector template";

fn message_for(m: &RuleMatch, site: &UseSite) -> String {
    match m.rule {
        RuleId::VecBool => VEC_BOOL_MESSAGE.to_string(),
        RuleId::Coap => {
            let container = site.ty.at_path(&m.path).map_or_else(|| normalize(&site.ty), normalize);
            format!("container of auto_ptr '{container}' has incomplete type and cannot be defined")
        }
        RuleId::Deprecated => {
            let class = site
                .ty
                .at_path(&m.path)
                .map_or("", |t| t.final_segment())
                .to_string();
            format!("DeprecatedClass: use of deprecated class '{class}' [with DEPRECATED = {class}]")
        }
    }
}

/// Runs the analysis configured by a [`RuleConfig`].
#[derive(Debug, Clone)]
pub struct Engine {
    config: RuleConfig,
    context: RuleContext,
    seed: DeprecatedSet,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(RuleConfig::default())
    }
}

impl Engine {
    pub fn new(config: RuleConfig) -> Self {
        let context = config.rule_context();
        let seed = config.deprecated_seed();
        Engine {
            config,
            context,
            seed,
        }
    }

    pub fn config(&self) -> &RuleConfig {
        &self.config
    }

    /// Lexes, scans, resolves aliases, matches and applies suppression for
    /// one file. Diagnostics come back ordered by line, column and code.
    pub fn analyze_source(&self, path: &str, source: &str) -> FileResult {
        let lexed = tokenize(source);
        let extraction = extract_sites(&lexed.tokens);

        let mut parse_errors: Vec<ParseProblem> = lexed
            .errors
            .iter()
            .map(|e| ParseProblem {
                line: e.line,
                col: e.col,
                message: e.message.clone(),
            })
            .chain(extraction.errors.iter().map(|e| ParseProblem {
                line: e.line,
                col: e.col,
                message: e.message.clone(),
            }))
            .collect();
        parse_errors.sort_by(|a, b| (a.line, a.col, &a.message).cmp(&(b.line, b.col, &b.message)));
        parse_errors.dedup();

        let mut deprecated = self.seed.clone();
        deprecated.extend(extraction.deprecated.iter().map(str::to_string));

        let mut diagnostics = Vec::new();
        let note = |code, line, col, message: String, detail: String| Diagnostic {
            rule: code,
            severity: Severity::Note,
            file: path.to_string(),
            line,
            col,
            message,
            suppressed: false,
            mechanism: Mechanism::None,
            detail,
        };

        for tok in lexed.tokens.iter().filter(|t| t.kind == TokenKind::Comment) {
            if let Some(Err(e)) = parse_mark(&tok.text) {
                diagnostics.push(note(
                    Code::MarkSyntax,
                    tok.line,
                    tok.col,
                    format!("malformed believe-me mark: {e}"),
                    tok.text.trim().to_string(),
                ));
            }
        }

        for site in resolve_aliases(extraction.sites, &extraction.aliases) {
            for n in &site.notes {
                diagnostics.push(note(Code::Alias, site.line, site.col, n.clone(), normalize(&site.ty)));
            }
            let mut matches = match_all(&site.ty, &self.context, &deprecated);
            exclude_own_definition(&mut matches, &site.ty, &site.enclosing_classes);
            for m in matches {
                let verdict = is_suppressed(&m, &site);
                diagnostics.push(Diagnostic {
                    rule: m.rule.into(),
                    severity: self.config.severity(m.rule),
                    file: path.to_string(),
                    line: site.line,
                    col: site.col,
                    message: message_for(&m, &site),
                    suppressed: verdict.suppressed,
                    mechanism: verdict.mechanism,
                    detail: m.detail,
                });
            }
        }

        diagnostics.sort_by(|a, b| {
            (a.line, a.col, a.rule, &a.detail, &a.message).cmp(&(b.line, b.col, b.rule, &b.detail, &b.message))
        });
        diagnostics.dedup();

        FileResult {
            path: path.to_string(),
            diagnostics,
            parse_errors,
        }
    }

    /// Reads and analyzes files concurrently. Results are ordered by path.
    pub fn analyze_paths(&self, paths: &[PathBuf]) -> Result<Run, (PathBuf, std::io::Error)> {
        let mut results = paths
            .par_iter()
            .map(|p| {
                let source = read_source(p).map_err(|e| (p.clone(), e))?;
                Ok(self.analyze_source(&display_path(p), &source))
            })
            .collect::<Result<Vec<_>, _>>()?;
        results.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(Run::new(results))
    }
}

/// Source files are read leniently: invalid UTF-8 is replaced rather than
/// rejected, since C++ sources are not always UTF-8.
fn read_source(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    })
}

fn display_path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub files: usize,
    /// Unsuppressed diagnostics of each severity.
    pub warnings: usize,
    pub errors: usize,
    pub suppressed: usize,
    pub parse_errors: usize,
}

impl Summary {
    pub fn of(files: &[FileResult]) -> Self {
        let mut s = Summary {
            files: files.len(),
            ..Summary::default()
        };
        for d in files.iter().flat_map(|f| &f.diagnostics) {
            if d.suppressed {
                s.suppressed += 1;
            } else {
                match d.severity {
                    Severity::Warning => s.warnings += 1,
                    Severity::Error => s.errors += 1,
                    Severity::Note => {}
                }
            }
        }
        s.parse_errors = files.iter().map(|f| f.parse_errors.len()).sum();
        s
    }

    pub fn exit_code(&self, deny_warnings: bool) -> i32 {
        if self.errors > 0 {
            2
        } else if deny_warnings && self.warnings > 0 {
            1
        } else {
            0
        }
    }
}

/// Results of analyzing a set of files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Run {
    pub files: Vec<FileResult>,
    pub summary: Summary,
}

impl Run {
    pub fn new(files: Vec<FileResult>) -> Self {
        let summary = Summary::of(&files);
        Run { files, summary }
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.files.iter().flat_map(|f| &f.diagnostics)
    }

    pub fn unsuppressed(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics().filter(|d| !d.suppressed && d.severity != Severity::Note)
    }
}

/// Convenience wrapper analyzing a single in-memory source with defaults.
pub fn analyze(source: &str) -> FileResult {
    Engine::default().analyze_source("<input>", source)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(r: &FileResult) -> Vec<(Code, u32, bool)> {
        r.diagnostics.iter().map(|d| (d.rule, d.line, d.suppressed)).collect()
    }

    #[test]
    fn vector_bool_listing() {
        let r = analyze("std::vector<bool> b;\nb.push_back( true );\nbool* q = &b[0];\n");
        assert_eq!(codes(&r), [(Code::VecBool, 1, false)]);
        assert_eq!(r.diagnostics[0].severity, Severity::Warning);
        assert!(r.diagnostics[0].message.contains("VECTOR_BOOL_IS_IN_USE"));
    }

    #[test]
    fn coap_listing() {
        let src = "struct Auto_ptr_less\n{\n  bool operator()( const std::auto_ptr<int>& a,\n                   const std::auto_ptr<int>& b )\n  {\n    return *a < *b;\n  }\n};\n\nstd::vector<std::auto_ptr<int> > v;\n";
        let r = analyze(src);
        assert_eq!(codes(&r), [(Code::Coap, 10, false)]);
        let d = &r.diagnostics[0];
        assert_eq!(d.severity, Severity::Error);
        assert!(d.message.contains("has incomplete type and cannot be defined"));
        assert_eq!(d.detail, "argument 0");
    }

    #[test]
    fn empty_file() {
        let r = analyze("");
        assert!(r.diagnostics.is_empty());
        assert!(r.parse_errors.is_empty());
    }

    #[test]
    fn deprecated_message_names_class() {
        let r = analyze("class Foo: public Deprecated<Foo> { };\nvoid g() { Foo f; }\n");
        assert_eq!(codes(&r), [(Code::Deprecated, 2, false)]);
        assert!(r.diagnostics[0].message.contains("DeprecatedClass"));
        assert!(r.diagnostics[0].message.contains("DEPRECATED = Foo"));
    }

    #[test]
    fn malformed_marks_become_notes() {
        let r = analyze("std::vector<bool> b; // stl-sentry: believe-me(VECBOOL)\n");
        assert_eq!(codes(&r), [(Code::VecBool, 1, false), (Code::MarkSyntax, 1, false)]);
        assert_eq!(r.diagnostics[1].severity, Severity::Note);
        assert_eq!(r.diagnostics[1].col, 22);
    }

    #[test]
    fn alias_problems_become_notes() {
        let r = analyze("typedef B A;\ntypedef A B;\nA x;\n");
        assert_eq!(codes(&r), [(Code::Alias, 3, false)]);
    }

    #[test]
    fn config_disables_and_reclassifies() {
        let cfg = RuleConfig::from_json(r#"{"rules":{"VEC_BOOL":{"severity":"error"},"COAP":{"enabled":false}}}"#).unwrap();
        let r = Engine::new(cfg).analyze_source("a.cpp", "std::vector<bool> a; std::vector<std::auto_ptr<int> > b;");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].severity, Severity::Error);
    }

    #[test]
    fn config_deprecated_names() {
        let cfg = RuleConfig::from_json(r#"{"deprecated":["Legacy"]}"#).unwrap();
        let r = Engine::new(cfg).analyze_source("a.cpp", "ns::Legacy* make();\nvoid f(Legacy x);");
        assert_eq!(codes(&r), [(Code::Deprecated, 2, false)]);
    }

    #[test]
    fn parse_errors_are_reported() {
        let r = analyze("std::vector<std::auto_ptr<int> v;\nconst char* s = \"open\n");
        assert_eq!(r.parse_errors.len(), 2);
        assert!(r.parse_errors.windows(2).all(|w| (w[0].line, w[0].col) <= (w[1].line, w[1].col)));
    }

    #[test]
    fn summary_and_exit_codes() {
        let run = Run::new(vec![
            analyze("std::vector<bool> a;"),
            analyze("std::vector<bool> a; // stl-sentry: believe-me(VEC_BOOL)"),
        ]);
        assert_eq!(
            run.summary,
            Summary {
                files: 2,
                warnings: 1,
                errors: 0,
                suppressed: 1,
                parse_errors: 0
            }
        );
        assert_eq!(run.summary.exit_code(false), 0);
        assert_eq!(run.summary.exit_code(true), 1);
        let run = Run::new(vec![analyze("std::list<std::auto_ptr<int> > l;")]);
        assert_eq!(run.summary.exit_code(false), 2);
        assert_eq!(Summary::default().exit_code(true), 0);
    }
}
