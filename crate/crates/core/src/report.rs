//! Text and JSON reports.
//!
//! The JSON report is a single compact document:
//!
//! ```json
//! {"version":1,"files":[{"path":"a.cpp","parse_errors":[]}],
//!  "diagnostics":[{"rule":"VEC_BOOL","severity":"warning","file":"a.cpp","line":1,"col":1,
//!                  "message":"...","suppressed":false,"mechanism":"none","detail":"type"}],
//!  "summary":{"files":1,"warnings":1,"errors":0,"suppressed":0,"parse_errors":0}}
//! ```
//!
//! [`parse_json`] reads it back; rendering the result again gives the same
//! bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{Diagnostic, FileResult, ParseProblem, Run, Summary};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TextOptions {
    pub show_suppressed: bool,
}

pub fn render_text(run: &Run, opts: TextOptions) -> String {
    let mut out = String::new();
    for file in &run.files {
        let mut lines: Vec<(u32, u32, String)> = file
            .parse_errors
            .iter()
            .map(|p| (p.line, p.col, format!("{}:{}:{}: parse-error: {}", file.path, p.line, p.col, p.message)))
            .collect();
        for d in &file.diagnostics {
            if d.suppressed && !opts.show_suppressed {
                continue;
            }
            let mut line = format!("{}:{}:{}: {}: [{}] {}", d.file, d.line, d.col, d.severity, d.rule, d.message);
            if d.suppressed {
                line = format!("suppressed: {line} ({})", d.mechanism);
            }
            lines.push((d.line, d.col, line));
        }
        // Stable, so diagnostics keep their order after parse errors at the
        // same position.
        lines.sort_by_key(|(l, c, _)| (*l, *c));
        for (_, _, line) in lines {
            out.push_str(&line);
            out.push('\n');
        }
    }
    let s = &run.summary;
    let _ = writeln!(
        out,
        "{} warnings, {} errors, {} suppressed, {} parse errors in {} files",
        s.warnings, s.errors, s.suppressed, s.parse_errors, s.files
    );
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEntry {
    path: String,
    parse_errors: Vec<ParseProblem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonReport {
    version: u32,
    files: Vec<FileEntry>,
    diagnostics: Vec<Diagnostic>,
    summary: Summary,
}

pub fn render_json(run: &Run) -> String {
    let report = JsonReport {
        version: REPORT_VERSION,
        files: run
            .files
            .iter()
            .map(|f| FileEntry {
                path: f.path.clone(),
                parse_errors: f.parse_errors.clone(),
            })
            .collect(),
        diagnostics: run.diagnostics().cloned().collect(),
        summary: run.summary,
    };
    serde_json::to_string(&report).expect("report types always serialize")
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported report version {0}")]
    Version(u32),
    #[error("diagnostic refers to unlisted file '{0}'")]
    UnknownFile(String),
}

/// Reads a JSON report back into a [`Run`].
pub fn parse_json(text: &str) -> Result<Run, ReportError> {
    let report: JsonReport = serde_json::from_str(text)?;
    if report.version != REPORT_VERSION {
        return Err(ReportError::Version(report.version));
    }
    let mut files: Vec<FileResult> = report
        .files
        .into_iter()
        .map(|f| FileResult {
            path: f.path,
            diagnostics: Vec::new(),
            parse_errors: f.parse_errors,
        })
        .collect();
    for d in report.diagnostics {
        let file = files
            .iter_mut()
            .find(|f| f.path == d.file)
            .ok_or_else(|| ReportError::UnknownFile(d.file.clone()))?;
        file.diagnostics.push(d);
    }
    Ok(Run {
        files,
        summary: report.summary,
    })
}
