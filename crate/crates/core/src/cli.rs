//! Command-line front end.
//!
//! Exit status: 0 when nothing needs attention, 1 for warnings under
//! `--deny-warnings`, 2 for any error, 3 for usage, config and I/O failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::config::{load_config, RuleConfig, CONFIG_ENV};
use crate::engine::Engine;
use crate::report::{render_json, render_text, Format, TextOptions};
use crate::rules::RuleId;

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_ERRORS: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Source extensions picked up when a directory is given.
pub const SOURCE_EXTENSIONS: &[&str] = &["cpp", "cc", "cxx", "h", "hpp"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

/// Finds vector<bool>, containers of auto_ptr and uses of deprecated
/// classes in C++ sources.
#[derive(Debug, Parser)]
#[command(name = "stl-sentry", version)]
pub struct Args {
    /// Files or directories to check.
    pub paths: Vec<PathBuf>,

    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,

    /// JSON config file. Defaults to $STL_SENTRY_CONFIG when set.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Exit with status 1 when unsuppressed warnings remain.
    #[arg(long)]
    pub deny_warnings: bool,

    /// Also print diagnostics silenced by believe-me marks.
    #[arg(long)]
    pub show_suppressed: bool,

    /// Print the rule ids and exit.
    #[arg(long)]
    pub list_rules: bool,

    /// Only match `std::`-qualified container names.
    #[arg(long)]
    pub no_unqualified: bool,
}

impl Args {
    pub fn format(&self) -> Format {
        match self.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }

    /// Applies command-line flags on top of a loaded config.
    pub fn apply(&self, mut cfg: RuleConfig) -> RuleConfig {
        if self.deny_warnings {
            cfg.deny_warnings = true;
        }
        if self.show_suppressed {
            cfg.show_suppressed = true;
        }
        if self.no_unqualified {
            cfg.match_unqualified = false;
        }
        cfg
    }

    /// The config file to load: `--config`, else the environment default.
    pub fn config_path(&self, env_default: Option<OsString>) -> Option<PathBuf> {
        self.config
            .clone()
            .or_else(|| env_default.filter(|v| !v.is_empty()).map(PathBuf::from))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no input files given")]
    NoInput,
}

pub fn parse_args<I, T>(argv: I) -> Result<Args, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Args::try_parse_from(argv)
}

/// Loads the effective config for `args`.
pub fn resolve_config(args: &Args, env_default: Option<OsString>) -> Result<RuleConfig, CliError> {
    let cfg = match args.config_path(env_default) {
        Some(path) => load_config(&path)?,
        None => RuleConfig::default(),
    };
    Ok(args.apply(cfg))
}

/// Expands directories into the source files below them, sorted.
///
/// Symbolic links are followed at most one level deep, which avoids cycles
/// without tracking visited inodes.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        let meta = std::fs::metadata(p).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?;
        if meta.is_dir() {
            walk(p, 0, &mut out)?;
        } else {
            out.push(p.clone());
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn walk(dir: &Path, links_followed: u32, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let entry = entry.map_err(io)?;
        let path = entry.path();
        let file_type = entry.file_type().map_err(io)?;
        let mut depth = links_followed;
        if file_type.is_symlink() {
            if links_followed >= 1 {
                continue;
            }
            depth += 1;
        }
        // A dangling link has no metadata; skip it.
        let Ok(meta) = std::fs::metadata(&path) else {
            continue;
        };
        if meta.is_dir() {
            walk(&path, depth, out)?;
        } else if meta.is_file() && has_source_extension(&path) {
            out.push(path);
        }
    }
    Ok(())
}

pub fn has_source_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| SOURCE_EXTENSIONS.contains(&e))
}

fn list_rules(cfg: &RuleConfig) -> String {
    RuleId::ALL
        .into_iter()
        .map(|r| {
            let state = if cfg.is_enabled(r) { "" } else { " (disabled)" };
            format!("{:<10} {:<7} {}{state}\n", r.as_str(), cfg.severity(r).to_string(), r.description())
        })
        .collect()
}

/// Runs the tool and returns the exit status.
pub fn run<I, T>(argv: I, env_default: Option<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match parse_args(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_CLEAN };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&args, env_default, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "stl-sentry: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(args: &Args, env_default: Option<OsString>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = resolve_config(args, env_default)?;
    let io = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    if args.list_rules {
        stdout.write_all(list_rules(&cfg).as_bytes()).map_err(io)?;
        return Ok(EXIT_CLEAN);
    }
    if args.paths.is_empty() {
        return Err(CliError::NoInput);
    }
    let inputs = collect_inputs(&args.paths)?;
    let engine = Engine::new(cfg);
    let run = engine
        .analyze_paths(&inputs)
        .map_err(|(path, source)| CliError::Io { path, source })?;
    let rendered = match args.format() {
        Format::Text => render_text(
            &run,
            TextOptions {
                show_suppressed: engine.config().show_suppressed,
            },
        ),
        Format::Json => {
            let mut s = render_json(&run);
            s.push('\n');
            s
        }
    };
    stdout.write_all(rendered.as_bytes()).map_err(io)?;
    Ok(run.summary.exit_code(engine.config().deny_warnings))
}

/// Entry point used by the binary; reads the config default from the
/// environment.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(
        std::env::args_os(),
        std::env::var_os(CONFIG_ENV),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}
