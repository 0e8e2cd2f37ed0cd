//! Run configuration and its JSON file format.
//!
//! ```json
//! {
//!   "rules": {"VEC_BOOL": {"enabled": true, "severity": "warning"}},
//!   "deprecated": ["Foo"],
//!   "containers": [{"name": "my::small_vector", "element_positions": [0]}],
//!   "match_unqualified": true
//! }
//! ```
//!
//! Every key is optional and unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::rules::{ContainerCatalog, MatchOptions, RuleContext, RuleId};
use crate::scanner::DeprecatedSet;

/// Environment variable naming a config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "STL_SENTRY_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Note,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Note => "note",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

impl RuleId {
    pub fn default_severity(self) -> Severity {
        match self {
            RuleId::Coap => Severity::Error,
            RuleId::VecBool | RuleId::Deprecated => Severity::Warning,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSettings {
    pub enabled: bool,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraContainer {
    pub name: String,
    pub element_positions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConfig {
    pub rules: BTreeMap<RuleId, RuleSettings>,
    /// Classes treated as deprecated in every file, on top of those
    /// discovered through `Deprecated<Self>` bases.
    pub deprecated: Vec<String>,
    pub extra_containers: Vec<ExtraContainer>,
    pub match_unqualified: bool,
    pub show_suppressed: bool,
    pub deny_warnings: bool,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            rules: RuleId::ALL
                .into_iter()
                .map(|r| {
                    let settings = RuleSettings {
                        enabled: true,
                        severity: r.default_severity(),
                    };
                    (r, settings)
                })
                .collect(),
            deprecated: Vec::new(),
            extra_containers: Vec::new(),
            match_unqualified: true,
            show_suppressed: false,
            deny_warnings: false,
        }
    }
}

impl RuleConfig {
    pub fn is_enabled(&self, rule: RuleId) -> bool {
        self.rules.get(&rule).is_none_or(|s| s.enabled)
    }

    pub fn severity(&self, rule: RuleId) -> Severity {
        self.rules
            .get(&rule)
            .map_or(rule.default_severity(), |s| s.severity)
    }

    pub fn rule_context(&self) -> RuleContext {
        let mut catalog = ContainerCatalog::default();
        for c in &self.extra_containers {
            catalog.add(c.name.clone(), c.element_positions.clone());
        }
        RuleContext {
            options: MatchOptions {
                match_unqualified: self.match_unqualified,
            },
            catalog,
            enabled: RuleId::ALL.into_iter().filter(|r| self.is_enabled(*r)).collect(),
        }
    }

    pub fn deprecated_seed(&self) -> DeprecatedSet {
        self.deprecated.iter().cloned().collect()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let file: ConfigFile = serde_json::from_str(text)?;
        Ok(file.into())
    }
}

/// Reads a config file.
pub fn load_config(path: &Path) -> Result<RuleConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RuleConfig::from_json(&text).map_err(|source| ConfigError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

// On-disk shape. Kept separate so the in-memory config can have defaults
// filled in and invariants checked by the type system.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    rules: BTreeMap<RuleId, RuleEntry>,
    #[serde(default)]
    deprecated: Vec<String>,
    #[serde(default)]
    containers: Vec<ContainerEntry>,
    match_unqualified: Option<bool>,
    show_suppressed: Option<bool>,
    deny_warnings: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    enabled: Option<bool>,
    severity: Option<ConfiguredSeverity>,
}

/// Severities a rule may be set to. `note` is reserved for the tool's own
/// remarks.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ConfiguredSeverity {
    Warning,
    Error,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContainerEntry {
    name: String,
    element_positions: Vec<usize>,
}

impl From<ConfigFile> for RuleConfig {
    fn from(file: ConfigFile) -> Self {
        let mut cfg = RuleConfig::default();
        for (rule, entry) in file.rules {
            let settings = cfg.rules.get_mut(&rule).expect("all rules have defaults");
            if let Some(enabled) = entry.enabled {
                settings.enabled = enabled;
            }
            match entry.severity {
                Some(ConfiguredSeverity::Warning) => settings.severity = Severity::Warning,
                Some(ConfiguredSeverity::Error) => settings.severity = Severity::Error,
                None => {}
            }
        }
        cfg.deprecated = file.deprecated;
        cfg.extra_containers = file
            .containers
            .into_iter()
            .map(|c| ExtraContainer {
                name: c.name,
                element_positions: c.element_positions,
            })
            .collect();
        cfg.match_unqualified = file.match_unqualified.unwrap_or(cfg.match_unqualified);
        cfg.show_suppressed = file.show_suppressed.unwrap_or(false);
        cfg.deny_warnings = file.deny_warnings.unwrap_or(false);
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(RuleConfig::from_json("{}").unwrap(), RuleConfig::default());
    }

    #[test]
    fn deprecated_seed() {
        let cfg = RuleConfig::from_json(r#"{"deprecated":["Foo"]}"#).unwrap();
        assert!(cfg.deprecated_seed().contains("Foo"));
    }

    #[test]
    fn note_severity_is_rejected() {
        let err = RuleConfig::from_json(r#"{"rules":{"COAP":{"severity":"note"}}}"#).unwrap_err();
        assert!(err.to_string().contains("note"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for doc in [
            r#"{"colour": true}"#,
            r#"{"rules":{"VEC_BOOL":{"enabled":true,"level":"error"}}}"#,
            r#"{"rules":{"MARK_SYNTAX":{"enabled":false}}}"#,
            r#"{"containers":[{"name":"x","positions":[0]}]}"#,
        ] {
            assert!(RuleConfig::from_json(doc).is_err(), "{doc}");
        }
        let err = RuleConfig::from_json(r#"{"colour": true}"#).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn negative_positions_are_rejected() {
        assert!(RuleConfig::from_json(r#"{"containers":[{"name":"x","element_positions":[-1]}]}"#).is_err());
    }

    #[test]
    fn full_document() {
        let cfg = RuleConfig::from_json(
            r#"{
              "rules": {"VEC_BOOL": {"enabled": false}, "DEPRECATED": {"severity": "error"}},
              "deprecated": ["Old", "Older"],
              "containers": [{"name": "my::small_vector", "element_positions": [0]}],
              "match_unqualified": false,
              "deny_warnings": true
            }"#,
        )
        .unwrap();
        assert!(!cfg.is_enabled(RuleId::VecBool));
        assert!(cfg.is_enabled(RuleId::Coap));
        assert_eq!(cfg.severity(RuleId::Deprecated), Severity::Error);
        assert_eq!(cfg.severity(RuleId::Coap), Severity::Error);
        assert_eq!(cfg.deprecated, ["Old", "Older"]);
        assert!(!cfg.match_unqualified);
        assert!(cfg.deny_warnings);
        assert!(!cfg.show_suppressed);
        let ctx = cfg.rule_context();
        assert_eq!(ctx.enabled, [RuleId::Coap, RuleId::Deprecated]);
        assert!(ctx.catalog.specs().iter().any(|s| s.name == "my::small_vector"));
    }

    #[test]
    fn default_severities() {
        let cfg = RuleConfig::default();
        assert_eq!(cfg.severity(RuleId::VecBool), Severity::Warning);
        assert_eq!(cfg.severity(RuleId::Coap), Severity::Error);
        assert_eq!(cfg.severity(RuleId::Deprecated), Severity::Warning);
    }

    #[test]
    fn load_reports_path() {
        let err = load_config(Path::new("/nonexistent/stl-sentry.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/stl-sentry.json"));
    }
}
