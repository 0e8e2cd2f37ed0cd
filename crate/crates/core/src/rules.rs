//! The three rules: `vector<bool>`, containers of `auto_ptr`, and uses of
//! deprecated classes.
//!
//! Every matcher walks the whole type tree and reports one [`RuleMatch`]
//! per offending node, so `std::map<std::vector<bool>, std::vector<bool> >`
//! yields two VEC_BOOL matches.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scanner::DeprecatedSet;
use crate::type_parser::{TypeArg, TypeExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "VEC_BOOL")]
    VecBool,
    #[serde(rename = "COAP")]
    Coap,
    #[serde(rename = "DEPRECATED")]
    Deprecated,
}

impl RuleId {
    pub const ALL: [RuleId; 3] = [RuleId::VecBool, RuleId::Coap, RuleId::Deprecated];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::VecBool => "VEC_BOOL",
            RuleId::Coap => "COAP",
            RuleId::Deprecated => "DEPRECATED",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            RuleId::VecBool => "std::vector<bool> is used",
            RuleId::Coap => "a standard container holds std::auto_ptr elements",
            RuleId::Deprecated => "a class deriving from Deprecated<Self> is used",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule id '{0}'")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatch {
    pub rule: RuleId,
    /// Argument path from the site's root type to the offending node.
    pub path: Vec<usize>,
    pub detail: String,
}

/// A container name and the argument positions holding its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerSpec {
    /// Either a bare standard name (`vector`, matched as `std::vector`) or,
    /// for user containers, the full qualified name.
    pub name: String,
    pub element_positions: Vec<usize>,
    pub standard: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerCatalog {
    specs: Vec<ContainerSpec>,
}

impl Default for ContainerCatalog {
    fn default() -> Self {
        let std = |name: &str, positions: &[usize]| ContainerSpec {
            name: name.to_string(),
            element_positions: positions.to_vec(),
            standard: true,
        };
        ContainerCatalog {
            specs: vec![
                std("vector", &[0]),
                std("list", &[0]),
                std("deque", &[0]),
                std("set", &[0]),
                std("multiset", &[0]),
                std("map", &[0, 1]),
                std("multimap", &[0, 1]),
                // The underlying container argument of an adaptor is a
                // catalog container itself and is checked at its own node.
                std("stack", &[0]),
                std("queue", &[0]),
                std("priority_queue", &[0]),
            ],
        }
    }
}

impl ContainerCatalog {
    pub fn add(&mut self, name: impl Into<String>, element_positions: Vec<usize>) {
        self.specs.push(ContainerSpec {
            name: name.into(),
            element_positions,
            standard: false,
        });
    }

    pub fn specs(&self) -> &[ContainerSpec] {
        &self.specs
    }

    /// Element positions for `t` when it names a catalog container.
    pub fn element_positions(&self, t: &TypeExpr, opts: &MatchOptions) -> Option<&[usize]> {
        self.specs
            .iter()
            .find(|spec| {
                if spec.standard {
                    is_std_name(t, &spec.name, opts)
                } else {
                    t.qualified_name() == spec.name
                }
            })
            .map(|spec| spec.element_positions.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    /// Accept `vector` and `auto_ptr` without the `std::` qualifier.
    pub match_unqualified: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            match_unqualified: true,
        }
    }
}

/// `std::name`, `::std::name`, or bare `name` when unqualified matching is on.
pub fn is_std_name(t: &TypeExpr, name: &str, opts: &MatchOptions) -> bool {
    match t.name.as_slice() {
        [ns, n] => ns == "std" && n == name,
        [n] => opts.match_unqualified && !t.leading_colons && n == name,
        _ => false,
    }
}

/// "type" for the root, otherwise "argument 1 > argument 0" style.
pub fn describe_path(path: &[usize]) -> String {
    if path.is_empty() {
        return "type".to_string();
    }
    path.iter()
        .map(|i| format!("argument {i}"))
        .collect::<Vec<_>>()
        .join(" > ")
}

pub fn match_vec_bool(t: &TypeExpr, opts: &MatchOptions) -> Vec<RuleMatch> {
    let mut out = Vec::new();
    t.walk(&mut |path, node| {
        if is_vector_of_bool(node, opts) {
            out.push(RuleMatch {
                rule: RuleId::VecBool,
                path: path.to_vec(),
                detail: describe_path(path),
            });
        }
    });
    out
}

fn is_vector_of_bool(t: &TypeExpr, opts: &MatchOptions) -> bool {
    is_std_name(t, "vector", opts)
        && t.arg_type(0).is_some_and(|(arg, deco)| {
            deco.is_plain()
                && arg.name == ["bool"]
                && !arg.has_template_args
                && arg.member.is_empty()
                && !arg.leading_colons
        })
}

pub fn match_coap(t: &TypeExpr, catalog: &ContainerCatalog, opts: &MatchOptions) -> Vec<RuleMatch> {
    let mut out = Vec::new();
    t.walk(&mut |path, node| {
        let Some(positions) = catalog.element_positions(node, opts) else {
            return;
        };
        let map_like = positions.len() == 2 && positions == [0, 1];
        for &pos in positions {
            let Some((elem, deco)) = node.arg_type(pos) else {
                continue;
            };
            if deco.is_value() && is_std_name(elem, "auto_ptr", opts) {
                let mut detail = if path.is_empty() {
                    format!("argument {pos}")
                } else {
                    format!("{} > argument {pos}", describe_path(path))
                };
                if map_like {
                    detail.push_str(if pos == 0 { " (key)" } else { " (value)" });
                }
                out.push(RuleMatch {
                    rule: RuleId::Coap,
                    path: path.to_vec(),
                    detail,
                });
            }
        }
    });
    out
}

pub fn match_deprecated(t: &TypeExpr, dep: &DeprecatedSet) -> Vec<RuleMatch> {
    let mut out = Vec::new();
    if dep.is_empty() {
        return out;
    }
    walk_skipping_markers(t, &mut Vec::new(), &mut |path, node| {
        let name = node.final_segment();
        if dep.contains(name) {
            let detail = if path.is_empty() {
                name.to_string()
            } else {
                format!("{}: {name}", describe_path(path))
            };
            out.push(RuleMatch {
                rule: RuleId::Deprecated,
                path: path.to_vec(),
                detail,
            });
        }
    });
    out
}

/// Like [`TypeExpr::walk`], but `Deprecated<...>` nodes and their arguments
/// are not visited: the marker base names the class it deprecates.
fn walk_skipping_markers(t: &TypeExpr, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &TypeExpr)) {
    if t.final_segment() == "Deprecated" && t.has_template_args {
        return;
    }
    f(path, t);
    for (i, arg) in t.args.iter().enumerate() {
        if let TypeArg::Type { ty, .. } = arg {
            path.push(i);
            walk_skipping_markers(ty, path, f);
            path.pop();
        }
    }
}

/// Rule inputs that do not depend on the file being checked.
#[derive(Debug, Clone)]
pub struct RuleContext {
    pub options: MatchOptions,
    pub catalog: ContainerCatalog,
    pub enabled: Vec<RuleId>,
}

impl Default for RuleContext {
    fn default() -> Self {
        RuleContext {
            options: MatchOptions::default(),
            catalog: ContainerCatalog::default(),
            enabled: RuleId::ALL.to_vec(),
        }
    }
}

impl RuleContext {
    pub fn is_enabled(&self, rule: RuleId) -> bool {
        self.enabled.contains(&rule)
    }
}

/// Drops DEPRECATED matches naming a class from inside that class's own
/// body, such as its copy constructor's parameter.
pub fn exclude_own_definition(matches: &mut Vec<RuleMatch>, t: &TypeExpr, enclosing_classes: &[String]) {
    matches.retain(|m| {
        m.rule != RuleId::Deprecated
            || !t
                .at_path(&m.path)
                .is_some_and(|node| enclosing_classes.iter().any(|c| c == node.final_segment()))
    });
}

/// All matches of all enabled rules, in rule order.
pub fn match_all(t: &TypeExpr, ctx: &RuleContext, deprecated: &DeprecatedSet) -> Vec<RuleMatch> {
    let mut out = Vec::new();
    if ctx.is_enabled(RuleId::VecBool) {
        out.extend(match_vec_bool(t, &ctx.options));
    }
    if ctx.is_enabled(RuleId::Coap) {
        out.extend(match_coap(t, &ctx.catalog, &ctx.options));
    }
    if ctx.is_enabled(RuleId::Deprecated) {
        out.extend(match_deprecated(t, deprecated));
    }
    out
}
