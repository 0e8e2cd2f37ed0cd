//! Believe-me marks.
//!
//! Two mechanisms tell the linter a use is intentional. A `vector<bool>`
//! whose argument list names `I_KNOW_VECTOR_BOOL` is accepted, as is any
//! VEC_BOOL or COAP match on a line carrying the comment mark
//!
//! ```text
//! // stl-sentry: believe-me(VEC_BOOL)
//! ```
//!
//! DEPRECATED matches cannot be marked away.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rules::{RuleId, RuleMatch};
use crate::scanner::UseSite;
use crate::type_parser::TypeArg;

pub const TEMPLATE_TAG: &str = "I_KNOW_VECTOR_BOOL";
pub const MARK_PREFIX: &str = "stl-sentry:";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    #[default]
    None,
    TemplateTag,
    CommentMark,
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::None => "none",
            Mechanism::TemplateTag => "template-tag",
            Mechanism::CommentMark => "comment-mark",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuppressionVerdict {
    pub suppressed: bool,
    pub mechanism: Mechanism,
    /// The tag or comment that did the suppressing.
    pub mark_text: Option<String>,
}

impl SuppressionVerdict {
    fn by(mechanism: Mechanism, text: impl Into<String>) -> Self {
        SuppressionVerdict {
            suppressed: true,
            mechanism,
            mark_text: Some(text.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarkError {
    #[error("expected 'believe-me(<RULE_ID>)' after '{MARK_PREFIX}'")]
    BadBody,
    #[error("unknown rule id '{0}' in believe-me mark")]
    UnknownRule(String),
    #[error("DEPRECATED cannot be suppressed with a believe-me mark")]
    NotSuppressible,
}

/// The comment text without its `//` or `/* */` delimiters.
pub fn comment_body(comment: &str) -> &str {
    if let Some(rest) = comment.strip_prefix("//") {
        rest
    } else if let Some(rest) = comment.strip_prefix("/*") {
        rest.strip_suffix("*/").unwrap_or(rest)
    } else {
        comment
    }
}

/// Reads a believe-me mark from a comment.
///
/// Comments that do not start with `stl-sentry:` are not marks and give
/// `None`. A comment that does but is not exactly
/// `stl-sentry: believe-me(VEC_BOOL)` or `stl-sentry: believe-me(COAP)`
/// gives an error.
pub fn parse_mark(comment: &str) -> Option<Result<RuleId, MarkError>> {
    let body = comment_body(comment).trim();
    let rest = body.strip_prefix(MARK_PREFIX)?;
    let Some(inner) = rest
        .strip_prefix(" believe-me(")
        .and_then(|r| r.strip_suffix(')'))
    else {
        return Some(Err(MarkError::BadBody));
    };
    Some(match inner.parse::<RuleId>() {
        Ok(RuleId::Deprecated) => Err(MarkError::NotSuppressible),
        Ok(rule) => Ok(rule),
        Err(_) => Err(MarkError::UnknownRule(inner.to_string())),
    })
}

/// Decides whether `m`, found at `site`, is suppressed.
///
/// Comment marks count when they sit on the site's line or on the line of
/// an alias that was expanded into the site's type.
pub fn is_suppressed(m: &RuleMatch, site: &UseSite) -> SuppressionVerdict {
    match m.rule {
        RuleId::Deprecated => SuppressionVerdict::default(),
        RuleId::VecBool => {
            let tagged = site.ty.at_path(&m.path).is_some_and(|node| {
                node.args.iter().any(|a| match a {
                    TypeArg::Type { ty, .. } => ty.final_segment() == TEMPLATE_TAG,
                    TypeArg::Opaque(_) => false,
                })
            });
            if tagged {
                SuppressionVerdict::by(Mechanism::TemplateTag, TEMPLATE_TAG)
            } else {
                comment_verdict(m.rule, site)
            }
        }
        RuleId::Coap => comment_verdict(m.rule, site),
    }
}

fn comment_verdict(rule: RuleId, site: &UseSite) -> SuppressionVerdict {
    site.same_line_comments
        .iter()
        .chain(&site.alias_comments)
        .find(|c| matches!(parse_mark(c), Some(Ok(r)) if r == rule))
        .map(|c| SuppressionVerdict::by(Mechanism::CommentMark, c.trim()))
        .unwrap_or_default()
}

/// The canonical mark for `rule`, as a line comment.
pub fn mark_comment(rule: RuleId) -> String {
    format!("// {MARK_PREFIX} believe-me({rule})")
}
