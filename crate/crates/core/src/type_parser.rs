//! Type-expression parsing over the token stream.
//!
//! Covers qualified names, template argument lists (with `>>` split on
//! demand), pointer/reference/const decorations on arguments, and opaque
//! non-type arguments. Function types, member pointers and parameter packs
//! are rejected with a [`ParseError`].

use std::fmt;
use std::ops::Range;

use crate::lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum RefKind {
    #[default]
    None,
    LValue,
    RValue,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Decoration {
    pub is_const: bool,
    pub pointers: u8,
    pub reference: RefKind,
}

impl Decoration {
    pub fn is_plain(&self) -> bool {
        *self == Decoration::default()
    }

    /// True when the decorated type is the value type itself, possibly
    /// const, rather than a pointer or reference to it.
    pub fn is_value(&self) -> bool {
        self.pointers == 0 && self.reference == RefKind::None
    }

    /// Decoration of `outer` applied on top of an alias whose target
    /// already carries `self`.
    pub fn compose(self, outer: Decoration) -> Decoration {
        Decoration {
            is_const: self.is_const || (outer.is_const && self.pointers == 0),
            pointers: self.pointers.saturating_add(outer.pointers),
            reference: match (self.reference, outer.reference) {
                (RefKind::None, r) => r,
                (r, RefKind::None) => r,
                // Reference collapsing.
                (RefKind::RValue, RefKind::RValue) => RefKind::RValue,
                _ => RefKind::LValue,
            },
        }
    }
}

/// A parsed type such as `std::map<int, std::vector<bool> >`.
///
/// Equality is structural and ignores `span`.
#[derive(Debug, Clone, Default)]
pub struct TypeExpr {
    pub name: Vec<String>,
    pub args: Vec<TypeArg>,
    /// Set when a `<...>` list followed the name, even an empty one.
    pub has_template_args: bool,
    /// Plain identifiers after the argument list, as in `vector<int>::iterator`.
    pub member: Vec<String>,
    pub leading_colons: bool,
    pub span: Range<usize>,
}

impl PartialEq for TypeExpr {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.args == other.args
            && self.has_template_args == other.has_template_args
            && self.member == other.member
            && self.leading_colons == other.leading_colons
    }
}

impl Eq for TypeExpr {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeArg {
    Type { ty: TypeExpr, decoration: Decoration },
    Opaque(String),
}

impl TypeArg {
    pub fn plain(ty: TypeExpr) -> Self {
        TypeArg::Type {
            ty,
            decoration: Decoration::default(),
        }
    }

    pub fn as_type(&self) -> Option<(&TypeExpr, Decoration)> {
        match self {
            TypeArg::Type { ty, decoration } => Some((ty, *decoration)),
            TypeArg::Opaque(_) => None,
        }
    }
}

impl TypeExpr {
    /// A name-only type, mostly useful in tests and examples.
    pub fn named<S: AsRef<str>>(segments: &[S]) -> Self {
        TypeExpr {
            name: segments.iter().map(|s| s.as_ref().to_string()).collect(),
            ..TypeExpr::default()
        }
    }

    pub fn with_args(mut self, args: Vec<TypeArg>) -> Self {
        self.args = args;
        self.has_template_args = true;
        self
    }

    pub fn final_segment(&self) -> &str {
        self.name.last().map_or("", String::as_str)
    }

    pub fn qualified_name(&self) -> String {
        self.name.join("::")
    }

    pub fn arg_type(&self, index: usize) -> Option<(&TypeExpr, Decoration)> {
        self.args.get(index).and_then(TypeArg::as_type)
    }

    /// Calls `f` with the argument path and node for this type and every
    /// nested type argument, in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a TypeExpr)) {
        fn go<'a>(t: &'a TypeExpr, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a TypeExpr)) {
            f(path, t);
            for (i, arg) in t.args.iter().enumerate() {
                if let TypeArg::Type { ty, .. } = arg {
                    path.push(i);
                    go(ty, path, f);
                    path.pop();
                }
            }
        }
        go(self, &mut Vec::new(), f);
    }

    /// The node reached by following `path` through type arguments.
    pub fn at_path(&self, path: &[usize]) -> Option<&TypeExpr> {
        path.iter()
            .try_fold(self, |t, &i| t.arg_type(i).map(|(ty, _)| ty))
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.leading_colons {
            f.write_str("::")?;
        }
        f.write_str(&self.name.join("::"))?;
        if self.has_template_args {
            f.write_str("<")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(">")?;
        }
        for m in &self.member {
            write!(f, "::{m}")?;
        }
        Ok(())
    }
}

impl fmt::Display for TypeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeArg::Opaque(text) => f.write_str(text),
            TypeArg::Type { ty, decoration } => {
                if decoration.is_const {
                    f.write_str("const ")?;
                }
                write!(f, "{ty}")?;
                for _ in 0..decoration.pointers {
                    f.write_str("*")?;
                }
                match decoration.reference {
                    RefKind::None => Ok(()),
                    RefKind::LValue => f.write_str("&"),
                    RefKind::RValue => f.write_str("&&"),
                }
            }
        }
    }
}

/// Canonical rendering: `::`-joined segments, `<a, b>` argument lists.
pub fn normalize(t: &TypeExpr) -> String {
    t.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

const BUILTIN_TYPES: &[&str] = &[
    "bool", "char", "char8_t", "char16_t", "char32_t", "wchar_t", "short", "int", "long",
    "signed", "unsigned", "float", "double", "void", "auto",
];

// Builtins that combine into one multi-word name ("unsigned long int").
const COMBINING: &[&str] = &["signed", "unsigned", "short", "long", "int", "char", "double"];

const ELABORATED: &[&str] = &["typename", "struct", "class", "enum", "union"];

pub fn is_builtin_type(word: &str) -> bool {
    BUILTIN_TYPES.contains(&word)
}

/// Whether the token could start a type expression.
pub fn can_begin_type(tok: &Token) -> bool {
    match tok.kind {
        TokenKind::Identifier => true,
        TokenKind::Keyword => {
            is_builtin_type(&tok.text)
                || ELABORATED.contains(&tok.text.as_str())
                || tok.text == "const"
                || tok.text == "volatile"
        }
        TokenKind::Punct => tok.text == "::",
        _ => false,
    }
}

/// Parses the longest type expression starting at token `start`.
///
/// Leading cv-qualifiers and elaborated-type keywords are consumed; trailing
/// pointer and reference declarators are not. Returns the expression and the
/// index of the first token after it, `Ok(None)` when the token cannot begin
/// a type.
pub fn parse_type(tokens: &[Token], start: usize) -> Result<Option<(TypeExpr, usize)>, ParseError> {
    let mut p = TypeParser::new(tokens, start);
    match p.type_expr()? {
        Some(t) => {
            if p.half {
                return Err(p.error_at(p.pos, "'>>' closes more template argument lists than are open"));
            }
            Ok(Some((t, p.pos)))
        }
        None => Ok(None),
    }
}

/// Like [`parse_type`], also consuming trailing `const`, `*`, `&` and `&&`.
pub fn parse_decorated(
    tokens: &[Token],
    start: usize,
) -> Result<Option<(TypeExpr, Decoration, usize)>, ParseError> {
    let mut p = TypeParser::new(tokens, start);
    match p.decorated()? {
        Some((t, d)) if !p.half => Ok(Some((t, d, p.pos))),
        Some(_) => Err(p.error_at(p.pos, "'>>' closes more template argument lists than are open")),
        None => Ok(None),
    }
}

/// Parses a bare `<...>` argument list whose `<` is at `open`, as after
/// `static_cast`. Returns the arguments and the index after the closer.
pub fn parse_template_args(tokens: &[Token], open: usize) -> Result<(Vec<TypeArg>, usize), ParseError> {
    let mut p = TypeParser::new(tokens, open);
    if p.text() != "<" {
        return Err(p.error_at(p.pos, "expected '<'"));
    }
    let args = p.arg_list(p.pos)?;
    if p.half {
        return Err(p.error_at(p.pos, "'>>' closes more template argument lists than are open"));
    }
    Ok((args, p.pos))
}

/// Parses a complete type from text; trailing tokens are an error.
pub fn parse_type_str(src: &str) -> Result<TypeExpr, ParseError> {
    let lexed = tokenize(src);
    if let Some(e) = lexed.errors.first() {
        return Err(ParseError {
            line: e.line,
            col: e.col,
            message: e.message.clone(),
        });
    }
    let tokens = lexed.tokens;
    match parse_type(&tokens, 0)? {
        Some((t, next)) => {
            let next = skip_trivia(&tokens, next);
            if tokens[next].kind == TokenKind::Eof {
                Ok(t)
            } else {
                let tok = &tokens[next];
                Err(ParseError {
                    line: tok.line,
                    col: tok.col,
                    message: format!("unexpected '{}' after type", tok.text),
                })
            }
        }
        None => Err(ParseError {
            line: 1,
            col: 1,
            message: "not a type".into(),
        }),
    }
}

pub(crate) fn skip_trivia(tokens: &[Token], mut i: usize) -> usize {
    while i < tokens.len() && tokens[i].is_trivia() {
        i += 1;
    }
    i.min(tokens.len().saturating_sub(1))
}

struct TypeParser<'t> {
    tokens: &'t [Token],
    pos: usize,
    /// The first `>` of the `>>` at `pos` has been consumed.
    half: bool,
    /// Index of the last fully consumed token.
    last: usize,
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    half: bool,
    last: usize,
}

impl<'t> TypeParser<'t> {
    fn new(tokens: &'t [Token], start: usize) -> Self {
        TypeParser {
            tokens,
            pos: skip_trivia(tokens, start),
            half: false,
            last: start,
        }
    }

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            half: self.half,
            last: self.last,
        }
    }

    fn reset(&mut self, m: Mark) {
        self.pos = m.pos;
        self.half = m.half;
        self.last = m.last;
    }

    fn tok(&self) -> &'t Token {
        &self.tokens[self.pos]
    }

    fn text(&self) -> &'t str {
        if self.half {
            ">"
        } else {
            let t = self.tok();
            match t.kind {
                TokenKind::StringLit | TokenKind::CharLit | TokenKind::Eof => "",
                _ => &t.text,
            }
        }
    }

    fn at_eof(&self) -> bool {
        self.tok().kind == TokenKind::Eof
    }

    fn bump(&mut self) {
        if self.at_eof() {
            return;
        }
        self.half = false;
        self.last = self.pos;
        self.pos = skip_trivia(self.tokens, self.pos + 1);
    }

    /// Byte offset just past what has been consumed so far.
    fn consumed_end(&self) -> usize {
        if self.half {
            self.tok().span.start + 1
        } else {
            self.tokens[self.last].span.end
        }
    }

    fn error_at(&self, idx: usize, message: impl Into<String>) -> ParseError {
        let t = &self.tokens[idx];
        ParseError {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        !self.half && self.tok().kind == TokenKind::Keyword && self.tok().text == word
    }

    fn is_closer(&self) -> bool {
        self.half || matches!(self.text(), ">" | ">>")
    }

    fn close_one(&mut self) {
        if self.half || self.text() == ">" {
            self.bump();
        } else {
            self.half = true;
        }
    }

    fn skip_cv(&mut self) -> bool {
        let mut is_const = false;
        loop {
            if self.is_keyword("const") {
                is_const = true;
            } else if !self.is_keyword("volatile") {
                return is_const;
            }
            self.bump();
        }
    }

    fn decorated(&mut self) -> Result<Option<(TypeExpr, Decoration)>, ParseError> {
        let start = self.mark();
        let mut deco = Decoration {
            is_const: self.skip_cv(),
            ..Decoration::default()
        };
        let Some(t) = self.type_expr()? else {
            self.reset(start);
            return Ok(None);
        };
        loop {
            match self.text() {
                "const" => deco.is_const = true,
                "volatile" => {}
                "*" => deco.pointers = deco.pointers.saturating_add(1),
                "&" => deco.reference = RefKind::LValue,
                "&&" => deco.reference = RefKind::RValue,
                _ => break,
            }
            self.bump();
        }
        Ok(Some((t, deco)))
    }

    fn type_expr(&mut self) -> Result<Option<TypeExpr>, ParseError> {
        let start = self.mark();
        self.skip_cv();
        if ELABORATED.contains(&self.text()) && self.tok().kind == TokenKind::Keyword {
            self.bump();
        }
        let span_start = self.tok().span.start;
        let mut t = TypeExpr::default();

        if self.text() == "::" && self.tok().kind == TokenKind::Punct {
            if self.tokens[skip_trivia(self.tokens, self.pos + 1)].kind != TokenKind::Identifier {
                self.reset(start);
                return Ok(None);
            }
            t.leading_colons = true;
            self.bump();
        }

        let tok = self.tok();
        if !self.half && tok.kind == TokenKind::Keyword && is_builtin_type(&tok.text) && !t.leading_colons {
            let mut words = vec![tok.text.clone()];
            self.bump();
            if COMBINING.contains(&words[0].as_str()) {
                while self.tok().kind == TokenKind::Keyword && COMBINING.contains(&self.text()) {
                    words.push(self.text().to_string());
                    self.bump();
                }
            }
            t.name.push(words.join(" "));
            t.span = span_start..self.consumed_end();
            return Ok(Some(t));
        }
        if self.half || tok.kind != TokenKind::Identifier {
            self.reset(start);
            return Ok(None);
        }

        loop {
            t.name.push(self.text().to_string());
            self.bump();
            if self.text() == "<" {
                let open = self.pos;
                t.args = self.arg_list(open)?;
                t.has_template_args = true;
                // Member chain after the argument list.
                while self.text() == "::" && !self.half {
                    let after = skip_trivia(self.tokens, self.pos + 1);
                    if self.tokens[after].kind != TokenKind::Identifier {
                        break;
                    }
                    self.bump();
                    t.member.push(self.text().to_string());
                    self.bump();
                    if self.text() == "<" {
                        return Err(self.error_at(self.pos, "template arguments on a nested member type are not supported"));
                    }
                }
                break;
            }
            if self.text() != "::" || self.half {
                break;
            }
            let after = skip_trivia(self.tokens, self.pos + 1);
            match self.tokens[after].kind {
                TokenKind::Identifier => self.bump(),
                _ if self.tokens[after].text == "*" => {
                    return Err(self.error_at(self.pos, "member pointer types are not supported"));
                }
                _ => break,
            }
        }
        t.span = span_start..self.consumed_end();
        Ok(Some(t))
    }

    fn arg_list(&mut self, open: usize) -> Result<Vec<TypeArg>, ParseError> {
        self.bump();
        let mut args = Vec::new();
        if self.is_closer() {
            self.close_one();
            return Ok(args);
        }
        loop {
            args.push(self.arg(open)?);
            if self.text() == "," && !self.half {
                self.bump();
                continue;
            }
            if self.is_closer() {
                self.close_one();
                return Ok(args);
            }
            return Err(self.unbalanced(open));
        }
    }

    fn unbalanced(&self, open: usize) -> ParseError {
        match self.text() {
            "=" => self.error_at(self.pos, "default argument inside a template argument list"),
            "..." => self.error_at(self.pos, "parameter packs are not supported"),
            "(" => self.error_at(self.pos, "function types are not supported"),
            _ => self.error_at(open, "unbalanced '<' in template argument list"),
        }
    }

    fn arg(&mut self, open: usize) -> Result<TypeArg, ParseError> {
        let start = self.mark();
        if let Some((ty, decoration)) = self.decorated()? {
            if self.is_closer() || (self.text() == "," && !self.half) {
                return Ok(TypeArg::Type { ty, decoration });
            }
            if matches!(self.text(), "(" | "...") {
                return Err(self.unbalanced(open));
            }
            self.reset(start);
        }
        self.opaque(open)
    }

    fn opaque(&mut self, open: usize) -> Result<TypeArg, ParseError> {
        let mut depth = 0usize;
        let mut angles = 0usize;
        let mut text = String::new();
        let mut prev_end: Option<usize> = None;
        loop {
            if self.at_eof() {
                return Err(self.error_at(open, "unbalanced '<' in template argument list"));
            }
            let s = self.text();
            if depth == 0 && angles == 0 && (self.is_closer() || s == ",") {
                break;
            }
            match s {
                "<" => angles += 1,
                ">" => angles = angles.saturating_sub(1),
                ">>" => angles = angles.saturating_sub(2),
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    if depth == 0 {
                        return Err(self.error_at(open, "unbalanced '<' in template argument list"));
                    }
                    depth -= 1;
                }
                ";" => return Err(self.error_at(open, "unbalanced '<' in template argument list")),
                "=" if depth == 0 => return Err(self.unbalanced(open)),
                "..." if depth == 0 => return Err(self.unbalanced(open)),
                _ => {}
            }
            let tok = self.tok();
            if prev_end.is_some_and(|e| e < tok.span.start) {
                text.push(' ');
            }
            text.push_str(&tok.text);
            prev_end = Some(tok.span.end);
            self.bump();
        }
        if text.is_empty() {
            return Err(self.error_at(self.pos, "empty template argument"));
        }
        Ok(TypeArg::Opaque(text))
    }
}
