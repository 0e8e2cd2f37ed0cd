//! Use-site extraction for one translation unit.
//!
//! The scanner walks the token stream with a scope stack and a handful of
//! statement-level heuristics. It records every place a type is named in a
//! way that instantiates or references it: variable declarations, aliases,
//! base classes, function parameters, `new` expressions and explicit
//! template arguments. Types that depend on an enclosing template parameter
//! are skipped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lexer::{Token, TokenKind};
use crate::type_parser::{
    can_begin_type, parse_template_args, parse_type, Decoration, ParseError, RefKind, TypeArg,
    TypeExpr,
};

/// Longest alias chain followed before giving up.
pub const MAX_ALIAS_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SiteKind {
    VariableDecl,
    AliasDecl,
    BaseClass,
    FunctionParam,
    NewExpr,
    ExplicitTemplateArg,
}

impl fmt::Display for SiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiteKind::VariableDecl => "variable-decl",
            SiteKind::AliasDecl => "alias-decl",
            SiteKind::BaseClass => "base-class",
            SiteKind::FunctionParam => "function-param",
            SiteKind::NewExpr => "new-expr",
            SiteKind::ExplicitTemplateArg => "explicit-template-arg",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UseSite {
    pub kind: SiteKind,
    pub ty: TypeExpr,
    /// Position of the type's first token.
    pub line: u32,
    pub col: u32,
    pub same_line_comments: Vec<String>,
    /// Comments on the declaration lines of every alias expanded into `ty`.
    pub alias_comments: Vec<String>,
    /// Problems met while resolving aliases for this site.
    pub notes: Vec<String>,
    /// Names of the classes whose bodies contain the site, outermost first.
    pub enclosing_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasTarget {
    pub ty: TypeExpr,
    pub decoration: Decoration,
    pub line: u32,
    pub comments: Vec<String>,
}

/// `typedef` and `using X = T;` declarations of one file.
///
/// Every alias is reachable both by its scope-qualified name and by its bare
/// name; a later declaration of the same bare name wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    entries: BTreeMap<String, AliasTarget>,
}

impl AliasTable {
    pub fn insert(&mut self, scope: &[String], name: &str, target: AliasTarget) {
        if !scope.is_empty() {
            let qualified = format!("{}::{}", scope.join("::"), name);
            self.entries.insert(qualified, target.clone());
        }
        self.entries.insert(name.to_string(), target);
    }

    /// The alias a type refers to, if it is a plain (argument-free) name.
    pub fn lookup(&self, t: &TypeExpr) -> Option<(&str, &AliasTarget)> {
        if t.has_template_args || !t.member.is_empty() {
            return None;
        }
        self.entries
            .get_key_value(&t.qualified_name())
            .map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Names of classes whose uses are flagged as deprecated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeprecatedSet {
    names: BTreeSet<String>,
}

impl DeprecatedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>) {
        self.names.insert(name.into());
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for DeprecatedSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        DeprecatedSet {
            names: iter.into_iter().map(Into::into).collect(),
        }
    }
}

impl<S: Into<String>> Extend<S> for DeprecatedSet {
    fn extend<I: IntoIterator<Item = S>>(&mut self, iter: I) {
        self.names.extend(iter.into_iter().map(Into::into));
    }
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub sites: Vec<UseSite>,
    pub aliases: AliasTable,
    pub deprecated: DeprecatedSet,
    pub errors: Vec<ParseError>,
}

/// Extracts use sites, aliases and in-file deprecated classes.
pub fn extract_sites(tokens: &[Token]) -> Extraction {
    let mut comments: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    let mut code = Vec::with_capacity(tokens.len());
    for tok in tokens {
        match tok.kind {
            TokenKind::Comment => {
                for line in tok.line..=tok.end_line() {
                    comments.entry(line).or_default().push(tok.text.clone());
                }
            }
            TokenKind::Directive => {}
            _ => code.push(tok.clone()),
        }
    }
    if code.last().is_none_or(|t| t.kind != TokenKind::Eof) {
        let end = tokens.last().map_or(0, |t| t.span.end);
        code.push(Token {
            kind: TokenKind::Eof,
            text: String::new(),
            line: tokens.last().map_or(1, |t| t.line),
            col: 1,
            span: end..end,
        });
    }

    let mut scanner = Scanner {
        toks: &code,
        pos: 0,
        scopes: vec![Scope::new(ScopeKind::Namespace, None, Vec::new())],
        active_params: Vec::new(),
        pending_params: Vec::new(),
        comments: &comments,
        out: Extraction::default(),
    };
    scanner.run();

    let mut out = scanner.out;
    out.sites.sort_by_key(|s| (s.ty.span.start, s.kind));
    out.sites
        .dedup_by(|a, b| a.kind == b.kind && a.ty.span == b.ty.span);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScopeKind {
    Namespace,
    Class,
    Block,
}

#[derive(Debug)]
struct Scope {
    kind: ScopeKind,
    name: Option<String>,
    params: Vec<String>,
}

impl Scope {
    fn new(kind: ScopeKind, name: Option<String>, params: Vec<String>) -> Self {
        Scope { kind, name, params }
    }
}

enum Declarator {
    Named,
    Operator,
    Other,
}

const DECL_SPECIFIERS: &[&str] = &[
    "static", "extern", "inline", "virtual", "explicit", "constexpr", "consteval", "constinit",
    "mutable", "thread_local", "register", "friend",
];

const CASTS: &[&str] = &["static_cast", "dynamic_cast", "reinterpret_cast", "const_cast"];

struct Scanner<'t> {
    toks: &'t [Token],
    pos: usize,
    scopes: Vec<Scope>,
    /// Template parameters of the declaration being scanned.
    active_params: Vec<String>,
    /// Parameters from `template <...>` heads not yet attached to a declaration.
    pending_params: Vec<String>,
    comments: &'t BTreeMap<u32, Vec<String>>,
    out: Extraction,
}

impl<'t> Scanner<'t> {
    // ---- token helpers ----

    fn tok(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn nth(&self, n: usize) -> &'t Token {
        self.get(self.pos + n)
    }

    /// Token at `i`, or EOF past the end.
    fn get(&self, i: usize) -> &'t Token {
        &self.toks[i.min(self.toks.len() - 1)]
    }

    fn at(&self, text: &str) -> bool {
        self.tok().is(text)
    }

    fn at_eof(&self) -> bool {
        self.tok().kind == TokenKind::Eof
    }

    fn bump(&mut self) {
        if !self.at_eof() {
            self.pos += 1;
        }
    }

    fn scope_kind(&self) -> ScopeKind {
        self.scopes.last().map_or(ScopeKind::Namespace, |s| s.kind)
    }

    /// Index of the bracket closing the one at `open`, or EOF.
    fn matching(&self, open: usize) -> usize {
        let mut depth = 0usize;
        let mut i = open;
        while i < self.toks.len() {
            let t = self.get(i);
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth = depth.saturating_sub(1);
                        if depth == 0 {
                            return i;
                        }
                    }
                    _ => {}
                }
            }
            if t.kind == TokenKind::Eof {
                return i;
            }
            i += 1;
        }
        self.toks.len() - 1
    }

    /// First index at or after `from` holding one of `stops` at bracket
    /// depth zero, or an unmatched `}` / EOF.
    fn find_at_depth0(&self, from: usize, stops: &[&str]) -> usize {
        let mut i = from.min(self.toks.len() - 1);
        let mut depth = 0usize;
        loop {
            let t = &self.toks[i];
            if t.kind == TokenKind::Eof {
                return i;
            }
            if t.kind == TokenKind::Punct {
                let s = t.text.as_str();
                if depth == 0 && stops.contains(&s) {
                    return i;
                }
                match s {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            return i;
                        }
                        depth -= 1;
                    }
                    _ => {}
                }
            }
            i += 1;
        }
    }

    fn all_params(&self) -> impl Iterator<Item = &String> {
        self.scopes
            .iter()
            .flat_map(|s| s.params.iter())
            .chain(self.active_params.iter())
    }

    fn is_dependent(&self, t: &TypeExpr) -> bool {
        let params: BTreeSet<&str> = self.all_params().map(String::as_str).collect();
        if params.is_empty() {
            return false;
        }
        let mut dependent = false;
        t.walk(&mut |_, node| {
            if !node.leading_colons && node.name.first().is_some_and(|n| params.contains(n.as_str())) {
                dependent = true;
            }
        });
        dependent
    }

    fn scope_path(&self) -> Vec<String> {
        self.scopes.iter().filter_map(|s| s.name.clone()).collect()
    }

    fn line_comments(&self, first: u32, last: u32) -> Vec<String> {
        let mut out = Vec::new();
        for (_, texts) in self.comments.range(first..=last) {
            for t in texts {
                if !out.contains(t) {
                    out.push(t.clone());
                }
            }
        }
        out
    }

    fn position_of(&self, byte: usize) -> (u32, u32) {
        let idx = self.toks.partition_point(|t| t.span.start < byte);
        let t = &self.toks[idx.min(self.toks.len() - 1)];
        (t.line, t.col)
    }

    fn emit(&mut self, kind: SiteKind, ty: TypeExpr) {
        if self.is_dependent(&ty) {
            return;
        }
        let (line, col) = self.position_of(ty.span.start);
        let same_line_comments = self.line_comments(line, line);
        let enclosing_classes = self
            .scopes
            .iter()
            .filter(|s| s.kind == ScopeKind::Class)
            .filter_map(|s| s.name.clone())
            .collect();
        self.out.sites.push(UseSite {
            kind,
            ty,
            line,
            col,
            same_line_comments,
            alias_comments: Vec::new(),
            notes: Vec::new(),
            enclosing_classes,
        });
    }

    fn record(&mut self, err: ParseError) {
        if !self.out.errors.contains(&err) {
            self.out.errors.push(err);
        }
    }

    // ---- driver ----

    fn run(&mut self) {
        while !self.at_eof() {
            let before = self.pos;
            if !self.at("template") {
                self.active_params = std::mem::take(&mut self.pending_params);
            }
            self.item();
            if self.pos == before {
                self.bump();
            }
        }
    }

    fn push_scope(&mut self, kind: ScopeKind, name: Option<String>) {
        let params = std::mem::take(&mut self.active_params);
        self.scopes.push(Scope::new(kind, name, params));
    }

    fn item(&mut self) {
        let tok = self.tok();
        let text = tok.text.as_str();
        let block = self.scope_kind() == ScopeKind::Block;
        if tok.kind == TokenKind::Punct {
            match text {
                ";" => return self.bump(),
                "{" => {
                    self.bump();
                    return self.push_scope(ScopeKind::Block, None);
                }
                "}" => return self.close_scope(),
                "~" => return self.destructor(),
                "[" if self.nth(1).is("[") => {
                    let end = self.matching(self.pos);
                    self.pos = end + 1;
                    return;
                }
                _ => {}
            }
        }
        if tok.kind == TokenKind::Keyword {
            match text {
                "namespace" => return self.namespace(),
                "template" => return self.template_head(),
                "using" => return self.using(),
                "typedef" => return self.typedef(),
                "class" | "struct" | "union" => return self.class_or_decl(),
                "enum" => return self.enum_or_decl(),
                "static_assert" | "asm" => return self.skip_statement(false),
                "public" | "private" | "protected" if self.nth(1).is(":") => {
                    self.pos += 2;
                    return;
                }
                "extern" if self.nth(1).kind == TokenKind::StringLit => {
                    self.pos += 2;
                    if self.at("{") {
                        self.bump();
                        self.push_scope(ScopeKind::Namespace, None);
                    }
                    return;
                }
                _ => {}
            }
            if block {
                match text {
                    "if" | "while" | "switch" | "for" | "catch" => return self.control(),
                    "else" | "do" | "try" => return self.bump(),
                    "case" => {
                        let end = self.find_at_depth0(self.pos, &[":"]);
                        self.scan_range(self.pos + 1, end);
                        self.pos = end + 1;
                        return;
                    }
                    "default" if self.nth(1).is(":") => {
                        self.pos += 2;
                        return;
                    }
                    "return" | "throw" | "co_return" | "co_yield" | "co_await" | "delete"
                    | "goto" | "break" | "continue" => {
                        self.bump();
                        return self.expression_statement();
                    }
                    _ => {}
                }
            }
        }
        if block && tok.kind == TokenKind::Identifier && self.nth(1).is(":") {
            // Label.
            self.pos += 2;
            return;
        }
        self.declaration();
    }

    fn close_scope(&mut self) {
        self.bump();
        if self.scopes.len() > 1 {
            let scope = self.scopes.pop().expect("non-root scope");
            if scope.kind == ScopeKind::Class {
                // Declarators after a class body: `struct S { } s, *p;`
                let end = self.find_at_depth0(self.pos, &[";"]);
                self.scan_range(self.pos, end);
                self.pos = end;
                if self.at(";") {
                    self.bump();
                }
            }
        }
    }

    fn namespace(&mut self) {
        self.bump();
        let mut name = Vec::new();
        while !self.at_eof() && !self.at("{") && !self.at(";") && !self.at("=") {
            if self.tok().kind == TokenKind::Identifier {
                name.push(self.tok().text.clone());
            }
            self.bump();
        }
        if self.at("{") {
            self.bump();
            let name = (!name.is_empty()).then(|| name.join("::"));
            self.push_scope(ScopeKind::Namespace, name);
        } else {
            self.skip_statement(false);
        }
    }

    fn template_head(&mut self) {
        self.bump();
        if !self.at("<") {
            // Explicit instantiation.
            return self.skip_statement(false);
        }
        self.bump();
        let mut depth = 1usize;
        let mut last_ident: Option<String> = None;
        let mut in_default = false;
        while !self.at_eof() && depth > 0 {
            let t = self.tok();
            match t.text.as_str() {
                "<" if t.kind == TokenKind::Punct => depth += 1,
                ">" if t.kind == TokenKind::Punct => depth -= 1,
                ">>" if t.kind == TokenKind::Punct => depth = depth.saturating_sub(2),
                "(" | "[" | "{" => {
                    let end = self.matching(self.pos);
                    self.pos = end;
                }
                "=" if depth == 1 => in_default = true,
                "," if depth == 1 => {
                    self.pending_params.extend(last_ident.take());
                    in_default = false;
                }
                _ if t.kind == TokenKind::Identifier && depth == 1 && !in_default => {
                    last_ident = Some(t.text.clone());
                }
                _ => {}
            }
            self.bump();
        }
        self.pending_params.extend(last_ident);
    }

    fn using(&mut self) {
        let start = self.pos;
        self.bump();
        if self.tok().kind == TokenKind::Identifier && self.nth(1).is("=") {
            let name = self.tok().text.clone();
            self.pos += 2;
            let decl_line = self.toks[start].line;
            match parse_type(self.toks, self.pos) {
                Ok(Some((ty, next))) => {
                    self.pos = next;
                    let decoration = self.ptr_ops();
                    if self.at(";") {
                        self.register_alias(&name, ty.clone(), decoration, decl_line);
                        self.emit(SiteKind::AliasDecl, ty);
                    }
                }
                Ok(None) => {}
                Err(e) => self.record(e),
            }
        }
        self.skip_statement(false);
    }

    fn typedef(&mut self) {
        let start = self.pos;
        self.bump();
        if matches!(self.tok().text.as_str(), "class" | "struct" | "union" | "enum")
            && self.tok().kind == TokenKind::Keyword
        {
            let brace = self.find_at_depth0(self.pos, &["{", ";"]);
            if self.toks[brace].is("{") {
                return if self.at("enum") {
                    self.enum_or_decl()
                } else {
                    self.class_or_decl()
                };
            }
        }
        let ty = match parse_type(self.toks, self.pos) {
            Ok(Some((ty, next))) => {
                self.pos = next;
                ty
            }
            Ok(None) => return self.skip_statement(false),
            Err(e) => {
                self.record(e);
                return self.skip_statement(false);
            }
        };
        let decl_line = self.toks[start].line;
        let mut registered = false;
        loop {
            let decoration = self.ptr_ops();
            if self.tok().kind != TokenKind::Identifier {
                break;
            }
            let name = self.tok().text.clone();
            self.bump();
            if self.at("[") {
                let end = self.matching(self.pos);
                self.pos = end + 1;
            } else {
                self.register_alias(&name, ty.clone(), decoration, decl_line);
            }
            registered = true;
            if self.at(",") {
                self.bump();
                continue;
            }
            break;
        }
        if registered && self.at(";") {
            self.emit(SiteKind::AliasDecl, ty);
        }
        self.skip_statement(false);
    }

    fn register_alias(&mut self, name: &str, ty: TypeExpr, decoration: Decoration, line: u32) {
        if self.is_dependent(&ty) {
            return;
        }
        let end_line = self.tok().line;
        let comments = self.line_comments(line, end_line.max(line));
        let scope = self.scope_path();
        self.out.aliases.insert(
            &scope,
            name,
            AliasTarget {
                ty,
                decoration,
                line,
                comments,
            },
        );
    }

    fn class_or_decl(&mut self) {
        let start = self.pos;
        self.bump();
        self.skip_attributes();
        let mut class_name: Option<String> = None;
        if self.tok().kind == TokenKind::Identifier {
            match parse_type(self.toks, self.pos) {
                Ok(Some((head, next))) => {
                    class_name = Some(head.final_segment().to_string());
                    self.pos = next;
                }
                _ => {
                    self.pos = start;
                    return self.declaration();
                }
            }
        }
        if self.tok().kind == TokenKind::Identifier && self.tok().text == "final" {
            self.bump();
        }
        if self.at(":") {
            self.bump();
            self.base_clause(class_name.as_deref());
        }
        if self.at("{") {
            self.bump();
            self.push_scope(ScopeKind::Class, class_name);
        } else if self.at(";") && class_name.is_some() {
            self.bump();
        } else {
            self.pos = start;
            self.declaration();
        }
    }

    fn base_clause(&mut self, class_name: Option<&str>) {
        loop {
            while matches!(self.tok().text.as_str(), "public" | "private" | "protected" | "virtual")
                && self.tok().kind == TokenKind::Keyword
            {
                self.bump();
            }
            match parse_type(self.toks, self.pos) {
                Ok(Some((base, next))) => {
                    self.pos = next;
                    if let Some(name) = class_name {
                        if is_deprecated_marker_of(&base, name) && !self.is_dependent(&base) {
                            self.out.deprecated.insert(name);
                        }
                    }
                    self.emit(SiteKind::BaseClass, base);
                }
                Ok(None) => {}
                Err(e) => {
                    self.record(e);
                    self.pos = self.find_at_depth0(self.pos, &["{", ";"]);
                    return;
                }
            }
            if self.at("...") {
                self.bump();
            }
            if self.at(",") {
                self.bump();
                continue;
            }
            if !self.at("{") && !self.at(";") {
                self.pos = self.find_at_depth0(self.pos, &["{", ";"]);
            }
            return;
        }
    }

    fn enum_or_decl(&mut self) {
        let start = self.pos;
        self.bump();
        if matches!(self.tok().text.as_str(), "class" | "struct") {
            self.bump();
        }
        if self.tok().kind == TokenKind::Identifier {
            self.bump();
        }
        if self.at(":") {
            self.bump();
            if let Ok(Some((_, next))) = parse_type(self.toks, self.pos) {
                self.pos = next;
            }
        }
        if self.at("{") {
            let end = self.matching(self.pos);
            self.pos = end + 1;
            self.skip_statement(false);
        } else if self.at(";") {
            self.bump();
        } else {
            self.pos = start;
            self.declaration();
        }
    }

    fn control(&mut self) {
        self.bump();
        if self.at("constexpr") {
            self.bump();
        }
        if !self.at("(") {
            return;
        }
        let open = self.pos;
        let close = self.matching(open);
        self.bump();
        // A declaration may lead the condition: `for (T x = ...;`, `catch (const E& e)`.
        self.skip_specifiers();
        if can_begin_type(self.tok()) {
            if let Ok(Some((ty, next))) = parse_type(self.toks, self.pos) {
                let save = self.pos;
                self.pos = next;
                self.ptr_ops();
                let named = self.tok().kind == TokenKind::Identifier
                    && matches!(self.nth(1).text.as_str(), "=" | ":" | ";" | "{" | "(" | ")" | ",")
                    && next < close;
                let unnamed_catch = self.toks[open - 1].is("catch") && self.at(")");
                if named || unnamed_catch {
                    self.emit(SiteKind::VariableDecl, ty);
                } else {
                    self.pos = save;
                }
            }
        }
        self.scan_range(self.pos, close);
        self.pos = close + 1;
    }

    fn destructor(&mut self) {
        self.bump();
        if self.tok().kind == TokenKind::Identifier {
            self.bump();
        }
        if self.at("(") && self.scope_kind() != ScopeKind::Block {
            self.pos = self.matching(self.pos) + 1;
            self.function_tail();
        } else {
            self.expression_statement();
        }
    }

    // ---- declarations ----

    fn skip_attributes(&mut self) {
        loop {
            if self.at("[") && self.nth(1).is("[") {
                self.pos = self.matching(self.pos) + 1;
            } else if (self.tok().text == "alignas" || self.tok().text == "__attribute__" || self.tok().text == "__declspec")
                && self.nth(1).is("(")
            {
                self.bump();
                self.pos = self.matching(self.pos) + 1;
            } else {
                return;
            }
        }
    }

    fn skip_specifiers(&mut self) {
        loop {
            self.skip_attributes();
            if self.tok().kind == TokenKind::Keyword && DECL_SPECIFIERS.contains(&self.tok().text.as_str()) {
                self.bump();
            } else {
                return;
            }
        }
    }

    /// Consumes `*`, `&`, `&&` and cv-qualifiers of a declarator.
    fn ptr_ops(&mut self) -> Decoration {
        let mut d = Decoration::default();
        loop {
            match self.tok().text.as_str() {
                "*" => d.pointers = d.pointers.saturating_add(1),
                "&" => d.reference = RefKind::LValue,
                "&&" => d.reference = RefKind::RValue,
                "const" => d.is_const = true,
                "volatile" | "__restrict" | "__restrict__" => {}
                _ => return d,
            }
            self.bump();
        }
    }

    fn declarator(&mut self) -> Declarator {
        self.ptr_ops();
        if self.at("operator") {
            self.bump();
            self.operator_id();
            return Declarator::Operator;
        }
        if self.tok().kind != TokenKind::Identifier && !self.at("::") {
            return Declarator::Other;
        }
        match parse_type(self.toks, self.pos) {
            Ok(Some((_, next))) => self.pos = next,
            _ => self.bump(),
        }
        // `A::~A`, `A::operator=`
        if self.at("::") {
            self.bump();
            if self.at("~") {
                self.bump();
                self.bump();
            } else if self.at("operator") {
                self.bump();
                self.operator_id();
                return Declarator::Operator;
            }
        }
        Declarator::Named
    }

    fn operator_id(&mut self) {
        match self.tok().text.as_str() {
            "(" if self.nth(1).is(")") => self.pos += 2,
            "[" if self.nth(1).is("]") => self.pos += 2,
            "new" | "delete" => {
                self.bump();
                if self.at("[") && self.nth(1).is("]") {
                    self.pos += 2;
                }
            }
            _ if self.tok().kind == TokenKind::Punct && !self.at("(") => self.bump(),
            _ if self.tok().kind == TokenKind::StringLit => {
                self.bump();
                self.bump();
            }
            _ => {
                // Conversion function.
                if let Ok(Some((_, next))) = parse_type(self.toks, self.pos) {
                    self.pos = next;
                    self.ptr_ops();
                }
            }
        }
    }

    fn declaration(&mut self) {
        let start = self.pos;
        let scope = self.scope_kind();
        self.skip_specifiers();
        if self.at("operator") {
            // Conversion operator, no return type.
            self.bump();
            self.operator_id();
            return self.function_or_fallback(start);
        }
        if !can_begin_type(self.tok()) {
            self.pos = start;
            return self.fallback();
        }
        let ty = match parse_type(self.toks, self.pos) {
            Ok(Some((ty, next))) => {
                self.pos = next;
                ty
            }
            Ok(None) => {
                self.pos = start;
                return self.fallback();
            }
            Err(e) => {
                // In blocks `a < b` is usually a comparison; only a
                // qualified head like `std::vector<` is taken as a type.
                if scope != ScopeKind::Block || qualified_head(self.toks, self.pos) {
                    self.record(e);
                }
                self.pos = start;
                return self.fallback();
            }
        };
        if self.at("(") {
            // Constructor or function-style cast.
            if scope == ScopeKind::Block {
                self.pos = start;
                return self.expression_statement();
            }
            return self.function_or_fallback(start);
        }
        match self.declarator() {
            Declarator::Operator => self.function_or_fallback(start),
            Declarator::Other => {
                self.pos = start;
                self.fallback();
            }
            Declarator::Named => {
                let next = self.tok().text.as_str();
                let is_decl = self.tok().kind == TokenKind::Punct
                    && matches!(next, ";" | "," | "=" | "[" | "{" | "(")
                    || (next == ":" && scope == ScopeKind::Class);
                if !is_decl {
                    self.pos = start;
                    return self.fallback();
                }
                if next == "(" && scope != ScopeKind::Block {
                    if let Some(params) = self.try_params() {
                        for p in params {
                            self.emit(SiteKind::FunctionParam, p);
                        }
                        return self.function_tail();
                    }
                }
                self.emit(SiteKind::VariableDecl, ty);
                self.init_declarators();
            }
        }
    }

    fn function_or_fallback(&mut self, start: usize) {
        if self.at("(") {
            if let Some(params) = self.try_params() {
                for p in params {
                    self.emit(SiteKind::FunctionParam, p);
                }
                return self.function_tail();
            }
        }
        self.pos = start;
        self.fallback();
    }

    /// Initializers and further declarators after the first declarator name.
    fn init_declarators(&mut self) {
        loop {
            match self.tok().text.as_str() {
                "[" | "(" | "{" => {
                    let end = self.matching(self.pos);
                    self.scan_range(self.pos + 1, end);
                    self.pos = end + 1;
                }
                "=" | ":" => {
                    let end = self.find_at_depth0(self.pos + 1, &[",", ";"]);
                    self.scan_range(self.pos + 1, end);
                    self.pos = end;
                }
                "," => {
                    self.bump();
                    self.ptr_ops();
                    if self.tok().kind == TokenKind::Identifier {
                        self.bump();
                    }
                }
                ";" => return self.bump(),
                _ => return self.skip_statement(true),
            }
        }
    }

    /// Parses a parameter list at `(`. On success the cursor is after `)`.
    fn try_params(&mut self) -> Option<Vec<TypeExpr>> {
        let save = self.pos;
        let close = self.matching(self.pos);
        self.bump();
        let mut params = Vec::new();
        let mut defaults = Vec::new();
        let ok = loop {
            if self.pos == close {
                break true;
            }
            if self.at("...") {
                self.bump();
                break self.pos == close;
            }
            self.skip_attributes();
            while self.at("register") {
                self.bump();
            }
            if !can_begin_type(self.tok()) {
                break false;
            }
            let Ok(Some((ty, next))) = parse_type(self.toks, self.pos) else {
                break false;
            };
            self.pos = next;
            self.ptr_ops();
            if self.at("...") {
                self.bump();
            }
            if self.tok().kind == TokenKind::Identifier {
                self.bump();
            }
            while self.at("[") {
                self.pos = self.matching(self.pos) + 1;
            }
            if self.at("=") {
                let end = self.find_at_depth0(self.pos + 1, &[",", ")"]);
                defaults.push((self.pos + 1, end));
                self.pos = end;
            }
            params.push(ty);
            if self.at(",") {
                self.bump();
                continue;
            }
            break self.pos == close;
        };
        if !ok {
            self.pos = save;
            return None;
        }
        self.pos = close + 1;
        for (a, b) in defaults {
            self.scan_range(a, b);
        }
        Some(params)
    }

    /// Everything after a function's parameter list: qualifiers, trailing
    /// return type, constructor initializers, and the body.
    fn function_tail(&mut self) {
        loop {
            let t = self.tok();
            match t.text.as_str() {
                "const" | "volatile" | "&" | "&&" | "override" | "final" | "mutable" => self.bump(),
                "noexcept" | "throw" | "requires" | "__attribute__" => {
                    self.bump();
                    if self.at("(") {
                        self.pos = self.matching(self.pos) + 1;
                    }
                }
                "->" => {
                    self.bump();
                    match parse_type(self.toks, self.pos) {
                        Ok(Some((_, next))) => {
                            self.pos = next;
                            self.ptr_ops();
                        }
                        _ => return self.skip_statement(true),
                    }
                }
                "=" => return self.skip_statement(false),
                ":" => {
                    self.bump();
                    self.ctor_initializers();
                }
                "try" => self.bump(),
                "{" => {
                    self.bump();
                    return self.push_scope(ScopeKind::Block, None);
                }
                ";" => return self.bump(),
                _ if t.kind == TokenKind::Eof => return,
                _ => return self.skip_statement(true),
            }
        }
    }

    fn ctor_initializers(&mut self) {
        loop {
            match parse_type(self.toks, self.pos) {
                Ok(Some((_, next))) => self.pos = next,
                _ => return,
            }
            if self.at("(") || self.at("{") {
                let end = self.matching(self.pos);
                self.scan_range(self.pos + 1, end);
                self.pos = end + 1;
            }
            if self.at("...") {
                self.bump();
            }
            if self.at(",") {
                self.bump();
            } else {
                return;
            }
        }
    }

    // ---- statements and expressions ----

    /// Unrecognized construct: an expression in a block, otherwise skipped
    /// up to `;` or into a body.
    fn fallback(&mut self) {
        if self.scope_kind() == ScopeKind::Block {
            self.expression_statement()
        } else {
            self.skip_statement(true)
        }
    }

    fn expression_statement(&mut self) {
        let end = self.find_at_depth0(self.pos, &[";"]);
        self.scan_range(self.pos, end);
        self.pos = end;
        if self.at(";") {
            self.bump();
        }
    }

    /// Skips to the end of the statement. With `body_opens_scope`, a `{`
    /// reached at depth zero starts a block that is scanned as a body.
    fn skip_statement(&mut self, body_opens_scope: bool) {
        let stops: &[&str] = if body_opens_scope { &[";", "{"] } else { &[";"] };
        let end = self.find_at_depth0(self.pos, stops);
        self.scan_range(self.pos, end);
        self.pos = end;
        if self.at(";") {
            self.bump();
        } else if self.at("{") {
            self.bump();
            self.push_scope(ScopeKind::Block, None);
        }
    }

    /// Looks for `new` expressions, casts and explicit template arguments
    /// among tokens `[from, to)`.
    fn scan_range(&mut self, from: usize, to: usize) {
        let to = to.min(self.toks.len() - 1);
        let mut i = from;
        while i < to {
            let t = &self.toks[i];
            if t.kind == TokenKind::Keyword && t.text == "new" {
                i = self.new_expression(i + 1);
                continue;
            }
            if t.kind == TokenKind::Keyword && CASTS.contains(&t.text.as_str()) && self.get(i + 1).is("<") {
                match parse_template_args(self.toks, i + 1) {
                    Ok((args, next)) => {
                        if let Some(TypeArg::Type { ty, .. }) = args.into_iter().next() {
                            self.emit(SiteKind::ExplicitTemplateArg, ty);
                        }
                        i = next;
                    }
                    Err(e) => {
                        self.record(e);
                        i += 2;
                    }
                }
                continue;
            }
            let starts_name = t.kind == TokenKind::Identifier
                || (t.is("::") && self.get(i + 1).kind == TokenKind::Identifier);
            let after_name = i > 0 && (self.toks[i - 1].is("::"));
            if starts_name && !after_name {
                if let Ok(Some((ty, next))) = parse_type(self.toks, i) {
                    if ty.has_template_args
                        && next <= to
                        && (self.get(next).is("(") || self.get(next).is("{"))
                        && plausible_template_args(&ty)
                    {
                        self.emit(SiteKind::ExplicitTemplateArg, ty);
                        i = next;
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    fn new_expression(&mut self, mut i: usize) -> usize {
        if self.get(i).is("(") {
            let close = self.matching(i);
            if can_begin_type(self.get(close + 1)) {
                // Placement arguments come first; scan them too.
                self.scan_range(i + 1, close);
                i = close + 1;
            } else {
                // Parenthesized type-id.
                return match parse_type(self.toks, i + 1) {
                    Ok(Some((ty, _))) => {
                        self.emit(SiteKind::NewExpr, ty);
                        close + 1
                    }
                    Ok(None) => close + 1,
                    Err(e) => {
                        self.record(e);
                        close + 1
                    }
                };
            }
        }
        match parse_type(self.toks, i) {
            Ok(Some((ty, next))) => {
                self.emit(SiteKind::NewExpr, ty);
                next
            }
            Ok(None) => i,
            Err(e) => {
                self.record(e);
                i + 1
            }
        }
    }
}

fn qualified_head(tokens: &[Token], pos: usize) -> bool {
    tokens.get(pos + 1).is_some_and(|t| t.is("::")) || tokens[pos].is("::")
}

/// Explicit template arguments in expressions must look like types or
/// literals; anything else is more likely a comparison.
fn plausible_template_args(ty: &TypeExpr) -> bool {
    ty.args.iter().all(|a| match a {
        TypeArg::Type { .. } => true,
        TypeArg::Opaque(text) => {
            text == "true"
                || text == "false"
                || text.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '\'')
        }
    })
}

/// `Deprecated<Self>` where `Self` is textually the class name.
pub fn is_deprecated_marker_of(base: &TypeExpr, class_name: &str) -> bool {
    base.final_segment() == "Deprecated"
        && base.args.len() == 1
        && base.arg_type(0).is_some_and(|(arg, deco)| {
            deco.is_plain()
                && !arg.has_template_args
                && arg.member.is_empty()
                && arg.final_segment() == class_name
        })
}

/// Replaces alias names in every site's type by their expansions.
///
/// Alias-declaration sites are left alone. A site whose expansion hits a
/// cycle or exceeds [`MAX_ALIAS_DEPTH`] keeps its original type and gains a
/// note instead.
pub fn resolve_aliases(sites: Vec<UseSite>, table: &AliasTable) -> Vec<UseSite> {
    if table.is_empty() {
        return sites;
    }
    sites
        .into_iter()
        .map(|mut site| {
            if site.kind == SiteKind::AliasDecl {
                return site;
            }
            let mut comments = Vec::new();
            match expand(&site.ty, table, &mut Vec::new(), &mut comments) {
                Ok((mut ty, _)) => {
                    ty.span = site.ty.span.clone();
                    site.ty = ty;
                    for c in comments {
                        if !site.alias_comments.contains(&c) {
                            site.alias_comments.push(c);
                        }
                    }
                }
                Err(note) => {
                    if !site.notes.contains(&note) {
                        site.notes.push(note);
                    }
                }
            }
            site
        })
        .collect()
}

fn expand(
    t: &TypeExpr,
    table: &AliasTable,
    chain: &mut Vec<String>,
    comments: &mut Vec<String>,
) -> Result<(TypeExpr, Decoration), String> {
    if let Some((key, target)) = table.lookup(t) {
        if chain.iter().any(|k| k == key) {
            return Err(format!("alias '{key}' refers to itself; type left unexpanded"));
        }
        if chain.len() >= MAX_ALIAS_DEPTH {
            return Err(format!(
                "alias chain through '{key}' is deeper than {MAX_ALIAS_DEPTH}; type left unexpanded"
            ));
        }
        chain.push(key.to_string());
        comments.extend(target.comments.iter().cloned());
        let (ty, inner) = expand(&target.ty, table, chain, comments)?;
        chain.pop();
        return Ok((ty, inner.compose(target.decoration)));
    }
    let mut out = t.clone();
    for arg in &mut out.args {
        if let TypeArg::Type { ty, decoration } = arg {
            let (expanded, extra) = expand(ty, table, chain, comments)?;
            *decoration = extra.compose(*decoration);
            *ty = expanded;
        }
    }
    Ok((out, Decoration::default()))
}
