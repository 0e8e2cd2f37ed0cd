//! Tokenizer for analyzed C++ sources.
//!
//! The lexer is lossless: every non-whitespace byte of the input belongs to
//! exactly one token, comments included, so later stages can look at
//! same-line comments and report exact positions. There is no preprocessing;
//! a `#` directive becomes a single [`TokenKind::Directive`] token.

use std::fmt;
use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Punct,
    Number,
    StringLit,
    CharLit,
    Comment,
    Directive,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first byte.
    pub line: u32,
    /// 1-based column, counted in characters.
    pub col: u32,
    pub span: Range<usize>,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && !matches!(self.kind, TokenKind::Comment | TokenKind::StringLit)
    }

    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Comment | TokenKind::Directive)
    }

    /// Line of the last byte of the token (differs from `line` for
    /// multi-line comments and raw strings).
    pub fn end_line(&self) -> u32 {
        self.line + self.text.matches('\n').count() as u32
    }
}

/// A region the lexer could not close. The offending text is still emitted
/// as a token up to the end of its line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub errors: Vec<LexError>,
}

const KEYWORDS: &[&str] = &[
    "alignas", "alignof", "asm", "auto", "bool", "break", "case", "catch", "char", "char8_t",
    "char16_t", "char32_t", "class", "co_await", "co_return", "co_yield", "concept", "const",
    "const_cast", "consteval", "constexpr", "constinit", "continue", "decltype", "default",
    "delete", "do", "double", "dynamic_cast", "else", "enum", "explicit", "export", "extern",
    "false", "float", "for", "friend", "goto", "if", "inline", "int", "long", "mutable",
    "namespace", "new", "noexcept", "nullptr", "operator", "private", "protected", "public",
    "register", "reinterpret_cast", "requires", "return", "short", "signed", "sizeof", "static",
    "static_assert", "static_cast", "struct", "switch", "template", "this", "thread_local",
    "throw", "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
    "virtual", "void", "volatile", "wchar_t", "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

// Longest first within each leading character.
const PUNCTUATORS: &[&str] = &[
    "<=>", "<<=", ">>=", "...", "->*", "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", ".*", "##",
];

const STRING_PREFIXES: &[&str] = &["u8", "u", "U", "L", "R", "u8R", "uR", "UR", "LR"];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    at_line_start: bool,
    out: Lexed,
}

pub fn tokenize(source: &str) -> Lexed {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
        at_line_start: true,
        out: Lexed::default(),
    };
    lexer.run();
    lexer.out
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_ascii_alphabetic() || !c.is_ascii()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_ascii_alphanumeric() || !c.is_ascii()
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
            self.at_line_start = true;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn skip_to_eol(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn run(&mut self) {
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let Some(c) = self.peek() else { break };
            let (start, line, col) = (self.pos, self.line, self.col);
            let line_start = self.at_line_start;
            self.at_line_start = false;
            let kind = self.lex_one(c, line_start, line, col);
            self.push(kind, start, line, col);
        }
        let end = self.src.len();
        self.out.tokens.push(Token {
            kind: TokenKind::Eof,
            text: String::new(),
            line: self.line,
            col: self.col,
            span: end..end,
        });
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        self.out.tokens.push(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            col,
            span: start..self.pos,
        });
    }

    fn error(&mut self, line: u32, col: u32, message: impl Into<String>) {
        self.out.errors.push(LexError {
            line,
            col,
            message: message.into(),
        });
    }

    fn lex_one(&mut self, c: char, line_start: bool, line: u32, col: u32) -> TokenKind {
        let rest = self.rest();
        if rest.starts_with("//") {
            self.skip_to_eol();
            return TokenKind::Comment;
        }
        if let Some(body) = rest.strip_prefix("/*") {
            match body.find("*/") {
                Some(end) => {
                    let len = rest[..end + 4].chars().count();
                    self.bump_n(len);
                }
                None => {
                    self.error(line, col, "unterminated block comment");
                    self.skip_to_eol();
                }
            }
            return TokenKind::Comment;
        }
        if c == '#' && line_start {
            self.lex_directive();
            return TokenKind::Directive;
        }
        if is_ident_start(c) {
            let word_len: usize = rest
                .char_indices()
                .find(|&(_, ch)| !is_ident_continue(ch))
                .map_or(rest.len(), |(i, _)| i);
            let word = &rest[..word_len];
            let next = rest[word_len..].chars().next();
            if STRING_PREFIXES.contains(&word) && matches!(next, Some('"') | Some('\'')) {
                let raw = word.ends_with('R') && next == Some('"');
                self.bump_n(word.chars().count());
                return match next {
                    Some('"') if raw => self.lex_raw_string(line, col),
                    Some('"') => self.lex_quoted('"', line, col),
                    _ => self.lex_quoted('\'', line, col),
                };
            }
            self.bump_n(word.chars().count());
            return if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
        }
        if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
        {
            self.lex_number();
            return TokenKind::Number;
        }
        if c == '"' {
            return self.lex_quoted('"', line, col);
        }
        if c == '\'' {
            return self.lex_quoted('\'', line, col);
        }
        let len = PUNCTUATORS
            .iter()
            .find(|p| rest.starts_with(*p))
            .map_or(1, |p| p.len());
        self.bump_n(len);
        TokenKind::Punct
    }

    fn lex_directive(&mut self) {
        loop {
            self.skip_to_eol();
            // Backslash-newline continues the directive.
            let text = &self.src[..self.pos];
            let continued = text.trim_end_matches('\r').ends_with('\\');
            if continued && self.peek() == Some('\n') {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn lex_number(&mut self) {
        let mut prev = '\0';
        while let Some(c) = self.peek() {
            let sign_after_exponent =
                matches!(c, '+' | '-') && matches!(prev, 'e' | 'E' | 'p' | 'P');
            if c.is_ascii_alphanumeric() || c == '.' || c == '_' || c == '\'' || sign_after_exponent
            {
                // A digit separator must be followed by a digit.
                if c == '\'' && !self.peek_at(1).is_some_and(|d| d.is_ascii_alphanumeric()) {
                    break;
                }
                prev = c;
                self.bump();
            } else {
                break;
            }
        }
    }

    fn lex_quoted(&mut self, quote: char, line: u32, col: u32) -> TokenKind {
        let kind = if quote == '"' {
            TokenKind::StringLit
        } else {
            TokenKind::CharLit
        };
        self.bump();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    let what = if quote == '"' { "string" } else { "character" };
                    self.error(line, col, format!("unterminated {what} literal"));
                    return kind;
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some() {
                        self.bump();
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    return kind;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn lex_raw_string(&mut self, line: u32, col: u32) -> TokenKind {
        let rest = &self.rest()[1..];
        let delim_end = rest.find('(').filter(|&i| i <= 16 && !rest[..i].contains(['\n', ' ', ')', '\\']));
        let closed = delim_end.and_then(|d| {
            let closer = format!("){}\"", &rest[..d]);
            rest[d + 1..].find(&closer).map(|at| 1 + d + 1 + at + closer.len())
        });
        match closed {
            Some(len) => {
                let chars = self.rest()[..len].chars().count();
                self.bump_n(chars);
            }
            None => {
                self.error(line, col, "unterminated raw string literal");
                self.skip_to_eol();
            }
        }
        TokenKind::StringLit
    }
}
