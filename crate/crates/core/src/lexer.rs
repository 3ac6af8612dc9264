//! Lossless, heuristic C/C++ lexer.
//!
//! The lexer splits a function fragment into tokens whose texts concatenate
//! back to the exact input. It does not preprocess, does not understand
//! trigraphs or digraphs, and never fails: an unterminated comment or
//! literal turns the rest of the input into a single [`TokenKind::Raw`]
//! token and is reported through [`TokenStream::error`].
//!
//! Keyword classification uses a frozen table (C11 plus C++17, see
//! [`KEYWORDS`]) so that identifier detection does not drift with the
//! language version of any particular input.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Union of the C11 and C++17 keyword sets, sorted for binary search.
pub const KEYWORDS: &[&str] = &[
    "_Alignas",
    "_Alignof",
    "_Atomic",
    "_Bool",
    "_Complex",
    "_Generic",
    "_Imaginary",
    "_Noreturn",
    "_Static_assert",
    "_Thread_local",
    "alignas",
    "alignof",
    "and",
    "and_eq",
    "asm",
    "auto",
    "bitand",
    "bitor",
    "bool",
    "break",
    "case",
    "catch",
    "char",
    "char16_t",
    "char32_t",
    "class",
    "compl",
    "const",
    "const_cast",
    "constexpr",
    "continue",
    "decltype",
    "default",
    "delete",
    "do",
    "double",
    "dynamic_cast",
    "else",
    "enum",
    "explicit",
    "export",
    "extern",
    "false",
    "float",
    "for",
    "friend",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "mutable",
    "namespace",
    "new",
    "noexcept",
    "not",
    "not_eq",
    "nullptr",
    "operator",
    "or",
    "or_eq",
    "private",
    "protected",
    "public",
    "register",
    "reinterpret_cast",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "static_assert",
    "static_cast",
    "struct",
    "switch",
    "template",
    "this",
    "thread_local",
    "throw",
    "true",
    "try",
    "typedef",
    "typeid",
    "typename",
    "union",
    "unsigned",
    "using",
    "virtual",
    "void",
    "volatile",
    "wchar_t",
    "while",
    "xor",
    "xor_eq",
];

/// Multi-character punctuators, longest first within each leading byte.
const PUNCTUATORS: &[&str] = &[
    "<=>", "<<=", ">>=", "...", "->*", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|=", "::", ".*", "##",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    NumberLiteral,
    StringLiteral,
    CharLiteral,
    Punctuator,
    PreprocessorDirective,
    Comment,
    Whitespace,
    /// Unlexable remainder after an unterminated comment or literal.
    Raw,
}

impl TokenKind {
    /// Identifiers, keywords and numbers need a separating space when adjacent.
    pub fn is_word_like(self) -> bool {
        matches!(
            self,
            TokenKind::Identifier | TokenKind::Keyword | TokenKind::NumberLiteral
        )
    }

    /// Whether the token contributes to the lexical token count.
    pub fn is_lexical(self) -> bool {
        !matches!(self, TokenKind::Whitespace | TokenKind::Comment)
    }
}

/// Byte range into the text a stream was built from; `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuator, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LexErrorKind {
    UnterminatedLiteral,
    UnterminatedComment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error, Serialize, Deserialize)]
#[error("{kind} at byte {offset}")]
pub struct LexError {
    pub kind: LexErrorKind,
    pub offset: usize,
}

impl fmt::Display for LexErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexErrorKind::UnterminatedLiteral => f.write_str("unterminated literal"),
            LexErrorKind::UnterminatedComment => f.write_str("unterminated comment"),
        }
    }
}

/// An ordered, gap-free token sequence.
///
/// Spans always index into [`TokenStream::text`], the concatenation of all
/// token texts. For a stream fresh out of [`tokenize`] that is the original
/// source; rewritten streams get their spans reassigned.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenStream {
    tokens: Vec<Token>,
    source_len: usize,
    error: Option<LexError>,
}

impl TokenStream {
    /// Builds a stream from rewritten tokens, reassigning contiguous spans.
    pub fn from_tokens(tokens: impl IntoIterator<Item = Token>) -> Self {
        let mut offset = 0;
        let tokens: Vec<Token> = tokens
            .into_iter()
            .map(|mut t| {
                t.span = Span {
                    start: offset,
                    end: offset + t.text.len(),
                };
                offset = t.span.end;
                t
            })
            .collect();
        TokenStream {
            tokens,
            source_len: offset,
            error: None,
        }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn error(&self) -> Option<LexError> {
        self.error
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Concatenated token texts.
    pub fn text(&self) -> String {
        let mut out = String::with_capacity(self.source_len);
        for t in &self.tokens {
            out.push_str(&t.text);
        }
        out
    }
}

/// Number of tokens that are neither whitespace nor comments.
pub fn count_lexical_tokens(stream: &TokenStream) -> usize {
    stream.tokens.iter().filter(|t| t.kind.is_lexical()).count()
}

/// Number of non-whitespace tokens, each comment counting as one.
pub fn count_surface_tokens(stream: &TokenStream) -> usize {
    stream
        .tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Whitespace)
        .count()
}

pub fn tokenize(source: &str) -> TokenStream {
    let mut lexer = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        line_start: true,
        tokens: Vec::new(),
    };
    let error = lexer.run();
    TokenStream {
        tokens: lexer.tokens,
        source_len: source.len(),
        error,
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line_start: bool,
    tokens: Vec<Token>,
}

enum Scan {
    Done(usize),
    Unterminated(LexErrorKind),
}

impl<'a> Lexer<'a> {
    fn run(&mut self) -> Option<LexError> {
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let (kind, scan) = self.next_token();
            match scan {
                Scan::Done(end) => {
                    debug_assert!(end > start);
                    if kind == TokenKind::Whitespace {
                        if self.src[start..end].contains('\n') {
                            self.line_start = true;
                        }
                    } else if kind != TokenKind::Comment {
                        self.line_start = false;
                    }
                    self.push(kind, start, end);
                    self.pos = end;
                }
                Scan::Unterminated(err) => {
                    let end = self.bytes.len();
                    self.push(TokenKind::Raw, start, end);
                    self.pos = end;
                    return Some(LexError {
                        kind: err,
                        offset: start,
                    });
                }
            }
        }
        None
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize) {
        self.tokens.push(Token {
            kind,
            text: self.src[start..end].to_owned(),
            span: Span { start, end },
        });
    }

    fn peek(&self, offset: usize) -> Option<u8> {
        self.bytes.get(self.pos + offset).copied()
    }

    fn char_at(&self, at: usize) -> Option<char> {
        self.src.get(at..).and_then(|s| s.chars().next())
    }

    fn next_token(&self) -> (TokenKind, Scan) {
        let b = self.bytes[self.pos];
        let c = self.char_at(self.pos).unwrap_or('\u{fffd}');

        if c.is_whitespace() || self.line_splice_len(self.pos) > 0 {
            return (TokenKind::Whitespace, Scan::Done(self.scan_whitespace()));
        }
        if b == b'/' && self.peek(1) == Some(b'/') {
            return (TokenKind::Comment, Scan::Done(self.scan_line_comment(self.pos)));
        }
        if b == b'/' && self.peek(1) == Some(b'*') {
            return (TokenKind::Comment, self.scan_block_comment(self.pos));
        }
        if b == b'#' && self.line_start {
            return (TokenKind::PreprocessorDirective, self.scan_directive());
        }
        if b.is_ascii_digit() || (b == b'.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            return (TokenKind::NumberLiteral, Scan::Done(self.scan_number()));
        }
        if b == b'"' {
            return (
                TokenKind::StringLiteral,
                self.scan_quoted(self.pos + 1, b'"'),
            );
        }
        if b == b'\'' {
            return (TokenKind::CharLiteral, self.scan_quoted(self.pos + 1, b'\''));
        }
        if is_ident_start(c) {
            if let Some(found) = self.scan_prefixed_literal() {
                return found;
            }
            return self.scan_identifier();
        }
        (TokenKind::Punctuator, Scan::Done(self.scan_punctuator()))
    }

    /// Length of a backslash-newline splice starting at `at`, or 0.
    fn line_splice_len(&self, at: usize) -> usize {
        match (self.bytes.get(at), self.bytes.get(at + 1), self.bytes.get(at + 2)) {
            (Some(b'\\'), Some(b'\n'), _) => 2,
            (Some(b'\\'), Some(b'\r'), Some(b'\n')) => 3,
            _ => 0,
        }
    }

    fn scan_whitespace(&self) -> usize {
        let mut at = self.pos;
        while at < self.bytes.len() {
            let splice = self.line_splice_len(at);
            if splice > 0 {
                at += splice;
                continue;
            }
            match self.char_at(at) {
                Some(c) if c.is_whitespace() => at += c.len_utf8(),
                _ => break,
            }
        }
        at
    }

    fn scan_line_comment(&self, from: usize) -> usize {
        let mut at = from + 2;
        while at < self.bytes.len() {
            let splice = self.line_splice_len(at);
            if splice > 0 {
                at += splice;
                continue;
            }
            match self.bytes[at] {
                b'\n' => {
                    if at > from + 2 && self.bytes[at - 1] == b'\r' {
                        return at - 1;
                    }
                    return at;
                }
                _ => at += 1,
            }
        }
        at
    }

    fn scan_block_comment(&self, from: usize) -> Scan {
        match self.src[from + 2..].find("*/") {
            Some(rel) => Scan::Done(from + 2 + rel + 2),
            None => Scan::Unterminated(LexErrorKind::UnterminatedComment),
        }
    }

    fn scan_directive(&self) -> Scan {
        let mut at = self.pos + 1;
        while at < self.bytes.len() {
            let splice = self.line_splice_len(at);
            if splice > 0 {
                at += splice;
                continue;
            }
            match self.bytes[at] {
                b'\n' => break,
                b'\r' if self.bytes.get(at + 1) == Some(&b'\n') => break,
                b'/' if self.bytes.get(at + 1) == Some(&b'/') => {
                    at = self.scan_line_comment(at);
                    break;
                }
                b'/' if self.bytes.get(at + 1) == Some(&b'*') => match self.scan_block_comment(at)
                {
                    Scan::Done(end) => at = end,
                    unterminated => return unterminated,
                },
                q @ (b'"' | b'\'') => {
                    // Stray quotes (e.g. `#error don't`) must not swallow the line.
                    match self.scan_quoted(at + 1, q) {
                        Scan::Done(end) => at = end,
                        Scan::Unterminated(_) => at += 1,
                    }
                }
                _ => at += 1,
            }
        }
        Scan::Done(at)
    }

    fn scan_number(&self) -> usize {
        let mut at = self.pos;
        while at < self.bytes.len() {
            let b = self.bytes[at];
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' {
                if matches!(b, b'e' | b'E' | b'p' | b'P')
                    && matches!(self.bytes.get(at + 1), Some(b'+' | b'-'))
                {
                    at += 2;
                } else {
                    at += 1;
                }
            } else if b == b'\''
                && self
                    .bytes
                    .get(at + 1)
                    .is_some_and(|n| n.is_ascii_alphanumeric())
            {
                at += 2;
            } else {
                break;
            }
        }
        at
    }

    /// Scans from just past an opening quote to just past the closing one.
    fn scan_quoted(&self, from: usize, quote: u8) -> Scan {
        let mut at = from;
        while at < self.bytes.len() {
            match self.bytes[at] {
                b'\\' => {
                    // Skip the escaped character, whatever its width.
                    at += 1;
                    if let Some(c) = self.char_at(at) {
                        at += c.len_utf8();
                    }
                }
                b'\n' => break,
                b if b == quote => return Scan::Done(at + 1),
                _ => at += 1,
            }
        }
        Scan::Unterminated(LexErrorKind::UnterminatedLiteral)
    }

    /// Encoding-prefixed and raw literals: `L"…"`, `u8'…'`, `R"d(…)d"`, …
    fn scan_prefixed_literal(&self) -> Option<(TokenKind, Scan)> {
        let rest = &self.bytes[self.pos..];
        for prefix in ["u8R", "LR", "uR", "UR", "R"] {
            if rest.starts_with(prefix.as_bytes()) && rest.get(prefix.len()) == Some(&b'"') {
                if let Some(scan) = self.scan_raw_string(self.pos + prefix.len() + 1) {
                    return Some((TokenKind::StringLiteral, scan));
                }
            }
        }
        for prefix in ["u8", "L", "u", "U"] {
            if !rest.starts_with(prefix.as_bytes()) {
                continue;
            }
            let open = self.pos + prefix.len();
            match self.bytes.get(open) {
                Some(b'"') => {
                    return Some((TokenKind::StringLiteral, self.scan_quoted(open + 1, b'"')))
                }
                Some(b'\'') => {
                    return Some((TokenKind::CharLiteral, self.scan_quoted(open + 1, b'\'')))
                }
                _ => {}
            }
        }
        None
    }

    /// `from` points just past the opening `"`. Returns `None` when the
    /// delimiter is malformed, in which case the prefix is an identifier.
    fn scan_raw_string(&self, from: usize) -> Option<Scan> {
        let mut at = from;
        while at < self.bytes.len() && at - from <= 16 {
            match self.bytes[at] {
                b'(' => {
                    let delim = &self.src[from..at];
                    let close = format!("){delim}\"");
                    return Some(match self.src[at + 1..].find(&close) {
                        Some(rel) => Scan::Done(at + 1 + rel + close.len()),
                        None => Scan::Unterminated(LexErrorKind::UnterminatedLiteral),
                    });
                }
                b' ' | b')' | b'\\' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c | b'"' => return None,
                _ => at += 1,
            }
        }
        None
    }

    fn scan_identifier(&self) -> (TokenKind, Scan) {
        let mut at = self.pos;
        while let Some(c) = self.char_at(at) {
            if is_ident_continue(c) {
                at += c.len_utf8();
            } else {
                break;
            }
        }
        let kind = if is_keyword(&self.src[self.pos..at]) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        (kind, Scan::Done(at))
    }

    fn scan_punctuator(&self) -> usize {
        let rest = &self.bytes[self.pos..];
        for p in PUNCTUATORS {
            if rest.starts_with(p.as_bytes()) {
                return self.pos + p.len();
            }
        }
        // Any other single character, including stray non-ASCII symbols.
        self.pos + self.char_at(self.pos).map_or(1, char::len_utf8)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$' || (!c.is_ascii() && !c.is_whitespace())
}

fn is_ident_continue(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit()
}
