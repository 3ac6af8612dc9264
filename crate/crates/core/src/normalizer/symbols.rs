//! Detection of a function's own name, its parameters and its locals.
//!
//! This is a shallow declaration tree over the significant tokens: bracket
//! groups are matched first, the function header is located from the
//! first top-level brace, and declarations are recognized at statement
//! starts inside block braces. Names that are only ever used as callees,
//! members or types are never collected.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexer::{Token, TokenKind, TokenStream};

/// Identifiers that take a parenthesized argument but never name the function.
const ATTRIBUTE_LIKE: &[&str] = &[
    "__attribute__",
    "__attribute",
    "__declspec",
    "__asm__",
    "__asm",
    "__acquires",
    "__releases",
    "__must_hold",
    "__printf",
    "__scanf",
    "__aligned",
    "__section",
    "_Pragma",
    "__pragma",
];

const TYPE_KEYWORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "bool",
    "_Bool", "_Complex", "_Imaginary", "wchar_t", "char16_t", "char32_t", "auto",
];

const QUALIFIER_KEYWORDS: &[&str] = &[
    "const",
    "volatile",
    "restrict",
    "static",
    "extern",
    "register",
    "inline",
    "mutable",
    "constexpr",
    "thread_local",
    "_Thread_local",
    "_Atomic",
    "typename",
    "explicit",
    "virtual",
    "friend",
    "_Noreturn",
];

const TAG_KEYWORDS: &[&str] = &["struct", "union", "enum", "class"];

/// Names declared by one function, each list in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolTable {
    pub function_names: Vec<String>,
    pub variable_names: Vec<String>,
}

impl SymbolTable {
    pub fn is_empty(&self) -> bool {
        self.function_names.is_empty() && self.variable_names.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MacroReason {
    Directive,
    UnbalancedNesting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("macro suspect ({reason:?}) at byte {offset}")]
    MacroSuspect { reason: MacroReason, offset: usize },
}

/// Significant tokens (no whitespace or comments) with bracket matching.
struct View<'a> {
    toks: Vec<&'a Token>,
    /// For an opening bracket, the position of its partner.
    close_of: HashMap<usize, usize>,
}

impl<'a> View<'a> {
    fn new(stream: &'a TokenStream) -> Result<Self, SymbolError> {
        let toks: Vec<&Token> = stream
            .tokens()
            .iter()
            .filter(|t| t.kind.is_lexical())
            .collect();
        if let Some(d) = toks
            .iter()
            .find(|t| t.kind == TokenKind::PreprocessorDirective)
        {
            return Err(SymbolError::MacroSuspect {
                reason: MacroReason::Directive,
                offset: d.span.start,
            });
        }
        let mut close_of = HashMap::new();
        let mut open: Vec<usize> = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            if t.kind != TokenKind::Punctuator {
                continue;
            }
            let want = match t.text.as_str() {
                "(" | "[" | "{" => {
                    open.push(i);
                    continue;
                }
                ")" => "(",
                "]" => "[",
                "}" => "{",
                _ => continue,
            };
            match open.pop() {
                Some(o) if toks[o].text == want => {
                    close_of.insert(o, i);
                }
                _ => {
                    return Err(SymbolError::MacroSuspect {
                        reason: MacroReason::UnbalancedNesting,
                        offset: t.span.start,
                    })
                }
            }
        }
        if let Some(&o) = open.first() {
            return Err(SymbolError::MacroSuspect {
                reason: MacroReason::UnbalancedNesting,
                offset: toks[o].span.start,
            });
        }
        Ok(View { toks, close_of })
    }

    fn len(&self) -> usize {
        self.toks.len()
    }

    fn punct(&self, i: usize, text: &str) -> bool {
        self.toks.get(i).is_some_and(|t| t.is_punct(text))
    }

    fn keyword_in(&self, i: usize, set: &[&str]) -> bool {
        self.toks
            .get(i)
            .is_some_and(|t| t.kind == TokenKind::Keyword && set.contains(&t.text.as_str()))
    }

    fn ident(&self, i: usize) -> bool {
        self.toks
            .get(i)
            .is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn attribute_like(&self, i: usize) -> bool {
        self.ident(i) && ATTRIBUTE_LIKE.contains(&self.toks[i].text.as_str())
    }

    /// If `i` opens a bracket group, the position just past its partner.
    fn skip_group(&self, i: usize) -> Option<usize> {
        self.close_of.get(&i).map(|c| c + 1)
    }

    /// Skips `<…>` template arguments starting at `i`; `None` if this does
    /// not look like an argument list.
    fn skip_template(&self, i: usize, limit: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut p = i;
        while p < limit {
            let t = self.toks[p];
            match (t.kind, t.text.as_str()) {
                (TokenKind::Punctuator, "<") => depth += 1,
                (TokenKind::Punctuator, ">") => depth -= 1,
                (TokenKind::Punctuator, ">>") => {
                    if depth < 2 {
                        return None;
                    }
                    depth -= 2;
                }
                (TokenKind::Punctuator, "(" | "[") => {
                    p = self.skip_group(p)?;
                    continue;
                }
                (TokenKind::Punctuator, "," | "*" | "&" | "&&" | "::" | "...")
                | (TokenKind::Identifier | TokenKind::Keyword | TokenKind::NumberLiteral, _) => {}
                _ => return None,
            }
            p += 1;
            if depth == 0 {
                return Some(p);
            }
        }
        None
    }
}

pub fn build_symbol_table(stream: &TokenStream) -> Result<SymbolTable, SymbolError> {
    let view = View::new(stream)?;
    let mut functions: HashSet<&str> = HashSet::new();
    let mut variables: HashSet<&str> = HashSet::new();

    let Some(body_open) = find_body(&view) else {
        return Ok(SymbolTable::default());
    };
    let body_close = view.close_of[&body_open];

    if let Some(header) = find_header(&view, body_open) {
        functions.insert(&view.toks[header.name].text);
        for p in header.params {
            variables.insert(&view.toks[p].text);
        }
    }

    collect_locals(&view, body_open, body_close, &mut variables);

    for f in &functions {
        variables.remove(f);
    }

    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for (i, t) in stream.tokens().iter().enumerate() {
        if t.kind == TokenKind::Identifier {
            first_seen.entry(t.text.as_str()).or_insert(i);
        }
    }
    let ordered = |set: HashSet<&str>| -> Vec<String> {
        let mut v: Vec<&str> = set.into_iter().collect();
        v.sort_by_key(|s| first_seen[s]);
        v.into_iter().map(str::to_owned).collect()
    };
    Ok(SymbolTable {
        function_names: ordered(functions),
        variable_names: ordered(variables),
    })
}

/// First `{` that is not nested in parentheses or brackets.
fn find_body(view: &View) -> Option<usize> {
    let mut i = 0;
    while i < view.len() {
        if view.punct(i, "{") {
            return Some(i);
        }
        if view.punct(i, "(") || view.punct(i, "[") {
            i = view.skip_group(i)?;
        } else {
            i += 1;
        }
    }
    None
}

struct Header {
    name: usize,
    params: Vec<usize>,
}

fn find_header(view: &View, body_open: usize) -> Option<Header> {
    // A top-level `:` after the parameter list starts a constructor
    // initializer list; nothing past it belongs to the declarator.
    let mut end = body_open;
    let mut seen_group = false;
    let mut i = 0;
    while i < body_open {
        if view.punct(i, "(") || view.punct(i, "[") {
            seen_group |= view.punct(i, "(");
            i = view.skip_group(i)?;
            continue;
        }
        if seen_group && view.punct(i, ":") {
            end = i;
            break;
        }
        i += 1;
    }

    let mut i = 0;
    while i < end {
        if view.punct(i, "(") {
            let close = view.close_of[&i];
            if i > 0 && view.ident(i - 1) && !view.attribute_like(i - 1) {
                let params = parameter_names(view, i + 1, close, close + 1, end);
                return Some(Header {
                    name: i - 1,
                    params,
                });
            }
            i = close + 1;
        } else if view.punct(i, "[") {
            i = view.skip_group(i)?;
        } else {
            i += 1;
        }
    }
    None
}

/// Splits `start..end` at top-level commas, tracking template angles.
fn split_commas(view: &View, start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut seg = start;
    let mut angle = 0usize;
    let mut i = start;
    while i < end {
        let t = view.toks[i];
        if t.kind == TokenKind::Punctuator {
            match t.text.as_str() {
                "(" | "[" | "{" => {
                    i = view.skip_group(i).unwrap_or(end);
                    continue;
                }
                "<" => angle += 1,
                ">" => angle = angle.saturating_sub(1),
                ">>" => angle = angle.saturating_sub(2),
                "," if angle == 0 => {
                    out.push((seg, i));
                    seg = i + 1;
                }
                _ => {}
            }
        }
        i += 1;
    }
    if seg < end {
        out.push((seg, end));
    }
    out
}

fn parameter_names(
    view: &View,
    start: usize,
    end: usize,
    after: usize,
    header_end: usize,
) -> Vec<usize> {
    // Old-style definitions declare their parameters between `)` and `{`.
    let knr = (after..header_end).any(|i| view.punct(i, ";"));
    split_commas(view, start, end)
        .into_iter()
        .filter_map(|(s, e)| {
            if knr && e == s + 1 && view.ident(s) {
                Some(s)
            } else {
                declarator_name(view, s, e)
            }
        })
        .collect()
}

/// Name declared by a parameter-like slice such as `const char *buf`,
/// `int (*cb)(int)` or `std::vector<int> &v = {}`.
fn declarator_name(view: &View, start: usize, end: usize) -> Option<usize> {
    // Grouped declarators: `(*name)(…)`, `(&name)[4]`.
    let mut i = start;
    while i < end {
        if view.punct(i, "(") {
            let close = view.close_of[&i];
            if ["*", "&", "&&", "^"].iter().any(|p| view.punct(i + 1, p)) {
                return (i + 1..close).rev().find(|&k| view.ident(k));
            }
            i = close + 1;
        } else {
            i += 1;
        }
    }

    let mut top: Vec<usize> = Vec::new();
    let mut i = start;
    while i < end {
        let t = view.toks[i];
        if t.is_punct("=") {
            break;
        }
        if t.is_punct("(") || t.is_punct("[") || t.is_punct("{") {
            i = view.skip_group(i).unwrap_or(end);
            continue;
        }
        if t.is_punct("<") && i > start && view.ident(i - 1) {
            if let Some(next) = view.skip_template(i, end) {
                top.push(i);
                i = next;
                continue;
            }
        }
        top.push(i);
        i += 1;
    }

    let pos = top.iter().rposition(|&k| view.ident(k))?;
    let name = top[pos];
    if pos == 0 || view.attribute_like(name) {
        return None;
    }
    let before = top[pos - 1];
    if view.punct(before, "::") || view.keyword_in(before, TAG_KEYWORDS) {
        return None;
    }
    if top.get(pos + 1).is_some_and(|&k| view.punct(k, "::")) {
        return None;
    }
    let has_type = top[..pos].iter().any(|&k| {
        view.ident(k) || view.keyword_in(k, TYPE_KEYWORDS) || view.punct(k, "<")
    });
    has_type.then_some(name)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Frame {
    Block,
    Brace,
    Paren { control: bool, for_header: bool },
    Bracket,
}

fn collect_locals<'a>(
    view: &View<'a>,
    body_open: usize,
    body_close: usize,
    out: &mut HashSet<&'a str>,
) {
    let mut frames = vec![Frame::Block];
    let mut stmt_start = true;
    let mut pending_label = false;
    let mut i = body_open + 1;

    while i < body_close {
        let top = *frames.last().unwrap_or(&Frame::Block);
        let t = view.toks[i];

        if stmt_start && top == Frame::Block && view.ident(i) && view.punct(i + 1, ":") {
            i += 2;
            continue;
        }
        let may_declare = stmt_start
            && matches!(
                top,
                Frame::Block
                    | Frame::Paren {
                        for_header: true,
                        ..
                    }
            );
        if may_declare {
            if let Some((names, terminator)) = parse_declaration(view, i, body_close) {
                for n in names {
                    out.insert(&view.toks[n].text);
                }
                stmt_start = false;
                i = terminator;
                continue;
            }
        }

        stmt_start = false;
        match (t.kind, t.text.as_str()) {
            (TokenKind::Punctuator, "{") => {
                let block = i == 0 || opens_block(view, i - 1);
                frames.push(if block { Frame::Block } else { Frame::Brace });
                stmt_start = block;
            }
            (TokenKind::Punctuator, "}") => {
                frames.pop();
                stmt_start = true;
            }
            (TokenKind::Punctuator, "(") => {
                let prev = view.toks[i - 1];
                let for_header = prev.is_keyword("for");
                let control = prev.kind == TokenKind::Keyword
                    && matches!(prev.text.as_str(), "if" | "while" | "for" | "switch" | "catch");
                if prev.is_keyword("catch") {
                    let close = view.close_of[&i];
                    if let Some(n) = declarator_name(view, i + 1, close) {
                        out.insert(&view.toks[n].text);
                    }
                }
                frames.push(Frame::Paren {
                    control,
                    for_header,
                });
                stmt_start = for_header;
            }
            (TokenKind::Punctuator, ")") => {
                if let Some(Frame::Paren { control: true, .. }) = frames.pop() {
                    stmt_start = true;
                }
            }
            (TokenKind::Punctuator, "[") => frames.push(Frame::Bracket),
            (TokenKind::Punctuator, "]") => {
                frames.pop();
            }
            (TokenKind::Punctuator, ";") => stmt_start = top == Frame::Block,
            (TokenKind::Punctuator, ":") => {
                stmt_start = pending_label;
                pending_label = false;
            }
            (TokenKind::Keyword, "case" | "default") => pending_label = true,
            (TokenKind::Keyword, "else" | "do" | "try") => stmt_start = true,
            _ => {}
        }
        i += 1;
    }
}

/// Whether a `{` following position `prev` opens a statement block rather
/// than an initializer or a type body.
fn opens_block(view: &View, prev: usize) -> bool {
    let t = view.toks[prev];
    match t.kind {
        TokenKind::Punctuator => matches!(t.text.as_str(), ")" | "{" | "}" | ";" | ":"),
        TokenKind::Keyword => matches!(t.text.as_str(), "else" | "do" | "try"),
        _ => false,
    }
}

/// Recognizes `specifiers declarator[, declarator]… ;` at `start`.
/// Returns the declared names and the position of the terminator
/// (`;`, or `:` in a range-based `for`).
fn parse_declaration(view: &View, start: usize, limit: usize) -> Option<(Vec<usize>, usize)> {
    let mut p = start;
    let mut saw_type = false;

    while p < limit {
        let t = view.toks[p];
        match t.kind {
            TokenKind::Keyword if t.text == "typedef" => return None,
            TokenKind::Keyword if QUALIFIER_KEYWORDS.contains(&t.text.as_str()) => p += 1,
            TokenKind::Keyword if TYPE_KEYWORDS.contains(&t.text.as_str()) => {
                saw_type = true;
                p += 1;
            }
            TokenKind::Keyword if TAG_KEYWORDS.contains(&t.text.as_str()) => {
                if !view.ident(p + 1) || view.punct(p + 2, "{") {
                    return None;
                }
                saw_type = true;
                p += 2;
            }
            TokenKind::Punctuator if t.text == "::" && !saw_type && view.ident(p + 1) => p += 1,
            TokenKind::Identifier if view.attribute_like(p) && view.punct(p + 1, "(") => {
                p = view.skip_group(p + 1)?;
            }
            TokenKind::Identifier if saw_type => {
                // Annotation words like `__user` sit between type and name.
                if view.ident(p + 1) || view.punct(p + 1, "*") {
                    p += 1;
                } else {
                    break;
                }
            }
            TokenKind::Identifier => {
                p += 1;
                loop {
                    if view.punct(p, "<") {
                        p = view.skip_template(p, limit)?;
                    } else if view.punct(p, "::") && view.ident(p + 1) {
                        p += 2;
                    } else {
                        break;
                    }
                }
                saw_type = true;
            }
            _ => break,
        }
    }
    if !saw_type {
        return None;
    }

    let mut names = Vec::new();
    loop {
        // Pointer and reference operators with their qualifiers.
        while p < limit {
            let t = view.toks[p];
            let qualifier = t.kind == TokenKind::Keyword
                && matches!(t.text.as_str(), "const" | "volatile" | "restrict");
            let annotation = t.kind == TokenKind::Identifier
                && (view.ident(p + 1) || view.punct(p + 1, "*"));
            if t.is_punct("*") || t.is_punct("&") || t.is_punct("&&") || qualifier || annotation {
                p += 1;
            } else {
                break;
            }
        }
        if p >= limit {
            return None;
        }

        let name;
        let grouped;
        if view.ident(p) && !view.attribute_like(p) {
            if view.punct(p + 1, "::") {
                return None;
            }
            name = p;
            grouped = false;
            p += 1;
        } else if view.punct(p, "(") && ["*", "&", "^"].iter().any(|s| view.punct(p + 1, s)) {
            let close = view.close_of[&p];
            name = (p + 1..close).rev().find(|&k| view.ident(k))?;
            p = close + 1;
            grouped = true;
            if !(view.punct(p, "(") || view.punct(p, "[")) {
                return None;
            }
        } else {
            return None;
        }

        let mut prototype = false;
        loop {
            if view.punct(p, "[") {
                p = view.skip_group(p)?;
            } else if view.punct(p, "(") {
                let close = view.close_of[&p];
                prototype |= !grouped
                    && (close == p + 1
                        || view.keyword_in(p + 1, TYPE_KEYWORDS)
                        || view.keyword_in(p + 1, TAG_KEYWORDS));
                p = close + 1;
            } else if view.attribute_like(p) && view.punct(p + 1, "(") {
                p = view.skip_group(p + 1)?;
            } else {
                break;
            }
        }

        if view.punct(p, "=") {
            p += 1;
            while p < limit && !view.punct(p, ",") && !view.punct(p, ";") {
                if view.punct(p, "}") || view.punct(p, ")") || view.punct(p, "]") {
                    return None;
                }
                p = view.skip_group(p).unwrap_or(p + 1);
            }
        } else if view.punct(p, "{") {
            p = view.skip_group(p)?;
        }

        if !prototype {
            names.push(name);
        }
        if view.punct(p, ",") {
            p += 1;
            continue;
        }
        if view.punct(p, ";") || view.punct(p, ":") {
            return Some((names, p));
        }
        return None;
    }
}
