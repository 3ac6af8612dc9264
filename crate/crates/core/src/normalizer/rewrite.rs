use std::collections::{HashMap, HashSet};

use crate::lexer::{tokenize, Token, TokenKind, TokenStream};

use super::symbols::SymbolTable;

pub const FUNC_PREFIX: &str = "FUNC_";
pub const VAR_PREFIX: &str = "VAR_";
pub const STR_PREFIX: &str = "STR_";

/// Original name → placeholder, function names first, each in first-occurrence order.
pub fn placeholder_map(symbols: &SymbolTable) -> Vec<(String, String)> {
    let funcs = symbols
        .function_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), format!("{FUNC_PREFIX}{i}")));
    let vars = symbols
        .variable_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), format!("{VAR_PREFIX}{i}")));
    funcs.chain(vars).collect()
}

/// Replaces declared names with `FUNC_i` / `VAR_j`.
///
/// An untouched identifier that already spells one of the emitted
/// placeholders gets `_X` appended (repeatedly, if needed) so the output
/// stays unambiguous.
pub fn anonymize(stream: &TokenStream, symbols: &SymbolTable) -> TokenStream {
    let mapping: HashMap<String, String> = placeholder_map(symbols).into_iter().collect();
    if mapping.is_empty() {
        return stream.clone();
    }
    let emitted: HashSet<&str> = mapping.values().map(String::as_str).collect();
    let existing: HashSet<&str> = stream
        .tokens()
        .iter()
        .filter(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text.as_str())
        .collect();

    let mut prev: Option<&Token> = None;
    let tokens = stream.tokens().iter().map(|t| {
        let in_own_namespace = prev.is_some_and(names_member_or_tag);
        if t.kind.is_lexical() {
            prev = Some(t);
        }
        let mut t = t.clone();
        if t.kind == TokenKind::Identifier && !in_own_namespace {
            if let Some(p) = mapping.get(&t.text) {
                t.text = p.clone();
            } else if emitted.contains(t.text.as_str()) {
                let mut renamed = format!("{}_X", t.text);
                while emitted.contains(renamed.as_str()) || existing.contains(renamed.as_str()) {
                    renamed.push_str("_X");
                }
                t.text = renamed;
            }
        }
        t
    });
    TokenStream::from_tokens(tokens)
}

/// True when the identifier after `prev` is a member or tag name, which
/// lives apart from ordinary variables.
fn names_member_or_tag(prev: &Token) -> bool {
    prev.is_punct(".")
        || prev.is_punct("->")
        || ["struct", "union", "enum", "class"].iter().any(|k| prev.is_keyword(k))
}

/// Replaces each distinct string literal with `STR_i`, first occurrence first.
pub fn substitute_strings(stream: &TokenStream) -> TokenStream {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let tokens = stream.tokens().iter().map(|t| {
        if t.kind != TokenKind::StringLiteral {
            return t.clone();
        }
        let next = seen.len();
        let idx = *seen.entry(t.text.clone()).or_insert(next);
        Token {
            kind: TokenKind::Identifier,
            text: format!("{STR_PREFIX}{idx}"),
            span: t.span,
        }
    });
    TokenStream::from_tokens(tokens)
}

/// Renders the stream on one line without comments.
///
/// Word-like neighbours get exactly one space. Other neighbours are joined
/// directly unless joining would re-lex differently (`a - -b`, `x / *p`,
/// `0x1e + 1`), in which case one space is kept. Preprocessor directives,
/// which only survive in macro-error output, stay on their own lines.
pub fn strip_and_collapse(stream: &TokenStream) -> String {
    let mut out = String::new();
    let mut tail: Vec<&Token> = Vec::with_capacity(3);
    let mut prev: Option<&Token> = None;

    for t in stream.tokens() {
        match t.kind {
            TokenKind::Whitespace | TokenKind::Comment => continue,
            TokenKind::PreprocessorDirective => {
                if !out.is_empty() && !out.ends_with('\n') {
                    out.push('\n');
                }
                out.push_str(&t.text);
                out.push('\n');
                tail.clear();
                prev = None;
                continue;
            }
            _ => {}
        }
        if let Some(p) = prev {
            let space = if p.kind.is_word_like() && t.kind.is_word_like() {
                true
            } else {
                !joins_cleanly(&tail, t)
            };
            if space {
                out.push(' ');
                tail.clear();
            }
        }
        out.push_str(&t.text);
        tail.push(t);
        if tail.len() > 2 {
            tail.remove(0);
        }
        prev = Some(t);
    }
    out
}

/// Punctuation that never starts or extends a longer token.
fn is_inert(b: u8) -> bool {
    matches!(
        b,
        b'(' | b')' | b'[' | b']' | b'{' | b'}' | b';' | b',' | b'?' | b'~'
    )
}

/// Whether `tail` followed directly by `next` lexes back into the same tokens.
fn joins_cleanly(tail: &[&Token], next: &Token) -> bool {
    let Some(last) = tail.last() else {
        return true;
    };
    let first_next = next.text.as_bytes().first().copied().unwrap_or(b' ');
    let last_prev = last.text.as_bytes().last().copied().unwrap_or(b' ');
    if is_inert(first_next) || (is_inert(last_prev) && last.kind == TokenKind::Punctuator) {
        return true;
    }
    // A leading `;` keeps a `#` from being read as a directive.
    let mut joined = String::from(";");
    for t in tail {
        joined.push_str(&t.text);
    }
    joined.push_str(&next.text);
    let relexed = tokenize(&joined);
    let got = &relexed.tokens()[1..];
    got.len() == tail.len() + 1
        && got
            .iter()
            .zip(tail.iter().copied().chain(std::iter::once(next)))
            .all(|(a, b)| a.kind == b.kind && a.text == b.text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalizer::symbols::build_symbol_table;

    fn texts(s: &TokenStream) -> String {
        s.text()
    }

    #[test]
    fn anonymize_add() {
        let stream = tokenize("int add(int a,int b){return a+b;}");
        let table = build_symbol_table(&stream).unwrap();
        assert_eq!(
            texts(&anonymize(&stream, &table)),
            "int FUNC_0(int VAR_0,int VAR_1){return VAR_0+VAR_1;}"
        );
    }

    #[test]
    fn anonymize_is_noop_without_symbols() {
        let stream = tokenize("a + b");
        assert_eq!(anonymize(&stream, &SymbolTable::default()), stream);
        let absent = SymbolTable {
            function_names: vec!["zz".into()],
            variable_names: vec!["qq".into()],
        };
        assert_eq!(texts(&anonymize(&stream, &absent)), "a + b");
        assert!(anonymize(&TokenStream::default(), &absent).is_empty());
    }

    #[test]
    fn colliding_identifiers_get_suffixed() {
        let stream = tokenize("void f(int a){ g(VAR_0, VAR_0_X, a, VAR_7); }");
        let table = build_symbol_table(&stream).unwrap();
        assert_eq!(
            texts(&anonymize(&stream, &table)),
            "void FUNC_0(int VAR_0){ g(VAR_0_X_X, VAR_0_X, VAR_0, VAR_7); }"
        );
    }

    #[test]
    fn members_and_tags_keep_their_names() {
        let stream = tokenize("void f(struct file *file, int next){ file->next = next; s.file = 0; }");
        let table = build_symbol_table(&stream).unwrap();
        assert_eq!(
            texts(&anonymize(&stream, &table)),
            "void FUNC_0(struct file *VAR_0, int VAR_1){ VAR_0->next = VAR_1; s.file = 0; }"
        );
    }

    #[test]
    fn strings_are_numbered_by_first_occurrence() {
        let s = substitute_strings(&tokenize(r#"f("x", "y", "x", 'c')"#));
        assert_eq!(s.text(), "f(STR_0, STR_1, STR_0, 'c')");
        assert_eq!(s.tokens()[2].kind, TokenKind::Identifier);
        let single = substitute_strings(&tokenize("\"hi\""));
        assert_eq!(single.tokens().len(), 1);
        assert_eq!(single.tokens()[0].text, "STR_0");
        let plain = tokenize("a = 1;");
        assert_eq!(substitute_strings(&plain).text(), "a = 1;");
    }

    #[test]
    fn collapse_basic() {
        assert_eq!(strip_and_collapse(&tokenize("int  a ;  /* c */")), "int a;");
        assert_eq!(strip_and_collapse(&tokenize("/* only */")), "");
        assert_eq!(strip_and_collapse(&tokenize("a+b")), "a+b");
        assert_eq!(
            strip_and_collapse(&tokenize("  if (x)\n\t{\n  return  0 ;\n}\n")),
            "if(x){return 0;}"
        );
    }

    #[test]
    fn collapse_keeps_token_boundaries() {
        assert_eq!(strip_and_collapse(&tokenize("a - -b")), "a- -b");
        assert_eq!(strip_and_collapse(&tokenize("a + +b")), "a+ +b");
        assert_eq!(strip_and_collapse(&tokenize("x / *p")), "x/ *p");
        assert_eq!(strip_and_collapse(&tokenize("0x1e + 1")), "0x1e +1");
        assert_eq!(strip_and_collapse(&tokenize("p - > q")), "p- >q");
        assert_eq!(strip_and_collapse(&tokenize(". . .")), ".. .");
        assert_eq!(strip_and_collapse(&tokenize("L \"s\"")), "L \"s\"");
        assert_eq!(strip_and_collapse(&tokenize("a < < b")), "a< <b");
        assert_eq!(strip_and_collapse(&tokenize("a & & b")), "a& &b");
    }

    #[test]
    fn collapse_puts_directives_on_their_own_lines() {
        assert_eq!(
            strip_and_collapse(&tokenize("#define X 1\nvoid f(){X;}")),
            "#define X 1\nvoid f(){X;}"
        );
        assert_eq!(
            strip_and_collapse(&tokenize("void f(){\n  #if A\n  g();\n  #endif\n}")),
            "void f(){\n#if A\ng();\n#endif\n}"
        );
    }
}
