//! Function-level normalization.
//!
//! A function is lexed, its own name, parameters and locals are detected,
//! those names are replaced with positional placeholders (`FUNC_i`,
//! `VAR_j`), string literals become `STR_k`, and the result is printed on
//! a single line without comments. Failures never abort: they are reported
//! through [`Status`].

mod rewrite;
mod symbols;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lexer::{count_lexical_tokens, tokenize, TokenStream};

pub use rewrite::{
    anonymize, placeholder_map, strip_and_collapse, substitute_strings, FUNC_PREFIX, STR_PREFIX,
    VAR_PREFIX,
};
pub use symbols::{build_symbol_table, MacroReason, SymbolError, SymbolTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Ok,
    CommentOnly,
    MacroError,
    LexError,
}

impl Status {
    pub const ALL: [Status; 4] = [
        Status::Ok,
        Status::CommentOnly,
        Status::MacroError,
        Status::LexError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "Ok",
            Status::CommentOnly => "CommentOnly",
            Status::MacroError => "MacroError",
            Status::LexError => "LexError",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Status::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown status `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationResult {
    pub normalized: String,
    pub status: Status,
    /// Declared name → placeholder.
    pub identifier_map: BTreeMap<String, String>,
    pub orig_token_count: usize,
    pub norm_token_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subword_token_count: Option<usize>,
}

/// Counts model-level tokens of a normalized function.
pub trait SubwordCounter: Send + Sync {
    fn count(&self, text: &str) -> usize;
}

impl<F> SubwordCounter for F
where
    F: Fn(&str) -> usize + Send + Sync,
{
    fn count(&self, text: &str) -> usize {
        self(text)
    }
}

#[derive(Clone, Default)]
pub struct Normalizer {
    subword: Option<Arc<dyn SubwordCounter>>,
}

impl fmt::Debug for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Normalizer")
            .field("subword", &self.subword.is_some())
            .finish()
    }
}

impl Normalizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_subword_counter(mut self, counter: Arc<dyn SubwordCounter>) -> Self {
        self.subword = Some(counter);
        self
    }

    pub fn normalize(&self, source: &str) -> NormalizationResult {
        let mut result = normalize_stream(source, tokenize(source));
        if let Some(counter) = &self.subword {
            result.subword_token_count = Some(counter.count(&result.normalized));
        }
        result
    }
}

pub fn normalize(source: &str) -> NormalizationResult {
    Normalizer::default().normalize(source)
}

fn normalize_stream(source: &str, stream: TokenStream) -> NormalizationResult {
    let orig = count_lexical_tokens(&stream);
    let verbatim = |status| NormalizationResult {
        normalized: source.to_owned(),
        status,
        identifier_map: BTreeMap::new(),
        orig_token_count: orig,
        norm_token_count: orig,
        subword_token_count: None,
    };

    if stream.error().is_some() {
        return verbatim(Status::LexError);
    }
    if orig == 0 && !source.is_empty() {
        return NormalizationResult {
            normalized: String::new(),
            status: Status::CommentOnly,
            norm_token_count: 0,
            ..verbatim(Status::CommentOnly)
        };
    }

    let symbols = match build_symbol_table(&stream) {
        Ok(s) => s,
        Err(SymbolError::MacroSuspect { .. }) => {
            return NormalizationResult {
                normalized: strip_and_collapse(&stream),
                ..verbatim(Status::MacroError)
            };
        }
    };
    let rewritten = substitute_strings(&anonymize(&stream, &symbols));
    NormalizationResult {
        normalized: strip_and_collapse(&rewritten),
        identifier_map: placeholder_map(&symbols).into_iter().collect(),
        norm_token_count: count_lexical_tokens(&rewritten),
        ..verbatim(Status::Ok)
    }
}
