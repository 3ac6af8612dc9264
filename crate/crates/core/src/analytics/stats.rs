use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::lexer::{count_lexical_tokens, count_surface_tokens, tokenize};

/// Strategy for measuring a function's length in tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenCounter {
    /// Lexical tokens, comments and whitespace excluded.
    Lexical,
    /// Lexical tokens plus one per comment.
    Surface,
    /// Precomputed counts keyed by record index, e.g. from a subword tokenizer.
    External(BTreeMap<usize, u64>),
}

impl TokenCounter {
    pub fn id(&self) -> &'static str {
        match self {
            TokenCounter::Lexical => "lexical",
            TokenCounter::Surface => "surface",
            TokenCounter::External(_) => "external",
        }
    }

    fn count(&self, index: usize, text: &str) -> Result<u64, AnalyticsError> {
        match self {
            TokenCounter::Lexical => Ok(count_lexical_tokens(&tokenize(text)) as u64),
            TokenCounter::Surface => Ok(count_surface_tokens(&tokenize(text)) as u64),
            TokenCounter::External(counts) => counts
                .get(&index)
                .copied()
                .ok_or(AnalyticsError::MissingCount(index)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenStats {
    pub count: usize,
    pub total_tokens: u64,
    pub mean_tokens: f64,
    pub max_tokens: u64,
    pub limit: u64,
    pub over_limit: usize,
    pub over_limit_fraction: f64,
    pub tokenizer_id: String,
}

/// Token-length summary over `texts`; the position of a text is its record
/// index for external counts.
pub fn token_stats<S: AsRef<str> + Sync>(
    texts: &[S],
    limit: u64,
    counter: &TokenCounter,
) -> Result<TokenStats, AnalyticsError> {
    if limit == 0 {
        return Err(AnalyticsError::InvalidLimit);
    }
    let counts: Vec<u64> = texts
        .par_iter()
        .enumerate()
        .map(|(i, t)| counter.count(i, t.as_ref()))
        .collect::<Result<_, _>>()?;

    let total: u64 = counts.iter().sum();
    let over = counts.iter().filter(|&&c| c > limit).count();
    let n = counts.len();
    Ok(TokenStats {
        count: n,
        total_tokens: total,
        mean_tokens: if n == 0 { 0.0 } else { total as f64 / n as f64 },
        max_tokens: counts.iter().copied().max().unwrap_or(0),
        limit,
        over_limit: over,
        over_limit_fraction: if n == 0 { 0.0 } else { over as f64 / n as f64 },
        tokenizer_id: counter.id().to_owned(),
    })
}

#[derive(Deserialize)]
struct CountLine {
    index: usize,
    tokens: u64,
}

/// Reads `{"index": i, "tokens": n}` lines.
pub fn load_counts_file(path: impl AsRef<Path>) -> Result<BTreeMap<usize, u64>, AnalyticsError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AnalyticsError::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AnalyticsError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: CountLine = serde_json::from_str(&line).map_err(|e| AnalyticsError::BadLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        if out.insert(parsed.index, parsed.tokens).is_some() {
            return Err(AnalyticsError::DuplicateIndex(parsed.index));
        }
    }
    Ok(out)
}

pub fn label_distribution(labels: impl IntoIterator<Item = u8>) -> BTreeMap<u8, usize> {
    let mut out = BTreeMap::new();
    for l in labels {
        *out.entry(l).or_default() += 1;
    }
    out
}
