//! Curation toolkit for function-level C/C++ vulnerability datasets.
//!
//! The pipeline is split into small, file-composable stages:
//!
//! * [`lexer`]: lossless C/C++ tokenization.
//! * [`normalizer`]: comment/whitespace stripping, string substitution and
//!   identifier anonymization for one function.
//! * [`corpus`]: line-delimited JSON records and their enrichment.
//! * [`curator`]: comment-only, duplicate and label-conflict removal.
//! * [`sampler`]: balanced subsets and seeded holdout splits.
//! * [`analytics`]: token budgets, label counts, classification metrics and
//!   report assembly.

pub mod analytics;
pub mod corpus;
pub mod curator;
pub mod lexer;
pub mod normalizer;
pub mod sampler;

pub use analytics::{
    classification_metrics, emit_report, label_distribution, token_stats, Averaging,
    MetricsReport, Report, TokenCounter, TokenStats,
};
pub use corpus::{enrich, load_jsonl, write_jsonl, EnrichedRecord, FunctionRecord};
pub use curator::{classify_group, group_duplicates, refine, CurationReport, DuplicateGroup, Verdict};
pub use lexer::{count_lexical_tokens, tokenize, Token, TokenKind, TokenStream};
pub use normalizer::{normalize, NormalizationResult, Normalizer, Status, SymbolTable};
pub use sampler::{balance_sample, holdout_split, DatasetSplit, SplitSpec};
