use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AnalyticsError, MetricsReport, TokenStats};
use crate::curator::CurationReport;

/// Bumped whenever a field is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

/// Combined run report; absent sections serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub token_stats: Option<TokenStats>,
    pub label_distribution: Option<BTreeMap<u8, usize>>,
    pub curation: Option<CurationReport>,
    pub metrics: Option<MetricsReport>,
}

pub fn emit_report(
    stats: Option<TokenStats>,
    distribution: Option<BTreeMap<u8, usize>>,
    curation: Option<CurationReport>,
    metrics: Option<MetricsReport>,
) -> Result<Report, AnalyticsError> {
    if stats.is_none() && distribution.is_none() && curation.is_none() && metrics.is_none() {
        return Err(AnalyticsError::NoSections);
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        token_stats: stats,
        label_distribution: distribution,
        curation,
        metrics,
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

impl Report {
    /// Pretty JSON with a trailing newline. Field order is fixed by the
    /// struct and maps are ordered, so equal reports give equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.token_stats {
            let _ = writeln!(out, "Token statistics ({})", s.tokenizer_id);
            let _ = writeln!(out, "  functions      {}", s.count);
            let _ = writeln!(out, "  mean tokens    {:.2}", s.mean_tokens);
            let _ = writeln!(out, "  max tokens     {}", s.max_tokens);
            let _ = writeln!(
                out,
                "  over {:<9} {} ({})",
                s.limit,
                s.over_limit,
                pct(s.over_limit_fraction)
            );
        }
        if let Some(d) = &self.label_distribution {
            let _ = writeln!(out, "Label distribution");
            for (label, n) in d {
                let _ = writeln!(out, "  {label}: {n}");
            }
        }
        if let Some(c) = &self.curation {
            let _ = writeln!(out, "Curation");
            for (name, v) in [
                ("input records", c.total_in),
                ("ok", c.ok),
                ("macro errors", c.macro_error),
                ("lex errors", c.lex_error),
                ("comment-only removed", c.comment_only_removed),
                ("duplicates removed", c.exact_duplicates_removed),
                ("conflict groups removed", c.conflict_groups_removed),
                ("conflict records removed", c.conflict_records_removed),
                ("duplicate records", c.duplicate_records),
                ("retained", c.retained),
            ] {
                let _ = writeln!(out, "  {name:<26}{v}");
            }
        }
        if let Some(m) = &self.metrics {
            let _ = writeln!(out, "Metrics ({})", m.averaging);
            let _ = writeln!(out, "  tp {}  fp {}  tn {}  fn {}", m.tp, m.fp, m.tn, m.fn_);
            let _ = writeln!(out, "  accuracy   {}", pct(m.accuracy));
            let _ = writeln!(out, "  precision  {}", pct(m.precision));
            let _ = writeln!(out, "  recall     {}", pct(m.recall));
            let _ = writeln!(out, "  f1         {}", pct(m.f1));
            if !m.degenerate_flags.is_empty() {
                let flags: Vec<String> = m
                    .degenerate_flags
                    .iter()
                    .map(|f| serde_json::to_value(f).unwrap().as_str().unwrap().to_owned())
                    .collect();
                let _ = writeln!(out, "  undefined  {}", flags.join(", "));
            }
        }
        out
    }
}
