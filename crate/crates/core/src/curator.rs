//! Removal of faulty and duplicated entries.
//!
//! Records are keyed by the digest of their normalized code, so entries that
//! differ only in programmer-chosen names collide. The removal policy is
//! applied in a fixed order:
//!
//! 1. comment-only records are dropped;
//! 2. groups whose members all carry the same label keep their first member;
//! 3. groups mixing labels are dropped entirely;
//! 4. macro and lex errors are kept, flagged by their status.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::EnrichedRecord;
use crate::normalizer::Status;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateGroup {
    pub key: String,
    /// Record indices in input order; always at least two.
    pub members: Vec<usize>,
    /// Target of each member, parallel to `members`.
    pub labels: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ExactDuplicate,
    LabelConflict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurationReport {
    pub total_in: usize,
    pub ok: usize,
    pub macro_error: usize,
    pub lex_error: usize,
    pub comment_only_removed: usize,
    pub exact_duplicates_removed: usize,
    pub conflict_groups_removed: usize,
    pub conflict_records_removed: usize,
    pub retained: usize,
    /// Groups of same-label duplicates (each keeps one member).
    pub exact_duplicate_groups: usize,
    /// Records belonging to any duplicate group, conflicting or not.
    pub duplicate_records: usize,
}

impl CurationReport {
    /// `retained = total_in − comment_only − exact duplicates − conflicts`,
    /// and every input record has exactly one status.
    pub fn is_conserved(&self) -> bool {
        let removed =
            self.comment_only_removed + self.exact_duplicates_removed + self.conflict_records_removed;
        removed <= self.total_in
            && self.retained == self.total_in - removed
            && self.ok + self.macro_error + self.lex_error + self.comment_only_removed
                == self.total_in
    }
}

pub fn group_duplicates(records: &[EnrichedRecord]) -> Vec<DuplicateGroup> {
    let mut by_key: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        if r.norm.status != Status::CommentOnly {
            by_key.entry(r.key.as_str()).or_default().push(i);
        }
    }
    let mut groups: Vec<DuplicateGroup> = by_key
        .into_iter()
        .filter(|(_, members)| members.len() >= 2)
        .map(|(key, members)| DuplicateGroup {
            key: key.to_owned(),
            labels: members.iter().map(|&i| records[i].record.target).collect(),
            members,
        })
        .collect();
    groups.sort_by_key(|g| g.members[0]);
    groups
}

pub fn classify_group(group: &DuplicateGroup) -> Verdict {
    let has = |l| group.labels.contains(&l);
    if has(0) && has(1) {
        Verdict::LabelConflict
    } else {
        Verdict::ExactDuplicate
    }
}

/// Returns the indices of retained records, in input order.
pub fn refine(records: &[EnrichedRecord]) -> (Vec<usize>, CurationReport) {
    let mut keep = vec![true; records.len()];
    let mut report = CurationReport {
        total_in: records.len(),
        ..CurationReport::default()
    };

    for (i, r) in records.iter().enumerate() {
        match r.norm.status {
            Status::Ok => report.ok += 1,
            Status::MacroError => report.macro_error += 1,
            Status::LexError => report.lex_error += 1,
            Status::CommentOnly => {
                report.comment_only_removed += 1;
                keep[i] = false;
            }
        }
    }

    for group in group_duplicates(records) {
        report.duplicate_records += group.members.len();
        match classify_group(&group) {
            Verdict::ExactDuplicate => {
                report.exact_duplicate_groups += 1;
                for &m in &group.members[1..] {
                    keep[m] = false;
                    report.exact_duplicates_removed += 1;
                }
            }
            Verdict::LabelConflict => {
                report.conflict_groups_removed += 1;
                for &m in &group.members {
                    keep[m] = false;
                    report.conflict_records_removed += 1;
                }
            }
        }
    }

    let retained: Vec<usize> = (0..records.len()).filter(|&i| keep[i]).collect();
    report.retained = retained.len();
    debug_assert!(report.is_conserved());
    (retained, report)
}

/// Convenience wrapper returning the retained records themselves.
pub fn refine_records(records: Vec<EnrichedRecord>) -> (Vec<EnrichedRecord>, CurationReport) {
    let (retained, report) = refine(&records);
    let mut keep = vec![false; records.len()];
    for i in retained {
        keep[i] = true;
    }
    let kept = records
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect();
    (kept, report)
}
