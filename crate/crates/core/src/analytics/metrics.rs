use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Label 1 is the positive class.
    #[default]
    PositiveClass,
    /// Unweighted mean over both classes.
    Macro,
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::PositiveClass => "positive_class",
            Averaging::Macro => "macro",
        })
    }
}

impl FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive_class" | "positive" | "binary" => Ok(Averaging::PositiveClass),
            "macro" => Ok(Averaging::Macro),
            other => Err(format!("unknown averaging `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateFlag {
    PrecisionUndefined,
    RecallUndefined,
    F1Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub averaging: Averaging,
    pub degenerate_flags: BTreeSet<DegenerateFlag>,
    /// Scores with each label taken as the positive class.
    pub per_class: BTreeMap<u8, ClassScores>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn harmonic(p: f64, r: f64) -> Option<f64> {
    (p + r > 0.0).then(|| 2.0 * p * r / (p + r))
}

/// Scores for one positive class; undefined values become 0 and are flagged.
fn scores(tp: u64, fp: u64, fn_: u64, flags: &mut BTreeSet<DegenerateFlag>) -> ClassScores {
    let precision = ratio(tp, tp + fp).unwrap_or_else(|| {
        flags.insert(DegenerateFlag::PrecisionUndefined);
        0.0
    });
    let recall = ratio(tp, tp + fn_).unwrap_or_else(|| {
        flags.insert(DegenerateFlag::RecallUndefined);
        0.0
    });
    let f1 = harmonic(precision, recall).unwrap_or_else(|| {
        flags.insert(DegenerateFlag::F1Undefined);
        0.0
    });
    ClassScores {
        precision,
        recall,
        f1,
    }
}

pub fn classification_metrics(
    predictions: &[u8],
    labels: &[u8],
    averaging: Averaging,
) -> Result<MetricsReport, AnalyticsError> {
    if predictions.len() != labels.len() {
        return Err(AnalyticsError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (i, (&p, &l)) in predictions.iter().zip(labels).enumerate() {
        match (p, l) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 0) => tn += 1,
            (0, 1) => fn_ += 1,
            _ => return Err(AnalyticsError::InvalidLabel { position: i }),
        }
    }

    let mut positive_flags = BTreeSet::new();
    let positive = scores(tp, fp, fn_, &mut positive_flags);
    let mut negative_flags = BTreeSet::new();
    let negative = scores(tn, fn_, fp, &mut negative_flags);

    let (precision, recall, f1, degenerate_flags) = match averaging {
        Averaging::PositiveClass => (positive.precision, positive.recall, positive.f1, positive_flags),
        Averaging::Macro => {
            let mut flags: BTreeSet<_> = positive_flags.union(&negative_flags).copied().collect();
            let p = (positive.precision + negative.precision) / 2.0;
            let r = (positive.recall + negative.recall) / 2.0;
            flags.remove(&DegenerateFlag::F1Undefined);
            let f1 = harmonic(p, r).unwrap_or_else(|| {
                flags.insert(DegenerateFlag::F1Undefined);
                0.0
            });
            (p, r, f1, flags)
        }
    };

    let n = predictions.len() as f64;
    Ok(MetricsReport {
        tp,
        fp,
        tn,
        fn_,
        accuracy: (tp + tn) as f64 / n,
        precision,
        recall,
        f1,
        averaging,
        degenerate_flags,
        per_class: [(0, negative), (1, positive)].into_iter().collect(),
    })
}

#[derive(Deserialize)]
struct PredictionLine {
    index: usize,
    prediction: u8,
}

/// Reads `{"index": i, "prediction": 0|1}` lines, in file order.
pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<(usize, u8)>, AnalyticsError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| AnalyticsError::io(path, e))?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AnalyticsError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: PredictionLine = serde_json::from_str(&line).map_err(|e| AnalyticsError::BadLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        if p.prediction > 1 {
            return Err(AnalyticsError::InvalidLabel { position: out.len() });
        }
        if !seen.insert(p.index) {
            return Err(AnalyticsError::DuplicateIndex(p.index));
        }
        out.push((p.index, p.prediction));
    }
    Ok(out)
}
