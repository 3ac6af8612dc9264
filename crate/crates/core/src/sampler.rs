//! Balanced class subsets and seeded holdout splits.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` driving an
//! explicit Fisher–Yates shuffle (`j` uniform in `0..=i`, `i` descending).
//! The same seed reproduces the same indices with this crate; the split
//! manifest written by the CLI is the portable record of a partition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Classes a balanced sample must draw from.
pub const LABELS: [u8; 2] = [0, 1];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("{name} fraction must lie strictly between 0 and 1, got {value}")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("fractions must sum to 1 (±1e-9), got {sum}")]
    FractionSum { sum: f64 },
    #[error("per-class count must be at least 1")]
    ZeroPerClass,
    #[error("class {label} has {have} records, {need} required")]
    InsufficientClass { label: u8, have: usize, need: usize },
    #[error("cannot split an empty subset")]
    EmptySubset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_class: Option<usize>,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<Self, SamplerError> {
        let spec = SplitSpec {
            train_fraction: train,
            val_fraction: val,
            test_fraction: test,
            seed,
            per_class: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 70/15/15.
    pub fn default_fractions(seed: u64) -> Self {
        SplitSpec {
            train_fraction: 0.70,
            val_fraction: 0.15,
            test_fraction: 0.15,
            seed,
            per_class: None,
        }
    }

    pub fn with_per_class(mut self, per_class: usize) -> Result<Self, SamplerError> {
        self.per_class = Some(per_class);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        for (name, value) in [
            ("train", self.train_fraction),
            ("validation", self.val_fraction),
            ("test", self.test_fraction),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(SamplerError::FractionOutOfRange { name, value });
            }
        }
        let sum = self.train_fraction + self.val_fraction + self.test_fraction;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SamplerError::FractionSum { sum });
        }
        if self.per_class == Some(0) {
            return Err(SamplerError::ZeroPerClass);
        }
        Ok(())
    }

    /// `(train, validation, test)` sizes for a subset of `n`: floor, floor,
    /// remainder.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        // The epsilon absorbs representation error in decimal fractions
        // (0.29 * 100 must give 29, not 28).
        let floor = |f: f64| ((f * n as f64) + 1e-9).floor() as usize;
        let train = floor(self.train_fraction).min(n);
        let val = floor(self.val_fraction).min(n - train);
        (train, val, n - train - val)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    pub spec: SplitSpec,
}

fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Draws `per_class` indices of each label without replacement. The
/// result is sorted so the subset keeps corpus order.
pub fn balance_sample(labels: &[u8], per_class: usize, seed: u64) -> Result<Vec<usize>, SamplerError> {
    if per_class == 0 {
        return Err(SamplerError::ZeroPerClass);
    }
    let by_class: Vec<Vec<usize>> = LABELS
        .iter()
        .map(|&l| (0..labels.len()).filter(|&i| labels[i] == l).collect())
        .collect();
    for (&label, members) in LABELS.iter().zip(&by_class) {
        if members.len() < per_class {
            return Err(SamplerError::InsufficientClass {
                label,
                have: members.len(),
                need: per_class,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::with_capacity(per_class * LABELS.len());
    for mut members in by_class {
        shuffle(&mut members, &mut rng);
        picked.extend_from_slice(&members[..per_class]);
    }
    picked.sort_unstable();
    Ok(picked)
}

/// Shuffles `subset` and slices it into train, validation and test.
pub fn holdout_split(subset: &[usize], spec: &SplitSpec) -> Result<DatasetSplit, SamplerError> {
    spec.validate()?;
    if subset.is_empty() {
        return Err(SamplerError::EmptySubset);
    }
    let mut order = subset.to_vec();
    shuffle(&mut order, &mut ChaCha8Rng::seed_from_u64(spec.seed));
    let (train, val, _) = spec.sizes(order.len());
    let test = order.split_off(train + val);
    let validation = order.split_off(train);
    Ok(DatasetSplit {
        train: order,
        validation,
        test,
        spec: *spec,
    })
}
