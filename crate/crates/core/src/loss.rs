//! Reference loss arithmetic over abstract token distributions.
//!
//! Exact, dependency-free implementations of per-example cross-entropy,
//! flat corpus averaging, and the per-subset-normalized training objective,
//! so a trainer's numbers can be checked against plain arithmetic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::record::TransferSubsetKind;

/// Probabilities are floored here before the log so zero-probability gold
/// tokens yield large finite losses instead of infinities.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LossError {
    #[error("gold has {gold} positions but predictions have {predicted}")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error("gold index {index} at position {position} exceeds vocabulary size {vocab}")]
    IndexOutOfVocab {
        position: usize,
        index: usize,
        vocab: usize,
    },
    #[error("input must not be empty")]
    EmptyInput,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}

/// Per-position probability vector over a vocabulary: non-negative entries
/// summing to 1 within 1e-9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TokenDistribution {
    probs: Vec<f64>,
}

impl TokenDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, LossError> {
        if probs.is_empty() {
            return Err(LossError::InvalidDistribution(String::from("empty vocabulary")));
        }
        if let Some(bad) = probs.iter().find(|p| **p < 0.0 || !p.is_finite()) {
            return Err(LossError::InvalidDistribution(alloc::format!(
                "entry {bad} is negative or non-finite"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(LossError::InvalidDistribution(alloc::format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(vocab: usize) -> Self {
        Self {
            probs: alloc::vec![1.0 / vocab as f64; vocab],
        }
    }

    pub fn one_hot(vocab: usize, index: usize) -> Self {
        let mut probs = alloc::vec![0.0; vocab];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn vocab_size(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }
}

impl TryFrom<Vec<f64>> for TokenDistribution {
    type Error = LossError;
    fn try_from(probs: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(probs)
    }
}

impl From<TokenDistribution> for Vec<f64> {
    fn from(d: TokenDistribution) -> Self {
        d.probs
    }
}

/// How token losses combine into an example total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenAgg {
    #[default]
    Mean,
    Sum,
}

impl TokenAgg {
    pub fn total(&self, token_losses: &[f64]) -> f64 {
        let sum: f64 = token_losses.iter().sum();
        match self {
            TokenAgg::Mean => sum / token_losses.len() as f64,
            TokenAgg::Sum => sum,
        }
    }
}

/// Loss of one example: per-position values plus their aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleLoss {
    pub example_id: String,
    pub subset: TransferSubsetKind,
    pub token_losses: Vec<f64>,
    pub total: f64,
}

impl ExampleLoss {
    pub fn new(
        example_id: String,
        subset: TransferSubsetKind,
        token_losses: Vec<f64>,
        agg: TokenAgg,
    ) -> Result<Self, LossError> {
        if token_losses.is_empty() {
            return Err(LossError::EmptyInput);
        }
        let total = agg.total(&token_losses);
        Ok(Self {
            example_id,
            subset,
            token_losses,
            total,
        })
    }
}

/// Cross-entropy against one-hot gold: per position, minus the log of the
/// floored probability the model put on the gold index.
pub fn ce_loss(
    example_id: &str,
    subset: TransferSubsetKind,
    gold: &[usize],
    predicted: &[TokenDistribution],
    agg: TokenAgg,
) -> Result<ExampleLoss, LossError> {
    if gold.is_empty() {
        return Err(LossError::EmptyInput);
    }
    if gold.len() != predicted.len() {
        return Err(LossError::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let token_losses = gold
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(position, (&index, dist))| {
            if index >= dist.vocab_size() {
                return Err(LossError::IndexOutOfVocab {
                    position,
                    index,
                    vocab: dist.vocab_size(),
                });
            }
            Ok(-libm::log(dist.prob(index).max(PROB_FLOOR)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ExampleLoss::new(String::from(example_id), subset, token_losses, agg)
}

/// Flat mean over example totals.
pub fn sft_loss(losses: &[ExampleLoss]) -> Result<f64, LossError> {
    if losses.is_empty() {
        return Err(LossError::EmptyInput);
    }
    Ok(losses.iter().map(|l| l.total).sum::<f64>() / losses.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdrrlLoss {
    pub total: f64,
    /// Mean example total per subset present in the input.
    pub per_subset: BTreeMap<TransferSubsetKind, f64>,
}

/// Sum over subsets of the per-subset mean loss. Normalizing inside each
/// subset first is what distinguishes this from the flat average: a subset's
/// contribution does not grow with its size.
pub fn sdrrl_loss(losses: &[ExampleLoss]) -> Result<SdrrlLoss, LossError> {
    if losses.is_empty() {
        return Err(LossError::EmptyInput);
    }
    let mut sums: BTreeMap<TransferSubsetKind, (f64, u64)> = BTreeMap::new();
    for loss in losses {
        let entry = sums.entry(loss.subset).or_insert((0.0, 0));
        entry.0 += loss.total;
        entry.1 += 1;
    }
    let per_subset: BTreeMap<TransferSubsetKind, f64> = sums
        .into_iter()
        .map(|(subset, (sum, count))| (subset, sum / count as f64))
        .collect();
    Ok(SdrrlLoss {
        total: per_subset.values().sum(),
        per_subset,
    })
}
