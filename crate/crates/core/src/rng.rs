//! Deterministic per-record randomness.
//!
//! Every random decision in the pipeline draws from a stream derived from
//! `(seed, record_id, stage)`, so any record's journey can be replayed in
//! isolation and output never depends on worker count or call order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

/// Pipeline stages that consume randomness. The label set is closed: adding
/// a stage is a breaking change to reproducibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Answer-source choice when building the transfer set.
    Sample,
    /// Token replacement decisions during code-switching.
    CodeSwitch,
    /// Split-point choice for sentence-completion examples.
    CompSplit,
}

impl Stage {
    pub fn label(&self) -> &'static str {
        match self {
            Stage::Sample => "sample",
            Stage::CodeSwitch => "code-switch",
            Stage::CompSplit => "comp",
        }
    }
}

/// Deterministic stream for one (seed, record, stage) triple. The triple is
/// length-prefix hashed so distinct inputs can never collide by
/// concatenation.
pub fn derive_rng(seed: u64, record_id: &str, stage: Stage) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((record_id.len() as u64).to_le_bytes());
    hasher.update(record_id.as_bytes());
    let label = stage.label();
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Uniform in [0, 1) with 53 bits of precision.
pub fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn bernoulli(rng: &mut impl RngCore, p: f64) -> bool {
    uniform_f64(rng) < p
}

/// Unbiased uniform index in [0, n) via Lemire rejection. Panics when n == 0.
pub fn uniform_index(rng: &mut impl RngCore, n: usize) -> usize {
    let n = n as u64;
    assert!(n > 0, "uniform_index requires a non-empty range");
    let threshold = n.wrapping_neg() % n;
    loop {
        let wide = (rng.next_u64() as u128) * (n as u128);
        if (wide as u64) >= threshold {
            return (wide >> 64) as usize;
        }
    }
}

/// First 8 bytes of SHA-256 over length-prefixed parts; used by mock
/// backends so their behaviour is identical across processes and platforms.
pub fn stable_hash64(parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}
