//! Character-trigram language identification.
//!
//! A naive-Bayes classifier over character trigrams: robust across scripts,
//! no external models, deterministic. Used to reject off-target
//! translations and to measure off-target rates.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{collections::BTreeMap, format};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::lang::LanguageTag;

/// Minimum normalized corpus size for profile construction.
pub const MIN_PROFILE_CHARS: usize = 10_000;
/// Texts shorter than this after normalization are not classified.
pub const MIN_CLASSIFY_CHARS: usize = 20;

pub const PROFILE_MAGIC: &[u8; 4] = b"DFLP";
pub const PROFILE_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LidError {
    #[error("corpus too small: {chars} normalized characters, need {MIN_PROFILE_CHARS}")]
    InsufficientCorpus { chars: usize },
    #[error("text too short to classify: {chars} normalized characters, need {MIN_CLASSIFY_CHARS}")]
    Indeterminate { chars: usize },
    #[error("classification requires at least one profile")]
    NoProfiles,
    #[error("bad profile data: {0}")]
    BadProfileData(String),
}

/// NFC, case-fold, strip ASCII digits and punctuation, collapse whitespace
/// runs to single spaces, trim.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.nfc() {
        for lc in c.to_lowercase() {
            if lc.is_ascii_digit() || lc.is_ascii_punctuation() {
                continue;
            }
            if lc.is_whitespace() {
                pending_space = true;
                continue;
            }
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(lc);
        }
    }
    out
}

fn padded_chars(normalized: &str) -> Vec<char> {
    let mut chars = Vec::with_capacity(normalized.chars().count() + 2);
    chars.push(' ');
    chars.extend(normalized.chars());
    chars.push(' ');
    chars
}

fn write_trigram(buf: &mut String, window: &[char]) {
    buf.clear();
    buf.extend(window.iter());
}

/// Trigram model for one language: log-probabilities with add-one smoothing
/// and a single out-of-vocabulary fallback class, so observed mass plus the
/// fallback forms a proper distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    lang: LanguageTag,
    /// Sorted by trigram; binary-searchable and diffable when serialized.
    trigram_logprobs: Vec<(String, f32)>,
    fallback_logprob: f32,
}

impl LanguageProfile {
    pub fn lang(&self) -> LanguageTag {
        self.lang
    }

    pub fn len(&self) -> usize {
        self.trigram_logprobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trigram_logprobs.is_empty()
    }

    pub fn logprob(&self, trigram: &str) -> f32 {
        match self
            .trigram_logprobs
            .binary_search_by(|(key, _)| key.as_str().cmp(trigram))
        {
            Ok(i) => self.trigram_logprobs[i].1,
            Err(_) => self.fallback_logprob,
        }
    }

    pub fn fallback_logprob(&self) -> f32 {
        self.fallback_logprob
    }

    /// Mean per-trigram log-likelihood of `text` under this profile, or
    /// `None` when the text is below the classification floor.
    pub fn mean_loglik(&self, text: &str) -> Option<f64> {
        let normalized = normalize(text);
        if normalized.chars().count() < MIN_CLASSIFY_CHARS {
            return None;
        }
        let chars = padded_chars(&normalized);
        let mut buf = String::new();
        let mut sum = 0.0f64;
        let mut count = 0u64;
        for window in chars.windows(3) {
            write_trigram(&mut buf, window);
            sum += self.logprob(&buf) as f64;
            count += 1;
        }
        Some(sum / count as f64)
    }
}

/// Build a profile from ≥ 10,000 normalized characters of text. The result
/// is a pure function of the input: identical corpora give byte-identical
/// serialized profiles.
pub fn build_profile(lang: LanguageTag, corpus_text: &str) -> Result<LanguageProfile, LidError> {
    let normalized = normalize(corpus_text);
    let chars_count = normalized.chars().count();
    if chars_count < MIN_PROFILE_CHARS {
        return Err(LidError::InsufficientCorpus { chars: chars_count });
    }
    let chars = padded_chars(&normalized);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut buf = String::new();
    let mut total = 0u64;
    for window in chars.windows(3) {
        write_trigram(&mut buf, window);
        *counts.entry(buf.clone()).or_insert(0) += 1;
        total += 1;
    }
    let distinct = counts.len() as u64;
    // Add-one smoothing with one extra count reserved for the OOV class.
    let denominator = (total + distinct + 1) as f64;
    let trigram_logprobs = counts
        .into_iter()
        .map(|(trigram, count)| {
            (trigram, libm::log((count + 1) as f64 / denominator) as f32)
        })
        .collect();
    Ok(LanguageProfile {
        lang,
        trigram_logprobs,
        fallback_logprob: libm::log(1.0 / denominator) as f32,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub lang: LanguageTag,
    /// Best minus second-best mean log-likelihood; 0 with a single profile.
    pub margin: f64,
}

/// Argmax of mean per-trigram log-likelihood across profiles. Ties break
/// toward the lexicographically smaller language code.
pub fn classify(text: &str, profiles: &[LanguageProfile]) -> Result<Classification, LidError> {
    if profiles.is_empty() {
        return Err(LidError::NoProfiles);
    }
    let normalized = normalize(text);
    let chars_count = normalized.chars().count();
    if chars_count < MIN_CLASSIFY_CHARS {
        return Err(LidError::Indeterminate { chars: chars_count });
    }
    let chars = padded_chars(&normalized);
    let mut best: Option<(LanguageTag, f64)> = None;
    let mut second: Option<f64> = None;
    let mut buf = String::new();
    for profile in profiles {
        let mut sum = 0.0f64;
        let mut count = 0u64;
        for window in chars.windows(3) {
            write_trigram(&mut buf, window);
            sum += profile.logprob(&buf) as f64;
            count += 1;
        }
        let score = sum / count as f64;
        match best {
            None => best = Some((profile.lang(), score)),
            Some((best_lang, best_score)) => {
                let wins = score > best_score
                    || (score == best_score && profile.lang().as_str() < best_lang.as_str());
                if wins {
                    second = Some(best_score);
                    best = Some((profile.lang(), score));
                } else if second.is_none_or(|s| score > s) {
                    second = Some(score);
                }
            }
        }
    }
    let (lang, best_score) = best.expect("at least one profile");
    Ok(Classification {
        lang,
        margin: second.map_or(0.0, |s| best_score - s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffTargetReport {
    /// Fraction of classifiable texts whose label differs from the expected
    /// language.
    pub rate: f64,
    pub counted: u64,
    pub off_target: u64,
    /// Too-short texts, excluded from both numerator and denominator.
    pub indeterminate: u64,
    /// Set when no text could be classified; the rate is then 0 by decision.
    pub empty_warning: bool,
}

pub fn off_target_rate<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    expected: LanguageTag,
    profiles: &[LanguageProfile],
) -> Result<OffTargetReport, LidError> {
    if !profiles.iter().any(|p| p.lang() == expected) {
        return Err(LidError::BadProfileData(format!(
            "no profile for expected language {expected}"
        )));
    }
    let mut counted = 0u64;
    let mut off_target = 0u64;
    let mut indeterminate = 0u64;
    for text in texts {
        match classify(text, profiles) {
            Ok(c) => {
                counted += 1;
                if c.lang != expected {
                    off_target += 1;
                }
            }
            Err(LidError::Indeterminate { .. }) => indeterminate += 1,
            Err(other) => return Err(other),
        }
    }
    Ok(OffTargetReport {
        rate: if counted == 0 {
            0.0
        } else {
            off_target as f64 / counted as f64
        },
        counted,
        off_target,
        indeterminate,
        empty_warning: counted == 0,
    })
}

/// Serialize a profile: `DFLP` magic, version, language code, fallback
/// log-probability, then sorted (length-prefixed trigram, f32) pairs.
pub fn encode_profile(profile: &LanguageProfile) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + profile.trigram_logprobs.len() * 8);
    out.extend_from_slice(PROFILE_MAGIC);
    out.extend_from_slice(&PROFILE_VERSION.to_le_bytes());
    out.extend_from_slice(profile.lang.as_str().as_bytes());
    out.extend_from_slice(&profile.fallback_logprob.to_le_bytes());
    out.extend_from_slice(&(profile.trigram_logprobs.len() as u32).to_le_bytes());
    for (trigram, logprob) in &profile.trigram_logprobs {
        let bytes = trigram.as_bytes();
        out.push(bytes.len() as u8);
        out.extend_from_slice(bytes);
        out.extend_from_slice(&logprob.to_le_bytes());
    }
    out
}

pub fn decode_profile(data: &[u8]) -> Result<LanguageProfile, LidError> {
    let bad = |msg: &str| LidError::BadProfileData(String::from(msg));
    let mut at = 0usize;
    let mut take = |n: usize| -> Result<&[u8], LidError> {
        let end = at.checked_add(n).filter(|e| *e <= data.len());
        match end {
            Some(end) => {
                let slice = &data[at..end];
                at = end;
                Ok(slice)
            }
            None => Err(bad("truncated profile")),
        }
    };

    if take(4)? != PROFILE_MAGIC {
        return Err(bad("missing DFLP magic"));
    }
    let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
    if version != PROFILE_VERSION {
        return Err(LidError::BadProfileData(format!("unsupported version {version}")));
    }
    let lang_bytes = take(3)?;
    let lang_str =
        core::str::from_utf8(lang_bytes).map_err(|_| bad("language code is not UTF-8"))?;
    let lang = LanguageTag::new(lang_str).map_err(|_| bad("malformed language code"))?;
    let fallback_logprob = f32::from_le_bytes(take(4)?.try_into().unwrap());
    let count = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    let mut trigram_logprobs = Vec::with_capacity(count);
    let mut previous: Option<String> = None;
    for _ in 0..count {
        let len = take(1)?[0] as usize;
        let trigram = core::str::from_utf8(take(len)?)
            .map_err(|_| bad("trigram is not UTF-8"))?
            .into();
        let logprob = f32::from_le_bytes(take(4)?.try_into().unwrap());
        if let Some(prev) = &previous {
            if *prev >= trigram {
                return Err(bad("trigrams are not strictly sorted"));
            }
        }
        previous = Some(trigram);
        trigram_logprobs.push((previous.clone().unwrap(), logprob));
    }
    if at != data.len() {
        return Err(bad("trailing bytes after profile"));
    }
    Ok(LanguageProfile {
        lang,
        trigram_logprobs,
        fallback_logprob,
    })
}
