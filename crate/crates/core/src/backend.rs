//! Client abstractions for the three external services the pipeline uses:
//! response generation, machine translation, and reference-free translation
//! quality estimation. Implementations over the wire live in the companion
//! crate; the deterministic mocks here are pure functions of their request,
//! so tests and mock pipeline runs are reproducible across processes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lang::LanguageTag;
use crate::rng::stable_hash64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("backend unavailable after {attempts} attempts: {detail}")]
    Unavailable { attempts: u32, detail: String },
    #[error("malformed backend response: {0}")]
    MalformedResponse(String),
    #[error("backend rejected the request: {0}")]
    Remote(String),
    #[error("empty input text")]
    EmptyInput,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub lang: LanguageTag,
    pub max_tokens: u32,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub text: String,
    #[serde(default)]
    pub refusal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationRequest {
    pub text: String,
    pub from: LanguageTag,
    pub to: LanguageTag,
    pub beam_width: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationResult {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeRequest {
    pub source: String,
    pub candidate: String,
    pub from: LanguageTag,
    pub to: LanguageTag,
}

/// Reference-free quality score in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QeScore(pub f64);

pub trait GenerationBackend: Send + Sync {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError>;
}

pub trait TranslationBackend: Send + Sync {
    fn translate(&self, req: &TranslationRequest) -> Result<TranslationResult, BackendError>;
}

pub trait QeBackend: Send + Sync {
    fn score_quality(&self, req: &QeRequest) -> Result<QeScore, BackendError>;
}

/// Shared request checks; wire and mock backends both call these so the
/// contract cannot drift between them.
pub fn check_generation_request(req: &GenerationRequest) -> Result<(), BackendError> {
    if req.prompt.trim().is_empty() {
        return Err(BackendError::EmptyInput);
    }
    Ok(())
}

pub fn check_translation_request(req: &TranslationRequest) -> Result<(), BackendError> {
    if req.text.trim().is_empty() {
        return Err(BackendError::EmptyInput);
    }
    if req.from == req.to {
        return Err(BackendError::InvalidRequest(String::from(
            "translation source and target language are equal",
        )));
    }
    if req.beam_width == 0 {
        return Err(BackendError::InvalidRequest(String::from("beam_width must be at least 1")));
    }
    Ok(())
}

pub fn check_qe_request(req: &QeRequest) -> Result<(), BackendError> {
    if req.source.trim().is_empty() || req.candidate.trim().is_empty() {
        return Err(BackendError::EmptyInput);
    }
    Ok(())
}

/// Post-condition checks on backend results, applied regardless of transport.
pub fn check_generation_result(result: &GenerationResult) -> Result<(), BackendError> {
    if result.text.is_empty() && !result.refusal {
        return Err(BackendError::MalformedResponse(String::from(
            "empty generation text without refusal flag",
        )));
    }
    Ok(())
}

pub fn check_qe_score(score: f64) -> Result<QeScore, BackendError> {
    if !(0.0..=1.0).contains(&score) || !score.is_finite() {
        return Err(BackendError::MalformedResponse(alloc::format!(
            "quality score {score} outside [0, 1]"
        )));
    }
    Ok(QeScore(score))
}

/// Deterministic generation stand-ins.
#[derive(Debug, Clone)]
pub enum MockGeneration {
    /// Answer is the prompt itself.
    Echo,
    /// Answer is the prompt with characters reversed.
    Reversed,
    Fixed(String),
    /// Answer assembled from sample sentences, selected by a stable hash of
    /// the prompt; see [`pick_sample_text`].
    SampleText(SampleTextBank),
}

/// A generation backend with optional scripted failures, keyed on exact
/// prompt text.
#[derive(Debug, Clone)]
pub struct MockGenerationBackend {
    pub mode: MockGeneration,
    pub fail_on: BTreeSet<String>,
    pub refuse_on: BTreeSet<String>,
}

impl MockGenerationBackend {
    pub fn new(mode: MockGeneration) -> Self {
        Self {
            mode,
            fail_on: BTreeSet::new(),
            refuse_on: BTreeSet::new(),
        }
    }

    pub fn failing_on(mut self, prompts: impl IntoIterator<Item = String>) -> Self {
        self.fail_on.extend(prompts);
        self
    }
}

impl GenerationBackend for MockGenerationBackend {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError> {
        check_generation_request(req)?;
        if self.fail_on.contains(&req.prompt) {
            return Err(BackendError::Unavailable {
                attempts: 1,
                detail: String::from("scripted failure"),
            });
        }
        if self.refuse_on.contains(&req.prompt) {
            return Ok(GenerationResult {
                text: String::new(),
                refusal: true,
            });
        }
        let text = match &self.mode {
            MockGeneration::Echo => req.prompt.clone(),
            MockGeneration::Reversed => req.prompt.chars().rev().collect(),
            MockGeneration::Fixed(text) => text.clone(),
            MockGeneration::SampleText(bank) => {
                bank.pick(req.lang, &["gen", &req.prompt], req.prompt.chars().count())?
            }
        };
        Ok(GenerationResult {
            text,
            refusal: false,
        })
    }
}

/// Sentences per language, used by mocks to synthesize text that genuinely
/// looks like a given language (it is drawn verbatim from that language).
#[derive(Debug, Clone, Default)]
pub struct SampleTextBank {
    sentences: BTreeMap<LanguageTag, Vec<String>>,
}

impl SampleTextBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, lang: LanguageTag, sentences: impl IntoIterator<Item = String>) {
        self.sentences.entry(lang).or_default().extend(sentences);
    }

    /// Deterministically assemble text in `lang` of roughly `target_chars`
    /// length: sentences are hash-picked until at least half the target
    /// length (and a 20-character floor) is reached.
    pub fn pick(
        &self,
        lang: LanguageTag,
        hash_parts: &[&str],
        target_chars: usize,
    ) -> Result<String, BackendError> {
        let sentences = self
            .sentences
            .get(&lang)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| {
                BackendError::InvalidRequest(alloc::format!("no sample text for language {lang}"))
            })?;
        let floor = (target_chars / 2).max(20);
        let mut out = String::new();
        let mut picked = 0usize;
        while out.chars().count() < floor {
            let mut parts: Vec<&str> = Vec::with_capacity(hash_parts.len() + 2);
            parts.extend_from_slice(hash_parts);
            parts.push(lang.as_str());
            let counter = picked.to_string();
            parts.push(&counter);
            let idx = (stable_hash64(&parts) % sentences.len() as u64) as usize;
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&sentences[idx]);
            picked += 1;
        }
        Ok(out)
    }
}

/// Deterministic translation stand-ins.
#[derive(Debug, Clone)]
pub enum MockTranslation {
    /// Word-by-word substitution through a small lookup table; unknown words
    /// pass through unchanged.
    DictSub(BTreeMap<String, String>),
    /// Returns the input verbatim (tripping the copy gate).
    Identity,
    /// Sentences of the target language, hash-picked and length-matched.
    SampleText(SampleTextBank),
}

#[derive(Debug, Clone)]
pub struct MockTranslationBackend {
    pub mode: MockTranslation,
    /// Exact-input overrides consulted before the mode.
    pub scripted: BTreeMap<String, String>,
}

impl MockTranslationBackend {
    pub fn new(mode: MockTranslation) -> Self {
        Self {
            mode,
            scripted: BTreeMap::new(),
        }
    }

    pub fn with_scripted(mut self, input: &str, output: &str) -> Self {
        self.scripted.insert(String::from(input), String::from(output));
        self
    }
}

impl TranslationBackend for MockTranslationBackend {
    fn translate(&self, req: &TranslationRequest) -> Result<TranslationResult, BackendError> {
        check_translation_request(req)?;
        if let Some(output) = self.scripted.get(&req.text) {
            return Ok(TranslationResult {
                text: output.clone(),
            });
        }
        let text = match &self.mode {
            MockTranslation::DictSub(table) => req
                .text
                .split_whitespace()
                .map(|word| table.get(&word.to_lowercase()).map(String::as_str).unwrap_or(word))
                .collect::<Vec<_>>()
                .join(" "),
            MockTranslation::Identity => req.text.clone(),
            MockTranslation::SampleText(bank) => bank.pick(
                req.to,
                &["mt", &req.text, req.from.as_str()],
                req.text.chars().count(),
            )?,
        };
        Ok(TranslationResult { text })
    }
}

/// Deterministic quality-estimation stand-ins.
#[derive(Debug, Clone)]
pub enum MockQe {
    Fixed(f64),
    /// Stable hash of (source, candidate, pair) mapped uniformly into
    /// [lo, hi); reproducible across processes.
    HashUniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone)]
pub struct MockQeBackend {
    pub mode: MockQe,
    /// Exact (source, candidate) overrides consulted before the mode.
    pub scripted: BTreeMap<(String, String), f64>,
}

impl MockQeBackend {
    pub fn new(mode: MockQe) -> Self {
        Self {
            mode,
            scripted: BTreeMap::new(),
        }
    }

    pub fn fixed(score: f64) -> Self {
        Self::new(MockQe::Fixed(score))
    }

    pub fn with_scripted(mut self, source: &str, candidate: &str, score: f64) -> Self {
        self.scripted
            .insert((String::from(source), String::from(candidate)), score);
        self
    }
}

impl QeBackend for MockQeBackend {
    fn score_quality(&self, req: &QeRequest) -> Result<QeScore, BackendError> {
        check_qe_request(req)?;
        let key = (req.source.clone(), req.candidate.clone());
        let raw = if let Some(score) = self.scripted.get(&key) {
            *score
        } else {
            match &self.mode {
                MockQe::Fixed(score) => *score,
                MockQe::HashUniform { lo, hi } => {
                    let h = stable_hash64(&[
                        "qe",
                        &req.source,
                        &req.candidate,
                        req.from.as_str(),
                        req.to.as_str(),
                    ]);
                    let unit = (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                    lo + unit * (hi - lo)
                }
            }
        };
        check_qe_score(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eng() -> LanguageTag {
        LanguageTag::new("eng").unwrap()
    }

    fn ind() -> LanguageTag {
        LanguageTag::new("ind").unwrap()
    }

    #[test]
    fn reversed_mock_reverses() {
        let backend = MockGenerationBackend::new(MockGeneration::Reversed);
        let result = backend
            .generate(&GenerationRequest {
                prompt: String::from("abc"),
                lang: eng(),
                max_tokens: 16,
                temperature: 0.0,
            })
            .unwrap();
        assert_eq!(result.text, "cba");
    }

    #[test]
    fn dict_substitution_mock() {
        let table = BTreeMap::from([
            (String::from("good"), String::from("baik")),
            (String::from("morning"), String::from("pagi")),
        ]);
        let backend = MockTranslationBackend::new(MockTranslation::DictSub(table));
        let result = backend
            .translate(&TranslationRequest {
                text: String::from("good morning"),
                from: eng(),
                to: ind(),
                beam_width: 4,
            })
            .unwrap();
        assert_eq!(result.text, "baik pagi");
    }

    #[test]
    fn translation_rejects_identity_pair_and_empty_input() {
        let backend = MockTranslationBackend::new(MockTranslation::Identity);
        let same = backend.translate(&TranslationRequest {
            text: String::from("hello"),
            from: eng(),
            to: eng(),
            beam_width: 4,
        });
        assert!(matches!(same, Err(BackendError::InvalidRequest(_))));

        let empty = backend.translate(&TranslationRequest {
            text: String::from("   "),
            from: eng(),
            to: ind(),
            beam_width: 4,
        });
        assert!(matches!(empty, Err(BackendError::EmptyInput)));
    }

    #[test]
    fn qe_mock_is_deterministic_and_bounded() {
        let backend = MockQeBackend::new(MockQe::HashUniform { lo: 0.0, hi: 1.0 });
        let req = QeRequest {
            source: String::from("hello world"),
            candidate: String::from("halo dunia"),
            from: eng(),
            to: ind(),
        };
        let a = backend.score_quality(&req).unwrap();
        let b = backend.score_quality(&req).unwrap();
        assert_eq!(a.0, b.0);
        assert!((0.0..=1.0).contains(&a.0));
    }

    #[test]
    fn fixed_qe_returns_its_score() {
        let backend = MockQeBackend::fixed(0.9);
        let req = QeRequest {
            source: String::from("a b"),
            candidate: String::from("c d"),
            from: eng(),
            to: ind(),
        };
        assert_eq!(backend.score_quality(&req).unwrap().0, 0.9);
    }

    #[test]
    fn out_of_range_score_is_malformed() {
        let backend = MockQeBackend::fixed(1.5);
        let req = QeRequest {
            source: String::from("a b"),
            candidate: String::from("c d"),
            from: eng(),
            to: ind(),
        };
        assert!(matches!(
            backend.score_quality(&req),
            Err(BackendError::MalformedResponse(_))
        ));
    }

    #[test]
    fn sample_text_bank_is_deterministic() {
        let mut bank = SampleTextBank::new();
        bank.add(ind(), [String::from("Kalimat pertama untuk pengujian."), String::from("Kalimat kedua yang berbeda.")]);
        let a = bank.pick(ind(), &["x"], 60).unwrap();
        let b = bank.pick(ind(), &["x"], 60).unwrap();
        assert_eq!(a, b);
        assert!(a.chars().count() >= 30);
        assert!(bank.pick(eng(), &["x"], 60).is_err());
    }
}
