//! Instruction templates over an external parallel corpus: bidirectional
//! translation tasks and target-language sentence completion.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::lang::{self, LanguageTag};
use crate::record::{AnswerOrigin, ParallelPair, TrainingExample, TransferSubsetKind};
use crate::rng::{self, Stage};

pub const DEFAULT_MT_TEMPLATE: &str =
    "Translate the following sentence from {SRC_NAME} to {TGT_NAME}.\n{SENTENCE}";
pub const DEFAULT_COMP_TEMPLATE: &str =
    "Complete the following sentence in {TGT_NAME} according to its context.\n{PREFIX}";

/// Prompt templates for the two parallel-corpus tasks. Placeholders must
/// each appear exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionTemplate {
    pub mt_template: String,
    pub comp_template: String,
}

impl Default for InstructionTemplate {
    fn default() -> Self {
        Self {
            mt_template: String::from(DEFAULT_MT_TEMPLATE),
            comp_template: String::from(DEFAULT_COMP_TEMPLATE),
        }
    }
}

impl InstructionTemplate {
    pub fn validate(&self) -> Result<(), TemplateError> {
        for (template, placeholders) in [
            (&self.mt_template, &["{SRC_NAME}", "{TGT_NAME}", "{SENTENCE}"][..]),
            (&self.comp_template, &["{TGT_NAME}", "{PREFIX}"][..]),
        ] {
            for placeholder in placeholders {
                if template.matches(placeholder).count() != 1 {
                    return Err(TemplateError::BadPlaceholder {
                        placeholder: String::from(*placeholder),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn render_mt(&self, src_name: &str, tgt_name: &str, sentence: &str) -> String {
        self.mt_template
            .replace("{SRC_NAME}", src_name)
            .replace("{TGT_NAME}", tgt_name)
            .replace("{SENTENCE}", sentence)
    }

    /// Prompt head for completion examples; the prefix is appended to this.
    pub fn render_comp_head(&self, tgt_name: &str) -> String {
        let head = self.comp_template.replace("{TGT_NAME}", tgt_name);
        match head.find("{PREFIX}") {
            Some(at) => String::from(&head[..at]),
            None => head,
        }
    }

    pub fn render_comp(&self, tgt_name: &str, prefix: &str) -> String {
        self.comp_template
            .replace("{TGT_NAME}", tgt_name)
            .replace("{PREFIX}", prefix)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TemplateError {
    #[error("language {0:?} has no display name in the registry")]
    UnknownLanguageName(String),
    #[error("template placeholder {placeholder} must appear exactly once")]
    BadPlaceholder { placeholder: String },
}

fn display_name(tag: LanguageTag) -> Result<&'static str, TemplateError> {
    lang::display_name(tag).ok_or_else(|| TemplateError::UnknownLanguageName(String::from(tag.as_str())))
}

/// Why a parallel pair was dropped before templating.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairFilterStats {
    pub kept: u64,
    pub length_ratio: u64,
    pub copy_detected: u64,
    pub empty_side: u64,
}

/// The same cheap noise filters applied to transfer-set translations:
/// character-length ratio within bounds, target not a case-folded copy of
/// the source.
pub fn filter_pairs(pairs: &[ParallelPair], bounds: (f64, f64)) -> (Vec<ParallelPair>, PairFilterStats) {
    let mut stats = PairFilterStats::default();
    let mut kept = Vec::new();
    for pair in pairs {
        if pair.src.trim().is_empty() || pair.tgt.trim().is_empty() {
            stats.empty_side += 1;
            continue;
        }
        let ratio = pair.tgt.chars().count() as f64 / pair.src.chars().count() as f64;
        if ratio < bounds.0 || ratio > bounds.1 {
            stats.length_ratio += 1;
            continue;
        }
        if pair.tgt.to_lowercase() == pair.src.to_lowercase() {
            stats.copy_detected += 1;
            continue;
        }
        kept.push(pair.clone());
    }
    stats.kept = kept.len() as u64;
    (kept, stats)
}

/// Two translation instructions per pair, one in each direction. The prompt
/// language is the embedded sentence's language; the response is the other
/// side verbatim.
pub fn build_mt_instructions(
    pairs: &[ParallelPair],
    source: LanguageTag,
    target: LanguageTag,
    template: &InstructionTemplate,
) -> Result<Vec<TrainingExample>, TemplateError> {
    let src_name = display_name(source)?;
    let tgt_name = display_name(target)?;
    let mut examples = Vec::with_capacity(pairs.len() * 2);
    for pair in pairs {
        examples.push(TrainingExample {
            id: format!("{}-MT-fwd", pair.id),
            prompt: template.render_mt(src_name, tgt_name, &pair.src),
            response: pair.tgt.clone(),
            subset: TransferSubsetKind::Translation,
            prompt_lang: source,
            response_lang: target,
            source_record_id: pair.id.clone(),
            answer_origin: AnswerOrigin::GroundTruth,
        });
        examples.push(TrainingExample {
            id: format!("{}-MT-rev", pair.id),
            prompt: template.render_mt(tgt_name, src_name, &pair.tgt),
            response: pair.src.clone(),
            subset: TransferSubsetKind::Translation,
            prompt_lang: target,
            response_lang: source,
            source_record_id: pair.id.clone(),
            answer_origin: AnswerOrigin::GroundTruth,
        });
    }
    Ok(examples)
}

/// Byte offset just past the k-th word of `text` (1-based), per UAX #29
/// word boundaries. `None` when the text has fewer than k words.
fn end_of_word(text: &str, k: usize) -> Option<usize> {
    let mut seen = 0usize;
    let mut offset = 0usize;
    for segment in text.split_word_bounds() {
        offset += segment.len();
        if segment.chars().any(char::is_alphanumeric) {
            seen += 1;
            if seen == k {
                return Some(offset);
            }
        }
    }
    None
}

fn word_count(text: &str) -> usize {
    text.split_word_bounds()
        .filter(|s| s.chars().any(char::is_alphanumeric))
        .count()
}

/// Completion instructions built from the target side of each pair. The
/// split point k is uniform over {1, .., n-1} words, drawn from the pair's
/// own stream; the response is the full sentence, so the prefix is always a
/// strict prefix of it.
pub fn build_comp_instructions(
    pairs: &[ParallelPair],
    target: LanguageTag,
    template: &InstructionTemplate,
    seed: u64,
) -> Result<(Vec<TrainingExample>, u64), TemplateError> {
    let tgt_name = display_name(target)?;
    let mut examples = Vec::new();
    let mut skipped = 0u64;
    for pair in pairs {
        let words = word_count(&pair.tgt);
        if words < 2 {
            skipped += 1;
            continue;
        }
        let mut rng = rng::derive_rng(seed, &pair.id, Stage::CompSplit);
        let k = 1 + rng::uniform_index(&mut rng, words - 1);
        let cut = end_of_word(&pair.tgt, k).expect("k is below the word count");
        examples.push(TrainingExample {
            id: format!("{}-COMP", pair.id),
            prompt: template.render_comp(tgt_name, &pair.tgt[..cut]),
            response: pair.tgt.clone(),
            subset: TransferSubsetKind::Completion,
            prompt_lang: target,
            response_lang: target,
            source_record_id: pair.id.clone(),
            answer_origin: AnswerOrigin::GroundTruth,
        });
    }
    Ok((examples, skipped))
}
