//! Corpus record types and structural validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lang::{self, LanguageTag};

/// Whether an answer came from the original corpus or from a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnswerOrigin {
    GroundTruth,
    ModelGenerated,
}

/// Provenance tags appended by pipeline stages. Stages never mutate records
/// in place; they emit copies with one of these pushed onto `provenance`.
pub mod tags {
    pub const MODEL_GENERATED: &str = "model-generated";
    pub const GENERATION_FAILED: &str = "generation-failed";
    pub const GROUND_TRUTH_FALLBACK: &str = "ground-truth-fallback";
}

/// One question/answer pair with per-field language tags and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub id: String,
    pub question: String,
    pub answer: String,
    pub question_lang: LanguageTag,
    pub answer_lang: LanguageTag,
    pub answer_origin: AnswerOrigin,
    pub provenance: Vec<String>,
}

impl InstructionRecord {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.provenance.iter().any(|t| t == tag)
    }

    /// Copy with one more provenance tag.
    pub fn with_tag(&self, tag: &str) -> Self {
        let mut next = self.clone();
        next.provenance.push(String::from(tag));
        next
    }
}

/// The six training-subset kinds, keyed by (prompt language, response
/// language) for the four transfer subsets plus the two parallel-corpus
/// task kinds. Ordering is the canonical corpus emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TransferSubsetKind {
    /// Prompt and response both in the source language.
    #[serde(rename = "LL")]
    SourceSource,
    /// Prompt translated into the target language, response in the source language.
    #[serde(rename = "TL")]
    TargetSource,
    /// Prompt in the source language, response translated into the target language.
    #[serde(rename = "LT")]
    SourceTarget,
    /// Prompt and response both translated into the target language.
    #[serde(rename = "TT")]
    TargetTarget,
    /// Bidirectional translation instructions built from a parallel corpus.
    #[serde(rename = "MT")]
    Translation,
    /// Target-language sentence-completion instructions.
    #[serde(rename = "COMP")]
    Completion,
}

impl TransferSubsetKind {
    pub const ALL: [TransferSubsetKind; 6] = [
        TransferSubsetKind::SourceSource,
        TransferSubsetKind::TargetSource,
        TransferSubsetKind::SourceTarget,
        TransferSubsetKind::TargetTarget,
        TransferSubsetKind::Translation,
        TransferSubsetKind::Completion,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TransferSubsetKind::SourceSource => "LL",
            TransferSubsetKind::TargetSource => "TL",
            TransferSubsetKind::SourceTarget => "LT",
            TransferSubsetKind::TargetTarget => "TT",
            TransferSubsetKind::Translation => "MT",
            TransferSubsetKind::Completion => "COMP",
        }
    }

    /// Expected (prompt, response) languages for a transfer subset.
    /// `None` for the parallel-corpus kinds, whose direction varies per example.
    pub fn transfer_langs(
        &self,
        source: LanguageTag,
        target: LanguageTag,
    ) -> Option<(LanguageTag, LanguageTag)> {
        match self {
            TransferSubsetKind::SourceSource => Some((source, source)),
            TransferSubsetKind::TargetSource => Some((target, source)),
            TransferSubsetKind::SourceTarget => Some((source, target)),
            TransferSubsetKind::TargetTarget => Some((target, target)),
            _ => None,
        }
    }
}

impl core::fmt::Display for TransferSubsetKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of the emitted training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub id: String,
    pub prompt: String,
    pub response: String,
    pub subset: TransferSubsetKind,
    pub prompt_lang: LanguageTag,
    pub response_lang: LanguageTag,
    pub source_record_id: String,
    pub answer_origin: AnswerOrigin,
}

/// One sentence pair from an external parallel corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Which side of a record a finding or rejection refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordField {
    Question,
    Answer,
}

impl core::fmt::Display for RecordField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            RecordField::Question => "question",
            RecordField::Answer => "answer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorpusFinding {
    DuplicateId { id: String, occurrences: u64 },
    EmptyField { id: String, field: RecordField },
    UnknownLanguage { id: String, field: RecordField, code: String },
}

impl core::fmt::Display for CorpusFinding {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CorpusFinding::DuplicateId { id, occurrences } => {
                write!(f, "id {id:?} appears {occurrences} times")
            }
            CorpusFinding::EmptyField { id, field } => {
                write!(f, "record {id:?} has an empty {field}")
            }
            CorpusFinding::UnknownLanguage { id, field, code } => {
                write!(f, "record {id:?} {field} language {code:?} is not in the registry")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<CorpusFinding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Structural checks over a parsed corpus: duplicate ids, empty fields,
/// unregistered language tags. Findings are data, not failures.
pub fn validate_corpus(records: &[InstructionRecord]) -> ValidationReport {
    let mut findings = Vec::new();

    let mut ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    let mut i = 0;
    while i < ids.len() {
        let mut j = i + 1;
        while j < ids.len() && ids[j] == ids[i] {
            j += 1;
        }
        if j - i > 1 {
            findings.push(CorpusFinding::DuplicateId {
                id: String::from(ids[i]),
                occurrences: (j - i) as u64,
            });
        }
        i = j;
    }

    for record in records {
        if record.question.trim().is_empty() {
            findings.push(CorpusFinding::EmptyField {
                id: record.id.clone(),
                field: RecordField::Question,
            });
        }
        if record.answer.trim().is_empty() {
            findings.push(CorpusFinding::EmptyField {
                id: record.id.clone(),
                field: RecordField::Answer,
            });
        }
        for (field, tag) in [
            (RecordField::Question, record.question_lang),
            (RecordField::Answer, record.answer_lang),
        ] {
            if !lang::is_registered(tag) {
                findings.push(CorpusFinding::UnknownLanguage {
                    id: record.id.clone(),
                    field,
                    code: String::from(tag.as_str()),
                });
            }
        }
    }

    ValidationReport { findings }
}

/// Stable id for records loaded from files that carry none.
pub fn assigned_id(file_stem: &str, line_number: usize) -> String {
    format!("{file_stem}-{line_number:06}")
}
