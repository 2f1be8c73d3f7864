//! Transfer-set construction and translation gating.
//!
//! Response collection builds a model-generated twin of the input corpus;
//! sampling mixes the two answer sources with a per-record coin; translation
//! runs each field through a gate chain (length ratio, copy, language
//! identification, quality estimation) and only gated-through translations
//! reach the cross-lingual subsets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::{
    check_generation_result, BackendError, GenerationBackend, GenerationRequest, QeBackend,
    QeRequest, TranslationBackend, TranslationRequest,
};
use crate::config::RunConfig;
use crate::lang::LanguageTag;
use crate::lid::{self, LanguageProfile, LidError};
use crate::record::{tags, AnswerOrigin, InstructionRecord, RecordField, TrainingExample, TransferSubsetKind};
use crate::rng::{self, Stage};

/// Why a candidate translation was rejected, in gate order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RejectionReason {
    /// Candidate/source character-length ratio outside the configured bounds.
    LengthRatio,
    /// Candidate is a case-folded copy of the source.
    CopyDetected,
    /// Language identification disagrees with the target language.
    OffTargetLanguage,
    /// Quality score strictly below the threshold.
    QeBelowThreshold,
    /// The translation or scoring backend failed.
    BackendFailure,
}

impl RejectionReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectionReason::LengthRatio => "length_ratio",
            RejectionReason::CopyDetected => "copy_detected",
            RejectionReason::OffTargetLanguage => "off_target_language",
            RejectionReason::QeBelowThreshold => "qe_below_threshold",
            RejectionReason::BackendFailure => "backend_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub field: RecordField,
    pub reason: RejectionReason,
}

/// A translation that passed every gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedTranslation {
    pub text: String,
    pub qe_score: f64,
    /// Identified language; `None` when the text was too short to classify.
    pub detected_lang: Option<LanguageTag>,
}

/// One transfer-set record with its translation outcomes. A present
/// translation implies every gate passed; every absent one has a rejection
/// explaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub base: InstructionRecord,
    pub question_mt: Option<AcceptedTranslation>,
    pub answer_mt: Option<AcceptedTranslation>,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransferError {
    #[error("generated corpus contains id {0:?} absent from the base corpus")]
    MisalignedCorpora(String),
    #[error("record {0:?} does not carry a ground-truth answer")]
    NotGroundTruth(String),
    #[error(transparent)]
    Lid(LidError),
}

/// Collect a model response for one record. Failures and refusals keep the
/// ground-truth answer and tag the record so downstream stages skip it.
pub fn generate_response(
    record: &InstructionRecord,
    backend: &dyn GenerationBackend,
    cfg: &RunConfig,
) -> Result<InstructionRecord, TransferError> {
    if record.answer_origin != AnswerOrigin::GroundTruth {
        return Err(TransferError::NotGroundTruth(record.id.clone()));
    }
    let request = GenerationRequest {
        prompt: cfg.gen_prompt_template.replace("{QUESTION}", &record.question),
        lang: cfg.source_lang,
        max_tokens: cfg.max_tokens,
        temperature: cfg.temperature,
    };
    let outcome = backend
        .generate(&request)
        .and_then(|result| check_generation_result(&result).map(|()| result));
    Ok(match outcome {
        Ok(result) if !result.refusal => {
            let mut generated = record.with_tag(tags::MODEL_GENERATED);
            generated.answer = String::from(result.text.trim_end());
            generated.answer_origin = AnswerOrigin::ModelGenerated;
            generated
        }
        _ => record.with_tag(tags::GENERATION_FAILED),
    })
}

/// Build the model-generated twin corpus: same ids and questions, answers
/// replaced by backend responses where generation succeeded.
pub fn collect_responses(
    corpus: &[InstructionRecord],
    backend: &dyn GenerationBackend,
    cfg: &RunConfig,
) -> Result<Vec<InstructionRecord>, TransferError> {
    corpus
        .iter()
        .map(|record| generate_response(record, backend, cfg))
        .collect()
}

/// Mix ground-truth and generated answers with one fair (by default) coin
/// per record, drawn from the record's own stream. Ids missing from the
/// usable generated set fall back to ground truth. Output preserves the
/// base corpus order and size.
pub fn sample_transfer_set(
    base: &[InstructionRecord],
    generated: &[InstructionRecord],
    cfg: &RunConfig,
) -> Result<Vec<InstructionRecord>, TransferError> {
    let base_ids: BTreeMap<&str, ()> = base.iter().map(|r| (r.id.as_str(), ())).collect();
    for record in generated {
        if !base_ids.contains_key(record.id.as_str()) {
            return Err(TransferError::MisalignedCorpora(record.id.clone()));
        }
    }
    let usable: BTreeMap<&str, &InstructionRecord> = generated
        .iter()
        .filter(|r| r.answer_origin == AnswerOrigin::ModelGenerated && !r.has_tag(tags::GENERATION_FAILED))
        .map(|r| (r.id.as_str(), r))
        .collect();

    Ok(base
        .iter()
        .map(|record| match usable.get(record.id.as_str()) {
            Some(generated) => {
                let mut rng = rng::derive_rng(cfg.seed, &record.id, Stage::Sample);
                if rng::bernoulli(&mut rng, cfg.gen_answer_prob) {
                    (*generated).clone()
                } else {
                    record.clone()
                }
            }
            None => record.with_tag(tags::GROUND_TRUTH_FALLBACK),
        })
        .collect())
}

fn gate_candidate(
    source: &str,
    outcome: Result<String, BackendError>,
    qe: &dyn QeBackend,
    profiles: &[LanguageProfile],
    cfg: &RunConfig,
) -> Result<AcceptedTranslation, RejectionReason> {
    let candidate = outcome.map_err(|_| RejectionReason::BackendFailure)?;

    let (lo, hi) = cfg.length_ratio_bounds;
    let ratio = candidate.chars().count() as f64 / source.chars().count() as f64;
    if ratio < lo || ratio > hi {
        return Err(RejectionReason::LengthRatio);
    }

    if candidate.to_lowercase() == source.to_lowercase() {
        return Err(RejectionReason::CopyDetected);
    }

    // Only a definite label mismatch rejects; too-short texts pass through
    // to quality estimation.
    let detected_lang = match lid::classify(&candidate, profiles) {
        Ok(result) => {
            if result.lang != cfg.target_lang {
                return Err(RejectionReason::OffTargetLanguage);
            }
            Some(result.lang)
        }
        Err(LidError::Indeterminate { .. }) => None,
        Err(_) => return Err(RejectionReason::BackendFailure),
    };

    let score = qe
        .score_quality(&QeRequest {
            source: String::from(source),
            candidate: candidate.clone(),
            from: cfg.source_lang,
            to: cfg.target_lang,
        })
        .map_err(|_| RejectionReason::BackendFailure)?;
    // Scores below the threshold are rejected; exactly the threshold passes.
    if score.0 < cfg.qe_threshold {
        return Err(RejectionReason::QeBelowThreshold);
    }

    Ok(AcceptedTranslation {
        text: candidate,
        qe_score: score.0,
        detected_lang,
    })
}

/// Translate both fields of a record and gate each candidate independently.
/// Backend errors become rejections; the record itself always comes back.
pub fn translate_transfer_record(
    base: &InstructionRecord,
    mt: &dyn TranslationBackend,
    qe: &dyn QeBackend,
    profiles: &[LanguageProfile],
    cfg: &RunConfig,
) -> TransferRecord {
    let mut record = TransferRecord {
        base: base.clone(),
        question_mt: None,
        answer_mt: None,
        rejections: Vec::new(),
    };
    for (field, source) in [
        (RecordField::Question, &base.question),
        (RecordField::Answer, &base.answer),
    ] {
        let outcome = mt
            .translate(&TranslationRequest {
                text: source.clone(),
                from: cfg.source_lang,
                to: cfg.target_lang,
                beam_width: cfg.beam_width,
            })
            .map(|result| result.text);
        match gate_candidate(source, outcome, qe, profiles, cfg) {
            Ok(accepted) => match field {
                RecordField::Question => record.question_mt = Some(accepted),
                RecordField::Answer => record.answer_mt = Some(accepted),
            },
            Err(reason) => record.rejections.push(Rejection { field, reason }),
        }
    }
    record
}

/// Translate a whole transfer set sequentially. Callers that parallelize
/// map [`translate_transfer_record`] per record instead; the result is
/// identical because records are independent.
pub fn translate_transfer_set(
    bases: &[InstructionRecord],
    mt: &dyn TranslationBackend,
    qe: &dyn QeBackend,
    profiles: &[LanguageProfile],
    cfg: &RunConfig,
) -> Vec<TransferRecord> {
    bases
        .iter()
        .map(|base| translate_transfer_record(base, mt, qe, profiles, cfg))
        .collect()
}

/// The four transfer subsets, before the parallel-corpus subsets join them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransferSubsets {
    pub ll: Vec<TrainingExample>,
    pub tl: Vec<TrainingExample>,
    pub lt: Vec<TrainingExample>,
    pub tt: Vec<TrainingExample>,
}

impl TransferSubsets {
    pub fn counts(&self) -> [(TransferSubsetKind, usize); 4] {
        [
            (TransferSubsetKind::SourceSource, self.ll.len()),
            (TransferSubsetKind::TargetSource, self.tl.len()),
            (TransferSubsetKind::SourceTarget, self.lt.len()),
            (TransferSubsetKind::TargetTarget, self.tt.len()),
        ]
    }
}

fn example_for(
    record: &TransferRecord,
    kind: TransferSubsetKind,
    prompt: &str,
    response: &str,
    source: LanguageTag,
    target: LanguageTag,
) -> TrainingExample {
    let (prompt_lang, response_lang) = kind
        .transfer_langs(source, target)
        .expect("transfer subset kind");
    TrainingExample {
        id: alloc::format!("{}-{}", record.base.id, kind.as_str()),
        prompt: String::from(prompt),
        response: String::from(response),
        subset: kind,
        prompt_lang,
        response_lang,
        source_record_id: record.base.id.clone(),
        answer_origin: record.base.answer_origin,
    }
}

/// Fan each record out into the subsets its accepted translations allow:
/// every record reaches LL; TL needs the question translation; LT the
/// answer translation; TT both.
pub fn build_subsets(records: &[TransferRecord], cfg: &RunConfig) -> TransferSubsets {
    let (src, tgt) = (cfg.source_lang, cfg.target_lang);
    let mut subsets = TransferSubsets::default();
    for record in records {
        let question = &record.base.question;
        let answer = &record.base.answer;
        subsets.ll.push(example_for(
            record,
            TransferSubsetKind::SourceSource,
            question,
            answer,
            src,
            tgt,
        ));
        if let Some(question_mt) = &record.question_mt {
            subsets.tl.push(example_for(
                record,
                TransferSubsetKind::TargetSource,
                &question_mt.text,
                answer,
                src,
                tgt,
            ));
        }
        if let Some(answer_mt) = &record.answer_mt {
            subsets.lt.push(example_for(
                record,
                TransferSubsetKind::SourceTarget,
                question,
                &answer_mt.text,
                src,
                tgt,
            ));
        }
        if let (Some(question_mt), Some(answer_mt)) = (&record.question_mt, &record.answer_mt) {
            subsets.tt.push(example_for(
                record,
                TransferSubsetKind::TargetTarget,
                &question_mt.text,
                &answer_mt.text,
                src,
                tgt,
            ));
        }
    }
    subsets
}
