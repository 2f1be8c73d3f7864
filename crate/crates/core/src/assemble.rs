//! Deterministic corpus assembly: canonical ordering, JSONL rendering, and
//! the manifest that lets a trainer reproduce per-subset normalization.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::record::{TrainingExample, TransferSubsetKind};
use crate::switch::SwitchSummary;
use crate::template::PairFilterStats;
use crate::transfer::{RejectionReason, TransferSubsets};

/// Per-subset example counts; the normalizers of the training objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetCounts {
    #[serde(rename = "LL")]
    pub ll: u64,
    #[serde(rename = "TL")]
    pub tl: u64,
    #[serde(rename = "LT")]
    pub lt: u64,
    #[serde(rename = "TT")]
    pub tt: u64,
    #[serde(rename = "MT")]
    pub mt: u64,
    #[serde(rename = "COMP")]
    pub comp: u64,
}

impl SubsetCounts {
    pub fn get(&self, kind: TransferSubsetKind) -> u64 {
        match kind {
            TransferSubsetKind::SourceSource => self.ll,
            TransferSubsetKind::TargetSource => self.tl,
            TransferSubsetKind::SourceTarget => self.lt,
            TransferSubsetKind::TargetTarget => self.tt,
            TransferSubsetKind::Translation => self.mt,
            TransferSubsetKind::Completion => self.comp,
        }
    }

    pub fn total(&self) -> u64 {
        self.ll + self.tl + self.lt + self.tt + self.mt + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionHistogram {
    pub length_ratio: u64,
    pub copy_detected: u64,
    pub off_target_language: u64,
    pub qe_below_threshold: u64,
    pub backend_failure: u64,
}

impl RejectionHistogram {
    pub fn add(&mut self, reason: RejectionReason) {
        match reason {
            RejectionReason::LengthRatio => self.length_ratio += 1,
            RejectionReason::CopyDetected => self.copy_detected += 1,
            RejectionReason::OffTargetLanguage => self.off_target_language += 1,
            RejectionReason::QeBelowThreshold => self.qe_below_threshold += 1,
            RejectionReason::BackendFailure => self.backend_failure += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.length_ratio
            + self.copy_detected
            + self.off_target_language
            + self.qe_below_threshold
            + self.backend_failure
    }
}

/// Gate outcomes for one translated field across the whole run.
/// `accepted + rejections.total() == attempted` always.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldGateStats {
    pub attempted: u64,
    pub accepted: u64,
    pub rejections: RejectionHistogram,
}

impl FieldGateStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSummary {
    pub question: FieldGateStats,
    pub answer: FieldGateStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipSummary {
    /// Records whose response generation failed or was refused.
    pub generation_failures: u64,
    /// Target sentences with fewer than two words.
    pub comp_too_short: u64,
    /// Parallel pairs dropped by the noise filters.
    pub pairs_filtered: u64,
}

/// Everything a re-run needs and everything downstream tooling checks.
/// Deliberately free of wall-clock data so identical runs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub counts: SubsetCounts,
    pub config: RunConfig,
    pub corpus_sha256: String,
    pub mock_backends: bool,
    pub gates: GateSummary,
    pub code_switch: SwitchSummary,
    pub skips: SkipSummary,
    pub pair_filters: PairFilterStats,
}

/// An assembled corpus: canonical order, rendered bytes, content hash.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledCorpus {
    pub examples: Vec<TrainingExample>,
    pub jsonl: String,
    pub counts: SubsetCounts,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Render one example per line; the byte-exact inverse of line-wise JSON
/// parsing.
pub fn corpus_to_jsonl(examples: &[TrainingExample]) -> String {
    let mut out = String::new();
    for example in examples {
        out.push_str(&serde_json::to_string(example).expect("training examples serialize"));
        out.push('\n');
    }
    out
}

/// Canonical order: subsets in LL, TL, LT, TT, MT, COMP order; within a
/// subset by (source record id, example id).
pub fn assemble_corpus(
    subsets: &TransferSubsets,
    mt: &[TrainingExample],
    comp: &[TrainingExample],
) -> AssembledCorpus {
    let mut examples = Vec::with_capacity(
        subsets.ll.len() + subsets.tl.len() + subsets.lt.len() + subsets.tt.len() + mt.len() + comp.len(),
    );
    for section in [&subsets.ll, &subsets.tl, &subsets.lt, &subsets.tt] {
        let mut section = section.clone();
        section.sort_by(|a, b| (&a.source_record_id, &a.id).cmp(&(&b.source_record_id, &b.id)));
        examples.extend(section);
    }
    for section in [mt, comp] {
        let mut section = section.to_vec();
        section.sort_by(|a, b| (&a.source_record_id, &a.id).cmp(&(&b.source_record_id, &b.id)));
        examples.extend(section);
    }
    let counts = SubsetCounts {
        ll: subsets.ll.len() as u64,
        tl: subsets.tl.len() as u64,
        lt: subsets.lt.len() as u64,
        tt: subsets.tt.len() as u64,
        mt: mt.len() as u64,
        comp: comp.len() as u64,
    };
    let jsonl = corpus_to_jsonl(&examples);
    let sha256 = sha256_hex(jsonl.as_bytes());
    AssembledCorpus {
        examples,
        jsonl,
        counts,
        sha256,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    use crate::lang::LanguageTag;
    use crate::record::AnswerOrigin;

    fn example(id: &str, source: &str, kind: TransferSubsetKind) -> TrainingExample {
        TrainingExample {
            id: id.to_string(),
            prompt: "prompt".to_string(),
            response: "response".to_string(),
            subset: kind,
            prompt_lang: LanguageTag::new("eng").unwrap(),
            response_lang: LanguageTag::new("eng").unwrap(),
            source_record_id: source.to_string(),
            answer_origin: AnswerOrigin::GroundTruth,
        }
    }

    #[test]
    fn ordering_is_by_subset_then_source_id() {
        let subsets = TransferSubsets {
            ll: vec![
                example("r2-LL", "r2", TransferSubsetKind::SourceSource),
                example("r1-LL", "r1", TransferSubsetKind::SourceSource),
            ],
            tl: vec![example("r1-TL", "r1", TransferSubsetKind::TargetSource)],
            lt: vec![],
            tt: vec![],
        };
        let mt = [
            example("p1-MT-rev", "p1", TransferSubsetKind::Translation),
            example("p1-MT-fwd", "p1", TransferSubsetKind::Translation),
        ];
        let assembled = assemble_corpus(&subsets, &mt, &[]);
        let ids: Vec<_> = assembled.examples.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["r1-LL", "r2-LL", "r1-TL", "p1-MT-fwd", "p1-MT-rev"]);
        assert_eq!(assembled.counts.ll, 2);
        assert_eq!(assembled.counts.mt, 2);
        assert_eq!(assembled.counts.comp, 0);
    }

    #[test]
    fn assembly_is_deterministic() {
        let subsets = TransferSubsets {
            ll: vec![example("r1-LL", "r1", TransferSubsetKind::SourceSource)],
            tl: vec![],
            lt: vec![],
            tt: vec![],
        };
        let a = assemble_corpus(&subsets, &[], &[]);
        let b = assemble_corpus(&subsets, &[], &[]);
        assert_eq!(a.jsonl, b.jsonl);
        assert_eq!(a.sha256, b.sha256);
        assert_eq!(a.sha256, sha256_hex(a.jsonl.as_bytes()));
    }

    #[test]
    fn manifest_counts_survive_json() {
        let counts = SubsetCounts {
            ll: 4,
            tl: 3,
            lt: 2,
            tt: 1,
            mt: 6,
            comp: 5,
        };
        let json = serde_json::to_string(&counts).unwrap();
        assert_eq!(json, r#"{"LL":4,"TL":3,"LT":2,"TT":1,"MT":6,"COMP":5}"#);
        let back: SubsetCounts = serde_json::from_str(&json).unwrap();
        assert_eq!(back, counts);
    }

    #[test]
    fn histogram_reconciles() {
        let mut stats = FieldGateStats::default();
        stats.attempted = 3;
        stats.accepted = 1;
        stats.rejections.add(RejectionReason::CopyDetected);
        stats.rejections.add(RejectionReason::QeBelowThreshold);
        assert_eq!(stats.accepted + stats.rejections.total(), stats.attempted);
        assert!((stats.acceptance_rate() - 1.0 / 3.0).abs() < 1e-12);
    }
}
