//! Token-level code-switching: each prompt token found in a bilingual
//! dictionary is replaced by a dictionary counterpart with probability p.
//! Responses are never touched.

use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::dict::{BilingualDictionary, DictionaryPair};
use crate::lang::LanguageTag;
use crate::record::TrainingExample;
use crate::rng::{self, Stage};
use crate::transfer::TransferSubsets;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSwitchReport {
    pub tokens_total: u64,
    /// Tokens whose case-folded form is a dictionary key.
    pub tokens_eligible: u64,
    pub tokens_replaced: u64,
}

impl CodeSwitchReport {
    pub fn merge(&mut self, other: &CodeSwitchReport) {
        self.tokens_total += other.tokens_total;
        self.tokens_eligible += other.tokens_eligible;
        self.tokens_replaced += other.tokens_replaced;
    }

    pub fn replacement_rate(&self) -> f64 {
        if self.tokens_eligible == 0 {
            0.0
        } else {
            self.tokens_replaced as f64 / self.tokens_eligible as f64
        }
    }
}

/// Replace eligible tokens 1-for-1 with probability `p`, drawing from the
/// provided stream. Tokens are UAX #29 word segments; whitespace and
/// punctuation pass through untouched, so detokenization is exact.
/// Non-eligible tokens consume no randomness; a uniform pick over the entry
/// list is drawn only for replacements with more than one candidate.
pub fn code_switch(
    text: &str,
    dict: &BilingualDictionary,
    p: f64,
    rng: &mut impl RngCore,
) -> (String, CodeSwitchReport) {
    let mut report = CodeSwitchReport::default();
    let mut out = String::with_capacity(text.len());
    for segment in text.split_word_bounds() {
        let is_word = segment.chars().any(char::is_alphanumeric);
        if !is_word {
            out.push_str(segment);
            continue;
        }
        report.tokens_total += 1;
        match dict.lookup(segment) {
            None => out.push_str(segment),
            Some(candidates) => {
                report.tokens_eligible += 1;
                if rng::bernoulli(rng, p) {
                    report.tokens_replaced += 1;
                    let pick = if candidates.len() > 1 {
                        rng::uniform_index(rng, candidates.len())
                    } else {
                        0
                    };
                    out.push_str(&candidates[pick]);
                } else {
                    out.push_str(segment);
                }
            }
        }
    }
    (out, report)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SwitchError {
    #[error("no dictionary translates from {0}")]
    MissingDictionary(LanguageTag),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchSummary {
    pub report: CodeSwitchReport,
    /// Examples whose prompt changed.
    pub modified_examples: u64,
}

/// Code-switch the prompts of all four transfer subsets. The dictionary is
/// chosen by the prompt's language: source-language prompts switch toward
/// the target language and translated prompts switch back toward the
/// source. Responses are returned byte-identical.
pub fn apply_code_switching(
    subsets: &TransferSubsets,
    dicts: &DictionaryPair,
    switch_prob: f64,
    seed: u64,
) -> Result<(TransferSubsets, SwitchSummary), SwitchError> {
    let mut summary = SwitchSummary::default();
    let mut switch_all = |examples: &[TrainingExample]| -> Result<Vec<TrainingExample>, SwitchError> {
        examples
            .iter()
            .map(|example| {
                let dict = dicts
                    .for_prompt_lang(example.prompt_lang)
                    .ok_or(SwitchError::MissingDictionary(example.prompt_lang))?;
                let mut rng = rng::derive_rng(seed, &example.id, Stage::CodeSwitch);
                let (prompt, report) = code_switch(&example.prompt, dict, switch_prob, &mut rng);
                summary.report.merge(&report);
                let mut switched = example.clone();
                if prompt != switched.prompt {
                    summary.modified_examples += 1;
                    switched.prompt = prompt;
                }
                Ok(switched)
            })
            .collect()
    };
    let result = TransferSubsets {
        ll: switch_all(&subsets.ll)?,
        tl: switch_all(&subsets.tl)?,
        lt: switch_all(&subsets.lt)?,
        tt: switch_all(&subsets.tt)?,
    };
    Ok((result, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    use crate::record::{AnswerOrigin, TransferSubsetKind};

    fn tag(code: &str) -> LanguageTag {
        LanguageTag::new(code).unwrap()
    }

    fn dict() -> BilingualDictionary {
        BilingualDictionary::from_pairs(tag("eng"), tag("ind"), [
            ("good", "baik"),
            ("morning", "pagi"),
            ("cat", "kucing"),
        ])
    }

    fn rng() -> impl RngCore {
        rng::derive_rng(1, "t", Stage::CodeSwitch)
    }

    #[test]
    fn p_zero_is_identity() {
        let text = "Good morning, cat! 123";
        let (out, report) = code_switch(text, &dict(), 0.0, &mut rng());
        assert_eq!(out, text);
        assert_eq!(report.tokens_replaced, 0);
        assert_eq!(report.tokens_eligible, 3);
        assert_eq!(report.tokens_total, 4);
    }

    #[test]
    fn p_one_replaces_every_eligible_token() {
        let (out, report) = code_switch("Good morning, cat!", &dict(), 1.0, &mut rng());
        assert_eq!(out, "baik pagi, kucing!");
        assert_eq!(report.tokens_replaced, report.tokens_eligible);
        assert_eq!(report.tokens_replaced, 3);
    }

    #[test]
    fn whitespace_and_punctuation_are_preserved() {
        let text = "good\t morning...  cat";
        let (out, _) = code_switch(text, &dict(), 1.0, &mut rng());
        assert_eq!(out, "baik\t pagi...  kucing");
    }

    #[test]
    fn token_count_is_preserved() {
        let text = "the good cat greets the morning sun";
        let (out, _) = code_switch(text, &dict(), 1.0, &mut rng());
        assert_eq!(
            out.unicode_words().count(),
            text.unicode_words().count()
        );
    }

    #[test]
    fn ineligible_tokens_consume_no_randomness() {
        // Same stream position for the eligible token whether or not
        // ineligible tokens precede it: outputs agree on the decision.
        let mut a = rng();
        let mut b = rng();
        let (out_a, _) = code_switch("cat", &dict(), 0.5, &mut a);
        let (out_b, _) = code_switch("zzz qqq cat", &dict(), 0.5, &mut b);
        assert_eq!(out_b.ends_with("kucing"), out_a == "kucing");
    }

    #[test]
    fn multi_candidate_entries_use_uniform_pick() {
        let mut d = BilingualDictionary::new(tag("eng"), tag("ind"));
        d.insert("water", "air");
        d.insert("water", "banyu");
        let mut seen_air = false;
        let mut seen_banyu = false;
        for i in 0..64 {
            let mut r = rng::derive_rng(i, "w", Stage::CodeSwitch);
            let (out, _) = code_switch("water", &d, 1.0, &mut r);
            seen_air |= out == "air";
            seen_banyu |= out == "banyu";
        }
        assert!(seen_air && seen_banyu);
    }

    fn example(id: &str, prompt_lang: &str) -> TrainingExample {
        TrainingExample {
            id: id.to_string(),
            prompt: "good morning cat".to_string(),
            response: "the response stays".to_string(),
            subset: TransferSubsetKind::SourceSource,
            prompt_lang: tag(prompt_lang),
            response_lang: tag("eng"),
            source_record_id: "r1".to_string(),
            answer_origin: AnswerOrigin::GroundTruth,
        }
    }

    #[test]
    fn responses_are_never_modified() {
        let subsets = TransferSubsets {
            ll: vec![example("r1-LL", "eng")],
            tl: vec![example("r1-TL", "ind")],
            lt: vec![example("r1-LT", "eng")],
            tt: vec![example("r1-TT", "ind")],
        };
        let dicts = DictionaryPair {
            source_to_target: dict(),
            target_to_source: BilingualDictionary::from_pairs(tag("ind"), tag("eng"), [
                ("good", "well"),
            ]),
        };
        let (switched, _) = apply_code_switching(&subsets, &dicts, 1.0, 9).unwrap();
        for (before, after) in [
            (&subsets.ll, &switched.ll),
            (&subsets.tl, &switched.tl),
            (&subsets.lt, &switched.lt),
            (&subsets.tt, &switched.tt),
        ] {
            assert_eq!(before[0].response, after[0].response);
        }
        // Source-language prompts switched with the src→tgt dictionary.
        assert_eq!(switched.ll[0].prompt, "baik pagi kucing");
        // Translated prompts switched back toward the source language.
        assert_eq!(switched.tl[0].prompt, "well morning cat");
    }

    #[test]
    fn empty_dictionaries_change_nothing() {
        let subsets = TransferSubsets {
            ll: vec![example("r1-LL", "eng")],
            tl: vec![],
            lt: vec![],
            tt: vec![],
        };
        let dicts = DictionaryPair::empty(tag("eng"), tag("ind"));
        let (switched, summary) = apply_code_switching(&subsets, &dicts, 0.15, 9).unwrap();
        assert_eq!(switched.ll, subsets.ll);
        assert_eq!(
            summary.report,
            CodeSwitchReport {
                tokens_total: 3,
                tokens_eligible: 0,
                tokens_replaced: 0
            }
        );
        assert_eq!(summary.modified_examples, 0);
    }

    #[test]
    fn unknown_prompt_language_is_missing_dictionary() {
        let mut ex = example("r1-LL", "fra");
        ex.prompt_lang = tag("fra");
        let subsets = TransferSubsets {
            ll: vec![ex],
            tl: vec![],
            lt: vec![],
            tt: vec![],
        };
        let dicts = DictionaryPair::empty(tag("eng"), tag("ind"));
        assert!(matches!(
            apply_code_switching(&subsets, &dicts, 0.15, 9),
            Err(SwitchError::MissingDictionary(_))
        ));
    }
}
