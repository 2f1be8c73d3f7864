//! Directed word-level lexicons for code-switching.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::lang::LanguageTag;

/// Directed bilingual dictionary. Keys are case-folded; a word never maps
/// to itself; every entry list is non-empty. Both sides must be single
/// word tokens so replacement stays 1-for-1 at token positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilingualDictionary {
    from: LanguageTag,
    to: LanguageTag,
    entries: BTreeMap<String, Vec<String>>,
}

/// What happened to one (source, target) pair offered to the dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictInsert {
    Added,
    /// Source equals target after case folding; dropped.
    SelfMapping,
    /// The pair was already present; dropped.
    Duplicate,
    /// One side is not a single word token; dropped.
    NotSingleWord,
}

fn is_single_word(text: &str) -> bool {
    let mut segments = text.split_word_bounds();
    matches!(segments.next(), Some(seg) if seg.chars().any(char::is_alphanumeric))
        && segments.next().is_none()
}

impl BilingualDictionary {
    pub fn new(from: LanguageTag, to: LanguageTag) -> Self {
        Self {
            from,
            to,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_pairs<'a>(
        from: LanguageTag,
        to: LanguageTag,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        let mut dict = Self::new(from, to);
        for (word, translation) in pairs {
            dict.insert(word, translation);
        }
        dict
    }

    pub fn insert(&mut self, word: &str, translation: &str) -> DictInsert {
        if !is_single_word(word) || !is_single_word(translation) {
            return DictInsert::NotSingleWord;
        }
        let key = word.to_lowercase();
        if key == translation.to_lowercase() {
            return DictInsert::SelfMapping;
        }
        let entry = self.entries.entry(key).or_default();
        if entry.iter().any(|t| t == translation) {
            return DictInsert::Duplicate;
        }
        entry.push(String::from(translation));
        DictInsert::Added
    }

    /// Candidate translations for a token; lookup is case-folded.
    pub fn lookup(&self, token: &str) -> Option<&[String]> {
        self.entries.get(&token.to_lowercase()).map(Vec::as_slice)
    }

    pub fn from_lang(&self) -> LanguageTag {
        self.from
    }

    pub fn to_lang(&self) -> LanguageTag {
        self.to
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The two directions code-switching needs: source→target for prompts still
/// in the source language, target→source for translated prompts.
#[derive(Debug, Clone)]
pub struct DictionaryPair {
    pub source_to_target: BilingualDictionary,
    pub target_to_source: BilingualDictionary,
}

impl DictionaryPair {
    /// Empty dictionaries in both directions: code-switching becomes a no-op.
    pub fn empty(source: LanguageTag, target: LanguageTag) -> Self {
        Self {
            source_to_target: BilingualDictionary::new(source, target),
            target_to_source: BilingualDictionary::new(target, source),
        }
    }

    pub fn for_prompt_lang(&self, lang: LanguageTag) -> Option<&BilingualDictionary> {
        if lang == self.source_to_target.from_lang() {
            Some(&self.source_to_target)
        } else if lang == self.target_to_source.from_lang() {
            Some(&self.target_to_source)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags() -> (LanguageTag, LanguageTag) {
        (LanguageTag::new("eng").unwrap(), LanguageTag::new("ind").unwrap())
    }

    #[test]
    fn keys_are_case_folded() {
        let (eng, ind) = tags();
        let mut dict = BilingualDictionary::new(eng, ind);
        assert_eq!(dict.insert("Good", "baik"), DictInsert::Added);
        assert_eq!(dict.lookup("GOOD").unwrap(), ["baik"]);
    }

    #[test]
    fn self_mappings_are_dropped() {
        let (eng, ind) = tags();
        let mut dict = BilingualDictionary::new(eng, ind);
        assert_eq!(dict.insert("taxi", "Taxi"), DictInsert::SelfMapping);
        assert!(dict.lookup("taxi").is_none());
    }

    #[test]
    fn repeated_pairs_accumulate_in_order() {
        let (eng, ind) = tags();
        let dict = BilingualDictionary::from_pairs(eng, ind, [
            ("water", "air"),
            ("water", "banyu"),
            ("water", "air"),
        ]);
        assert_eq!(dict.lookup("water").unwrap(), ["air", "banyu"]);
    }

    #[test]
    fn multi_word_sides_are_dropped() {
        let (eng, ind) = tags();
        let mut dict = BilingualDictionary::new(eng, ind);
        assert_eq!(dict.insert("train", "kereta api"), DictInsert::NotSingleWord);
        assert_eq!(dict.insert("ice cream", "es"), DictInsert::NotSingleWord);
        assert_eq!(dict.insert("don't", "jangan"), DictInsert::Added);
        assert!(dict.lookup("don't").is_some());
    }

    #[test]
    fn direction_selection_by_prompt_lang() {
        let (eng, ind) = tags();
        let pair = DictionaryPair::empty(eng, ind);
        assert_eq!(pair.for_prompt_lang(eng).unwrap().from_lang(), eng);
        assert_eq!(pair.for_prompt_lang(ind).unwrap().from_lang(), ind);
        assert!(pair.for_prompt_lang(LanguageTag::new("fra").unwrap()).is_none());
    }
}
