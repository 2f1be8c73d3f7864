//! Language tags and the static language registry.

use alloc::string::String;

/// ISO 639-3 language code, always three lowercase ASCII letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageTag([u8; 3]);

impl LanguageTag {
    pub fn new(code: &str) -> Result<Self, InvalidLanguageTag> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(|b| b.is_ascii_lowercase()) {
            return Err(InvalidLanguageTag(String::from(code)));
        }
        Ok(Self([bytes[0], bytes[1], bytes[2]]))
    }

    pub fn as_str(&self) -> &str {
        core::str::from_utf8(&self.0).expect("tag bytes are ascii")
    }
}

impl core::fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid language tag {0:?}: expected three lowercase ASCII letters")]
pub struct InvalidLanguageTag(pub String);

impl serde::Serialize for LanguageTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for LanguageTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = <&str>::deserialize(deserializer)?;
        LanguageTag::new(code).map_err(serde::de::Error::custom)
    }
}

/// Languages the bundled templates and profiles know about, with the English
/// display names used when rendering instruction templates.
pub const REGISTRY: &[(&str, &str)] = &[
    ("bul", "Bulgarian"),
    ("ces", "Czech"),
    ("dan", "Danish"),
    ("eng", "English"),
    ("fin", "Finnish"),
    ("fra", "French"),
    ("hun", "Hungarian"),
    ("ind", "Indonesian"),
    ("jpn", "Japanese"),
    ("khm", "Khmer"),
    ("kor", "Korean"),
    ("nob", "Norwegian"),
    ("pol", "Polish"),
    ("por", "Portuguese"),
    ("slv", "Slovenian"),
    ("tha", "Thai"),
    ("ukr", "Ukrainian"),
    ("vie", "Vietnamese"),
];

/// English display name for a registered language, `None` for unknown codes.
pub fn display_name(tag: LanguageTag) -> Option<&'static str> {
    REGISTRY
        .binary_search_by(|(code, _)| code.cmp(&tag.as_str()))
        .ok()
        .map(|i| REGISTRY[i].1)
}

pub fn is_registered(tag: LanguageTag) -> bool {
    display_name(tag).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_three_lowercase_letters() {
        assert_eq!(LanguageTag::new("eng").unwrap().as_str(), "eng");
    }

    #[test]
    fn rejects_malformed_codes() {
        for bad in ["EN", "english", "e n", "en1", ""] {
            assert!(LanguageTag::new(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn registry_is_sorted_and_resolves() {
        let mut codes: alloc::vec::Vec<_> = REGISTRY.iter().map(|(c, _)| *c).collect();
        codes.sort_unstable();
        assert_eq!(codes, REGISTRY.iter().map(|(c, _)| *c).collect::<alloc::vec::Vec<_>>());

        let eng = LanguageTag::new("eng").unwrap();
        assert_eq!(display_name(eng), Some("English"));
        assert!(!is_registered(LanguageTag::new("zzz").unwrap()));
    }
}
