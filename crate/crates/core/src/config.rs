//! Run configuration shared by every pipeline stage.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::lang::{self, LanguageTag};
use crate::template::InstructionTemplate;

/// Service endpoints; `None` means unconfigured (mock mode or env vars).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BackendEndpoints {
    #[serde(default)]
    pub generation: Option<String>,
    #[serde(default)]
    pub translation: Option<String>,
    #[serde(default)]
    pub quality: Option<String>,
}

/// Algorithmic knobs for a pipeline run. Everything that influences output
/// bytes lives here; IO concerns (paths, workers, caching) stay with the
/// caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub source_lang: LanguageTag,
    pub target_lang: LanguageTag,
    /// Translations scoring below this are rejected; exactly the threshold passes.
    #[serde(default = "default_qe_threshold")]
    pub qe_threshold: f64,
    /// Per-token replacement probability for code-switching.
    #[serde(default = "default_switch_prob")]
    pub switch_prob: f64,
    /// Probability of choosing the model-generated answer over ground truth
    /// when building the transfer set. 0 reproduces plain ground-truth data.
    #[serde(default = "default_gen_answer_prob")]
    pub gen_answer_prob: f64,
    /// Accepted candidate/source character-length ratio range.
    #[serde(default = "default_length_ratio_bounds")]
    pub length_ratio_bounds: (f64, f64),
    #[serde(default = "default_beam_width")]
    pub beam_width: u32,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// Wrapper applied to questions before response collection;
    /// `{QUESTION}` is replaced by the question text.
    #[serde(default = "default_gen_prompt_template")]
    pub gen_prompt_template: String,
    #[serde(default)]
    pub templates: InstructionTemplate,
    #[serde(default)]
    pub endpoints: BackendEndpoints,
}

fn default_qe_threshold() -> f64 {
    0.8
}

fn default_switch_prob() -> f64 {
    0.15
}

fn default_gen_answer_prob() -> f64 {
    0.5
}

fn default_length_ratio_bounds() -> (f64, f64) {
    (1.0 / 3.0, 3.0)
}

fn default_beam_width() -> u32 {
    4
}

fn default_max_tokens() -> u32 {
    512
}

fn default_gen_prompt_template() -> String {
    String::from("{QUESTION}")
}

impl RunConfig {
    pub fn new(seed: u64, source_lang: LanguageTag, target_lang: LanguageTag) -> Self {
        Self {
            seed,
            source_lang,
            target_lang,
            qe_threshold: default_qe_threshold(),
            switch_prob: default_switch_prob(),
            gen_answer_prob: default_gen_answer_prob(),
            length_ratio_bounds: default_length_ratio_bounds(),
            beam_width: default_beam_width(),
            temperature: 0.0,
            max_tokens: default_max_tokens(),
            gen_prompt_template: default_gen_prompt_template(),
            templates: InstructionTemplate::default(),
            endpoints: BackendEndpoints::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("qe_threshold", self.qe_threshold),
            ("switch_prob", self.switch_prob),
            ("gen_answer_prob", self.gen_answer_prob),
        ] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(ConfigError::OutOfRange { name, value });
            }
        }
        let (lo, hi) = self.length_ratio_bounds;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(ConfigError::BadLengthBounds { lo, hi });
        }
        if self.beam_width == 0 {
            return Err(ConfigError::ZeroBeamWidth);
        }
        for tag in [self.source_lang, self.target_lang] {
            if !lang::is_registered(tag) {
                return Err(ConfigError::UnknownLanguage(String::from(tag.as_str())));
            }
        }
        if self.source_lang == self.target_lang {
            return Err(ConfigError::SameLanguagePair(String::from(self.source_lang.as_str())));
        }
        if self.gen_prompt_template.matches("{QUESTION}").count() != 1 {
            return Err(ConfigError::BadGenPromptTemplate);
        }
        self.templates.validate().map_err(ConfigError::Template)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("length ratio bounds ({lo}, {hi}) must satisfy 0 < lo < hi")]
    BadLengthBounds { lo: f64, hi: f64 },
    #[error("beam_width must be at least 1")]
    ZeroBeamWidth,
    #[error("language {0:?} is not in the registry")]
    UnknownLanguage(String),
    #[error("source and target language are both {0:?}")]
    SameLanguagePair(String),
    #[error("gen_prompt_template must contain {{QUESTION}} exactly once")]
    BadGenPromptTemplate,
    #[error(transparent)]
    Template(crate::template::TemplateError),
}
