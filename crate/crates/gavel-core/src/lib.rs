//! Core building blocks for auditing LLM judges: rating scales, dataset
//! types, prompt rendering and score parsing, agreement/correlation
//! statistics, and a synthetic biased judge used as a test oracle.
//!
//! The crate is `no_std`-compatible (with `alloc`); IO, backends, and the
//! CLI live in the companion `gavel` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod granularity;
pub mod prompt;
pub mod record;
pub mod scale;
pub mod stats;
pub mod synth;
pub mod types;

pub use granularity::effective_granularity;
pub use prompt::{
    parse_score, render_prompt, CotMode, JudgeConfig, ParseStatus, ParsedScore, PromptPair,
    PromptTemplates,
};
pub use record::{perplexity_from_logprobs, request_fingerprint, GenerationRecord};
pub use scale::{gpa_value_set, map_word_modifier, Modifier, RatingScale, ScaleKind};
pub use synth::{synth_judge, BiasProfile};
pub use types::{Dataset, Dimension, EvaluationSample};
