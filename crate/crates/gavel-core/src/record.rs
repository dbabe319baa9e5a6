//! Raw generation records and the fingerprint that keys the replay cache.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub request_fingerprint: String,
    pub model_id: String,
    pub sample_index: u32,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_logprobs: Option<Vec<(String, f64)>>,
    /// Seconds since the epoch; synthetic backends use 0.
    pub created_at: u64,
}

/// Hex sha256 over the request tuple. Fields are joined with an ASCII
/// unit separator so no field boundary can be forged by content.
pub fn request_fingerprint(
    system_text: &str,
    user_text: &str,
    model_id: &str,
    temperature: f64,
    max_tokens: u32,
    sample_index: u32,
) -> String {
    let mut hasher = Sha256::new();
    hasher.update(system_text.as_bytes());
    hasher.update([0x1F]);
    hasher.update(user_text.as_bytes());
    hasher.update([0x1F]);
    hasher.update(model_id.as_bytes());
    hasher.update([0x1F]);
    hasher.update(alloc::format!("{temperature:?}").as_bytes());
    hasher.update([0x1F]);
    hasher.update(alloc::format!("{max_tokens}").as_bytes());
    hasher.update([0x1F]);
    hasher.update(alloc::format!("{sample_index}").as_bytes());
    hex::encode(hasher.finalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordError {
    EmptyLogprobs,
    NonFiniteLogprob { index: usize },
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordError::EmptyLogprobs => write!(f, "no token log-probabilities given"),
            RecordError::NonFiniteLogprob { index } => {
                write!(f, "log-probability at index {index} is not finite")
            }
        }
    }
}

impl core::error::Error for RecordError {}

/// exp(-mean token log-probability).
pub fn perplexity_from_logprobs(logprobs: &[f64]) -> Result<f64, RecordError> {
    if logprobs.is_empty() {
        return Err(RecordError::EmptyLogprobs);
    }
    for (index, &lp) in logprobs.iter().enumerate() {
        if !lp.is_finite() {
            return Err(RecordError::NonFiniteLogprob { index });
        }
    }
    let mean = crate::stats::stable_sum(logprobs.iter().copied()) / logprobs.len() as f64;
    Ok((-mean).exp())
}
