//! Prompt rendering under a judge configuration, and parsing of raw judge
//! output back into scores.
//!
//! Templates are plain text with double-brace slots. Lines mentioning
//! {{metric}}, {{metric_definition}}, or {{aspects}} are repeated once per
//! configured attribute ({{index}} carries the 1-based position); when the
//! source document is excluded, any paragraph block containing {{article}}
//! is dropped whole.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::scale::{
    format_value, map_word_modifier, round2, Modifier, RatingScale, ScaleError, ScaleKind,
};
use crate::types::{Dimension, EvaluationSample};

/// Non-CoT generations parse from the first tokens; 20 is enough.
pub const NON_COT_MAX_TOKENS: u32 = 20;
/// CoT generations need room for the rationale.
pub const COT_MAX_TOKENS: u32 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CotMode {
    Off,
    /// Rating first, rationale after. Cheap: generation can stop once the
    /// rating has parsed.
    RateExplain,
    /// Rationale first, rating on a trailing "Score:" line.
    ExplainRate,
}

impl CotMode {
    pub fn default_max_tokens(self) -> u32 {
        match self {
            CotMode::Off => NON_COT_MAX_TOKENS,
            _ => COT_MAX_TOKENS,
        }
    }
}

/// Full specification of one judge run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JudgeConfig {
    pub scale: RatingScale,
    pub cot: CotMode,
    /// Attributes scored in a single generation, in this order.
    pub attributes: Vec<Dimension>,
    pub include_source: bool,
    pub temperature: f64,
    pub n_samples: u32,
    pub max_output_tokens: u32,
}

impl JudgeConfig {
    pub fn new(scale: RatingScale, attributes: Vec<Dimension>) -> Self {
        JudgeConfig {
            scale,
            cot: CotMode::Off,
            attributes,
            include_source: true,
            temperature: 0.0,
            n_samples: 1,
            max_output_tokens: CotMode::Off.default_max_tokens(),
        }
    }

    pub fn with_cot(mut self, cot: CotMode) -> Self {
        self.cot = cot;
        self.max_output_tokens = cot.default_max_tokens();
        self
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        self.scale.validate()?;
        if self.attributes.is_empty() {
            return Err(PromptError::EmptyAttributes);
        }
        for (i, attr) in self.attributes.iter().enumerate() {
            if attr.name.is_empty() {
                return Err(PromptError::EmptyAttributeName);
            }
            if self.attributes[..i].iter().any(|a| a.name == attr.name) {
                return Err(PromptError::DuplicateAttribute { name: attr.name.clone() });
            }
        }
        if self.n_samples == 0 {
            return Err(PromptError::InvalidSampleCount);
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(PromptError::InvalidTemperature { value: self.temperature });
        }
        if self.max_output_tokens == 0 {
            return Err(PromptError::InvalidMaxTokens);
        }
        Ok(())
    }
}

/// System/user template pair. The compiled-in defaults mirror the files
/// under `templates/`; callers may load modified copies from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct PromptTemplates {
    pub system: String,
    pub user: String,
}

impl PromptTemplates {
    /// Generalized evaluator prompt (any scale, any attribute list).
    pub fn generic() -> Self {
        PromptTemplates {
            system: include_str!("../templates/system.txt").to_string(),
            user: include_str!("../templates/user.txt").to_string(),
        }
    }

    /// The recommended ACU Salience evaluator, verbatim.
    pub fn recipe() -> Self {
        PromptTemplates {
            system: include_str!("../templates/recipe_system.txt").to_string(),
            user: include_str!("../templates/recipe_user.txt").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptPair {
    pub system_text: String,
    pub user_text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseStatus {
    Ok,
    Failed,
}

/// Scores recovered from one generation. `per_attribute` is empty unless
/// `parse_status` is `Ok`; parse failures never abort a batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsedScore {
    pub per_attribute: Vec<(String, f64)>,
    pub raw_text: String,
    pub parse_status: ParseStatus,
}

impl ParsedScore {
    fn failed(raw: &str) -> Self {
        ParsedScore {
            per_attribute: Vec::new(),
            raw_text: raw.to_string(),
            parse_status: ParseStatus::Failed,
        }
    }

    pub fn value(&self, attribute: &str) -> Option<f64> {
        self.per_attribute
            .iter()
            .find(|(name, _)| name == attribute)
            .map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PromptError {
    Scale(ScaleError),
    EmptyAttributes,
    EmptyAttributeName,
    DuplicateAttribute { name: String },
    InvalidSampleCount,
    InvalidTemperature { value: f64 },
    InvalidMaxTokens,
    EmptySummary { sample_id: String },
    EmptyTemplate { which: &'static str },
    UnsubstitutedSlot { slot: String },
}

impl fmt::Display for PromptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptError::Scale(e) => write!(f, "invalid scale: {e}"),
            PromptError::EmptyAttributes => write!(f, "judge config has no attributes"),
            PromptError::EmptyAttributeName => write!(f, "attribute with empty name"),
            PromptError::DuplicateAttribute { name } => {
                write!(f, "attribute {name:?} listed more than once")
            }
            PromptError::InvalidSampleCount => write!(f, "n_samples must be >= 1"),
            PromptError::InvalidTemperature { value } => {
                write!(f, "temperature must be finite and >= 0, got {value}")
            }
            PromptError::InvalidMaxTokens => write!(f, "max_output_tokens must be >= 1"),
            PromptError::EmptySummary { sample_id } => {
                write!(f, "sample {sample_id:?} has an empty summary")
            }
            PromptError::EmptyTemplate { which } => write!(f, "{which} template is empty"),
            PromptError::UnsubstitutedSlot { slot } => {
                write!(f, "template slot {{{{{slot}}}}} was not substituted")
            }
        }
    }
}

impl core::error::Error for PromptError {}

impl From<ScaleError> for PromptError {
    fn from(e: ScaleError) -> Self {
        PromptError::Scale(e)
    }
}

fn scale_noun(scale: &RatingScale) -> String {
    let lo = format_value(scale.min);
    let hi = format_value(scale.max);
    match scale.kind {
        ScaleKind::IntegerRange => alloc::format!("integer {lo}-{hi} score"),
        ScaleKind::WordModifier => alloc::format!(
            "{lo}-{hi} score, optionally refined with the 'strong' or 'weak' modifier before \
             the integer (e.g. 'strong 4'; strong adds 0.33, weak subtracts 0.33)"
        ),
        ScaleKind::FloatModifier => {
            let examples: Vec<String> = scale
                .value_set
                .iter()
                .take(4)
                .map(|&v| gpa_label(v))
                .collect();
            alloc::format!(
                "score on the GPA-like scale from {lo} to {hi} (values such as {}, ...)",
                examples.join(", ")
            )
        }
        ScaleKind::ContinuousUnit => alloc::format!("score as a decimal between {lo} and {hi}"),
    }
}

/// GPA surface form: integers keep one decimal ("3.0"), grid points keep two.
pub fn gpa_label(v: f64) -> String {
    if (v - v.round()).abs() < crate::scale::VALUE_EPS {
        alloc::format!("{:.1}", v)
    } else {
        alloc::format!("{v:.2}")
    }
}

fn response_instruction(config: &JudgeConfig) -> String {
    let noun = scale_noun(&config.scale);
    let multi = config.attributes.len() > 1;
    match (config.cot, multi) {
        (CotMode::Off, false) => alloc::format!("Respond with only your {noun}."),
        (CotMode::Off, true) => alloc::format!(
            "Respond with only your {noun} for each quality, one per line in the order listed."
        ),
        (CotMode::RateExplain, false) => {
            alloc::format!("Respond with your {noun} first, then a rationale.")
        }
        (CotMode::RateExplain, true) => alloc::format!(
            "Respond with your {noun} for each quality first, one per line in the order \
             listed, then a rationale."
        ),
        (CotMode::ExplainRate, false) => alloc::format!(
            "Explain your evaluation first, then end with a final line of the form \
             'Score: <score>' giving your {noun}."
        ),
        (CotMode::ExplainRate, true) => alloc::format!(
            "Explain your evaluation first, then end with one final line per quality of the \
             form '<quality> Score: <score>' giving your {noun}."
        ),
    }
}

fn evaluation_form(cot: CotMode) -> &'static str {
    match cot {
        CotMode::Off => "Evaluation Form (Scores ONLY):",
        CotMode::RateExplain => "Evaluation Form (scores first, then rationale):",
        CotMode::ExplainRate => "Evaluation Form (rationale first, then final score lines):",
    }
}

fn expand_attribute_lines(template: &str, attributes: &[Dimension]) -> String {
    let mut lines: Vec<String> = Vec::new();
    for line in template.split('\n') {
        let expandable = line.contains("{{metric}}")
            || line.contains("{{metric_definition}}")
            || line.contains("{{aspects}}");
        if expandable {
            for (i, attr) in attributes.iter().enumerate() {
                lines.push(
                    line.replace("{{index}}", itoa(i + 1).as_str())
                        .replace("{{metric}}", &attr.name)
                        .replace("{{metric_definition}}", &attr.definition)
                        .replace("{{aspects}}", &attr.aspects),
                );
            }
        } else {
            lines.push(line.to_string());
        }
    }
    lines.join("\n")
}

fn itoa(n: usize) -> String {
    alloc::format!("{n}")
}

fn drop_article_blocks(text: &str) -> String {
    let blocks: Vec<&str> = text
        .split("\n\n")
        .filter(|block| !block.contains("{{article}}"))
        .collect();
    blocks.join("\n\n")
}

fn check_no_residual_slots(text: &str) -> Result<(), PromptError> {
    if let Some(open) = text.find("{{") {
        let rest = &text[open + 2..];
        let slot = match rest.find("}}") {
            Some(close) => rest[..close].to_string(),
            None => rest.chars().take(24).collect(),
        };
        return Err(PromptError::UnsubstitutedSlot { slot });
    }
    Ok(())
}

fn render_one(
    template: &str,
    which: &'static str,
    config: &JudgeConfig,
    sample: &EvaluationSample,
) -> Result<String, PromptError> {
    if template.trim().is_empty() {
        return Err(PromptError::EmptyTemplate { which });
    }
    let mut text = expand_attribute_lines(template, &config.attributes);
    if !config.include_source {
        text = drop_article_blocks(&text);
    }
    let quality_phrase = if config.attributes.len() == 1 {
        "one important quality:".to_string()
    } else {
        alloc::format!("these {} important qualities:", config.attributes.len())
    };
    text = text
        .replace("{{article}}", &sample.document)
        .replace("{{summary}}", &sample.summary)
        .replace("{{scale_min}}", &format_value(config.scale.min))
        .replace("{{scale_max}}", &format_value(config.scale.max))
        .replace("{{quality_phrase}}", &quality_phrase)
        .replace("{{response_instruction}}", &response_instruction(config))
        .replace("{{evaluation_form}}", evaluation_form(config.cot));
    check_no_residual_slots(&text)?;
    Ok(text)
}

pub fn render_prompt(
    config: &JudgeConfig,
    sample: &EvaluationSample,
    templates: &PromptTemplates,
) -> Result<PromptPair, PromptError> {
    config.validate()?;
    if sample.summary.is_empty() {
        return Err(PromptError::EmptySummary { sample_id: sample.sample_id.clone() });
    }
    Ok(PromptPair {
        system_text: render_one(&templates.system, "system", config, sample)?,
        user_text: render_one(&templates.user, "user", config, sample)?,
    })
}

// Numeric token scanning. Digits are ASCII, so byte offsets are safe
// slice boundaries even in non-ASCII text.

#[derive(Clone, Copy, Debug)]
struct NumToken {
    start: usize,
    end: usize,
    value: f64,
}

/// First maximal digit run at or after `from`.
fn scan_integer(text: &str, from: usize) -> Option<NumToken> {
    let bytes = text.as_bytes();
    let mut i = from;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value: f64 = text[start..i].parse::<i64>().ok()? as f64;
            return Some(NumToken { start, end: i, value });
        }
        i += 1;
    }
    None
}

/// First maximal decimal run (digits, optional fraction) at or after `from`.
fn scan_decimal(text: &str, from: usize) -> Option<NumToken> {
    let bytes = text.as_bytes();
    let mut i = from;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let value: f64 = text[start..i].parse().ok()?;
            return Some(NumToken { start, end: i, value });
        }
        i += 1;
    }
    None
}

/// Word immediately before a token, skipping whitespace and punctuation:
/// "strong"/"weak" (any case) become modifiers.
fn preceding_modifier(text: &str, token_start: usize) -> Modifier {
    let bytes = text.as_bytes();
    let mut i = token_start;
    while i > 0 && !bytes[i - 1].is_ascii_alphanumeric() {
        i -= 1;
    }
    let end = i;
    while i > 0 && bytes[i - 1].is_ascii_alphabetic() {
        i -= 1;
    }
    let word = &text[i..end];
    if word.eq_ignore_ascii_case("strong") {
        Modifier::Strong
    } else if word.eq_ignore_ascii_case("weak") {
        Modifier::Weak
    } else {
        Modifier::None
    }
}

/// Parse one value for `scale` at or after `from`. Returns the legal value
/// and the end offset of the consumed token.
fn parse_value_at(text: &str, from: usize, scale: &RatingScale) -> Option<(f64, usize)> {
    match scale.kind {
        ScaleKind::IntegerRange => {
            let tok = scan_integer(text, from)?;
            scale.contains(tok.value).then_some((tok.value, tok.end))
        }
        ScaleKind::WordModifier => {
            let tok = scan_integer(text, from)?;
            let modifier = preceding_modifier(text, tok.start);
            let base = tok.value as i64;
            let value =
                map_word_modifier(base, modifier, scale.min as i64, scale.max as i64).ok()?;
            scale.contains(value).then_some((value, tok.end))
        }
        ScaleKind::FloatModifier => {
            let tok = scan_decimal(text, from)?;
            let value = round2(tok.value);
            scale.contains(value).then_some((value, tok.end))
        }
        ScaleKind::ContinuousUnit => {
            let tok = scan_decimal(text, from)?;
            scale.contains(tok.value).then_some((tok.value, tok.end))
        }
    }
}

/// Byte offset of `needle` in `haystack` at or after `from`, ASCII
/// case-insensitive.
fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    if from > haystack.len() {
        return None;
    }
    let hay = haystack[from..].to_ascii_lowercase();
    let needle = needle.to_ascii_lowercase();
    hay.find(&needle).map(|i| from + i)
}

/// Parse raw judge output into per-attribute scores under `config`.
/// Failures are encoded in `parse_status`, never returned as errors, so
/// batch runs keep going.
pub fn parse_score(raw: &str, config: &JudgeConfig) -> ParsedScore {
    if config.validate().is_err() {
        return ParsedScore::failed(raw);
    }
    let scale = &config.scale;
    let mut per_attribute = Vec::with_capacity(config.attributes.len());

    if config.attributes.len() == 1 {
        let name = config.attributes[0].name.clone();
        let parsed = if config.cot == CotMode::ExplainRate {
            // The rating is on the last "Score:" line.
            let mut at = None;
            let mut from = 0;
            while let Some(pos) = find_ci(raw, "score:", from) {
                at = Some(pos + "score:".len());
                from = pos + 1;
            }
            at.and_then(|pos| parse_value_at(raw, pos, scale))
        } else {
            parse_value_at(raw, 0, scale)
        };
        match parsed {
            Some((value, _)) => per_attribute.push((name, value)),
            None => return ParsedScore::failed(raw),
        }
    } else {
        // Multi-attribute generations name each quality; scan names in
        // declared order, taking the first legal value after each.
        let mut cursor = 0;
        for attr in &config.attributes {
            let Some(name_at) = find_ci(raw, &attr.name, cursor) else {
                return ParsedScore::failed(raw);
            };
            let after_name = name_at + attr.name.len();
            let Some((value, end)) = parse_value_at(raw, after_name, scale) else {
                return ParsedScore::failed(raw);
            };
            per_attribute.push((attr.name.clone(), value));
            cursor = end;
        }
    }

    ParsedScore {
        per_attribute,
        raw_text: raw.to_string(),
        parse_status: ParseStatus::Ok,
    }
}
