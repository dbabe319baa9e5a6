//! Deterministic biased judge used as a test oracle for the detectors.
//!
//! Every output is a pure function of (sample, config, profile,
//! sample_index). Per attribute the generator always draws one normal
//! and one uniform variate, whether or not the profile uses them, so
//! profiles differing in one coefficient see aligned random streams.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::prompt::{gpa_label, CotMode, JudgeConfig};
use crate::scale::{format_value, RatingScale, ScaleKind, VALUE_EPS};
use crate::types::EvaluationSample;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasProfile {
    /// Coupling of the latent score to the expert mean.
    pub quality_weight: f64,
    /// Rating penalty per unit of summary log-perplexity; >= 0.
    pub familiarity_coeff: f64,
    /// Probability of snapping to the nearest multiple of 5 on scales of
    /// width >= 50.
    pub round_snap_prob: f64,
    /// Convex pull of each attribute toward the previous attribute's
    /// emitted score; 0 is independent, 1 copies the previous score.
    pub anchor_coeff: f64,
    /// Noise scale; the effective standard deviation is
    /// noise_sd * config.temperature.
    pub noise_sd: f64,
    pub seed: u64,
}

impl BiasProfile {
    /// Quality-only judge: no familiarity penalty, snapping, anchoring,
    /// or noise.
    pub fn neutral(seed: u64) -> Self {
        BiasProfile {
            quality_weight: 1.0,
            familiarity_coeff: 0.0,
            round_snap_prob: 0.0,
            anchor_coeff: 0.0,
            noise_sd: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |field: &'static str| Err(SynthError::InvalidProfile { field });
        if !self.quality_weight.is_finite() {
            return bad("quality_weight");
        }
        if !(self.familiarity_coeff.is_finite() && self.familiarity_coeff >= 0.0) {
            return bad("familiarity_coeff");
        }
        if !(0.0..=1.0).contains(&self.round_snap_prob) {
            return bad("round_snap_prob");
        }
        if !(0.0..=1.0).contains(&self.anchor_coeff) {
            return bad("anchor_coeff");
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return bad("noise_sd");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthError {
    InvalidProfile { field: &'static str },
    MissingExpertScore { sample_id: String, dimension: String },
    MissingPerplexity { sample_id: String },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidProfile { field } => {
                write!(f, "bias profile field {field} is out of range")
            }
            SynthError::MissingExpertScore { sample_id, dimension } => {
                write!(f, "sample {sample_id} has no expert scores for {dimension}")
            }
            SynthError::MissingPerplexity { sample_id } => {
                write!(
                    f,
                    "sample {sample_id} has no summary perplexity but familiarity_coeff > 0"
                )
            }
        }
    }
}

impl core::error::Error for SynthError {}

const SNAP_MIN_WIDTH: f64 = 50.0;

/// Emits judge text in the surface format the prompt for `config`
/// requests. Attribute i's latent score starts from
/// quality_weight * expert_mean - familiarity_coeff * ln(perplexity)
/// plus gaussian noise, then is pulled anchor_coeff of the way toward
/// attribute i-1's emitted (post-rounding) value.
pub fn synth_judge(
    sample: &EvaluationSample,
    config: &JudgeConfig,
    profile: &BiasProfile,
    sample_index: u32,
) -> Result<String, SynthError> {
    profile.validate()?;

    let ln_ppl = if profile.familiarity_coeff > 0.0 {
        match sample.summary_perplexity {
            Some(p) => p.ln(),
            None => {
                return Err(SynthError::MissingPerplexity { sample_id: sample.sample_id.clone() })
            }
        }
    } else {
        0.0
    };

    let mut rng = ChaCha8Rng::seed_from_u64(request_seed(
        profile.seed,
        &sample.sample_id,
        sample_index,
    ));
    let effective_sd = profile.noise_sd * config.temperature;

    let mut emitted: Vec<(String, f64)> = Vec::with_capacity(config.attributes.len());
    let mut prev: Option<f64> = None;
    for dim in &config.attributes {
        let em = sample.expert_mean(&dim.name).ok_or_else(|| {
            SynthError::MissingExpertScore {
                sample_id: sample.sample_id.clone(),
                dimension: dim.name.clone(),
            }
        })?;
        let z: f64 = rng.sample(StandardNormal);
        let u: f64 = rng.random();

        let base =
            profile.quality_weight * em - profile.familiarity_coeff * ln_ppl + z * effective_sd;
        let latent = match prev {
            Some(p) => (1.0 - profile.anchor_coeff) * base + profile.anchor_coeff * p,
            None => base,
        };
        let mut value = config.scale.nearest(latent);
        if config.scale.width() >= SNAP_MIN_WIDTH && u < profile.round_snap_prob {
            let snapped = ((value / 5.0).round() * 5.0).clamp(config.scale.min, config.scale.max);
            value = config.scale.nearest(snapped);
        }
        prev = Some(value);
        emitted.push((dim.name.clone(), value));
    }

    Ok(render_surface(&emitted, config))
}

/// splitmix64 chain over the seed, the sample id, and the draw index.
fn request_seed(profile_seed: u64, sample_id: &str, sample_index: u32) -> u64 {
    let mut s = mix(profile_seed);
    s = mix(s ^ fnv1a64(sample_id.as_bytes()));
    mix(s ^ u64::from(sample_index))
}

fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

fn render_surface(emitted: &[(String, f64)], config: &JudgeConfig) -> String {
    let single = emitted.len() == 1;
    match (config.cot, single) {
        (CotMode::Off, true) => surface_value(emitted[0].1, &config.scale),
        (CotMode::RateExplain, true) => {
            format!("{} - synthetic rationale.", surface_value(emitted[0].1, &config.scale))
        }
        (CotMode::ExplainRate, true) => {
            format!("Synthetic rationale.\nScore: {}", surface_value(emitted[0].1, &config.scale))
        }
        (CotMode::Off, false) => {
            let lines: Vec<String> = emitted
                .iter()
                .map(|(name, v)| format!("{name}: {}", surface_value(*v, &config.scale)))
                .collect();
            lines.join("\n")
        }
        (CotMode::RateExplain, false) => {
            let lines: Vec<String> = emitted
                .iter()
                .map(|(name, v)| {
                    format!("{name}: {} - synthetic rationale.", surface_value(*v, &config.scale))
                })
                .collect();
            lines.join("\n")
        }
        (CotMode::ExplainRate, false) => {
            let mut lines: Vec<String> = Vec::with_capacity(emitted.len() + 1);
            lines.push(String::from("Synthetic rationale."));
            for (name, v) in emitted {
                lines.push(format!("{name} Score: {}", surface_value(*v, &config.scale)));
            }
            lines.join("\n")
        }
    }
}

fn surface_value(v: f64, scale: &RatingScale) -> String {
    match scale.kind {
        ScaleKind::IntegerRange => format_value(v),
        ScaleKind::WordModifier => word_label(v),
        ScaleKind::FloatModifier => gpa_label(v),
        ScaleKind::ContinuousUnit => format!("{v:.2}"),
    }
}

/// Inverse of map_word_modifier for values on a word-modifier grid.
fn word_label(v: f64) -> String {
    let base = v.round();
    let offset = v - base;
    if (offset - 0.33).abs() <= VALUE_EPS {
        format!("strong {}", format_value(base))
    } else if (offset + 0.33).abs() <= VALUE_EPS {
        format!("weak {}", format_value(base))
    } else {
        format_value(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Dimension;
    use alloc::borrow::ToOwned;
    use alloc::string::ToString;
    use alloc::vec;

    fn sample_with(em: f64, ppl: Option<f64>) -> EvaluationSample {
        let mut expert_scores = alloc::collections::BTreeMap::new();
        expert_scores.insert("Coherence".to_owned(), vec![em]);
        expert_scores.insert("Fluency".to_owned(), vec![em]);
        EvaluationSample {
            sample_id: "s1".to_owned(),
            document: "doc".to_owned(),
            summary: "sum".to_owned(),
            system_id: "sys".to_owned(),
            expert_scores,
            summary_perplexity: ppl,
            document_perplexity: None,
        }
    }

    fn coherence() -> Dimension {
        Dimension::new("Coherence", "structure and flow", "ordering")
    }

    fn ten_point_config() -> JudgeConfig {
        JudgeConfig::new(RatingScale::integer_range(1, 10), vec![coherence()])
    }

    #[test]
    fn quality_weight_two_doubles_the_expert_mean() {
        let profile = BiasProfile { quality_weight: 2.0, ..BiasProfile::neutral(1) };
        for em in [1.0, 2.5, 4.0] {
            let sample = sample_with(em, None);
            let text = synth_judge(&sample, &ten_point_config(), &profile, 0).unwrap();
            assert_eq!(text, format_value((2.0 * em).round()));
        }
    }

    #[test]
    fn output_is_reproducible_and_index_sensitive() {
        let profile = BiasProfile { noise_sd: 1.0, ..BiasProfile::neutral(7) };
        let mut config = ten_point_config();
        config.temperature = 1.0;
        let sample = sample_with(3.0, None);
        let a = synth_judge(&sample, &config, &profile, 0).unwrap();
        let b = synth_judge(&sample, &config, &profile, 0).unwrap();
        assert_eq!(a, b);
        let draws: Vec<String> = (0..30)
            .map(|i| synth_judge(&sample, &config, &profile, i).unwrap())
            .collect();
        assert!(draws.iter().any(|d| d != &draws[0]));
    }

    #[test]
    fn higher_perplexity_never_raises_the_score() {
        let profile = BiasProfile { familiarity_coeff: 1.0, ..BiasProfile::neutral(3) };
        let config = JudgeConfig::new(
            RatingScale::integer_range(1, 100),
            vec![coherence()],
        );
        let mut prev_score = f64::INFINITY;
        for ppl in [2.0, 8.0, 32.0, 128.0] {
            let sample = sample_with(3.0, Some(ppl));
            let text = synth_judge(&sample, &config, &profile, 0).unwrap();
            let score: f64 = text.parse().unwrap();
            assert!(score <= prev_score);
            prev_score = score;
        }
    }

    #[test]
    fn certain_snap_lands_on_multiples_of_five() {
        let profile = BiasProfile {
            quality_weight: 13.0,
            round_snap_prob: 1.0,
            noise_sd: 2.0,
            ..BiasProfile::neutral(11)
        };
        let mut config = JudgeConfig::new(
            RatingScale::integer_range(1, 100),
            vec![coherence()],
        );
        config.temperature = 1.0;
        for i in 0..50 {
            let sample = sample_with(4.0, None);
            let text = synth_judge(&sample, &config, &profile, i).unwrap();
            let score: f64 = text.parse().unwrap();
            assert_eq!(score % 5.0, 0.0, "got {score}");
        }
    }

    #[test]
    fn narrow_scales_never_snap() {
        let profile = BiasProfile { round_snap_prob: 1.0, ..BiasProfile::neutral(5) };
        let sample = sample_with(3.0, None);
        let text = synth_judge(&sample, &ten_point_config(), &profile, 0).unwrap();
        assert_eq!(text, "3");
    }

    #[test]
    fn full_anchor_copies_the_previous_attribute() {
        let profile = BiasProfile {
            quality_weight: 2.0,
            anchor_coeff: 1.0,
            ..BiasProfile::neutral(9)
        };
        let mut sample = sample_with(4.0, None);
        sample.expert_scores.insert("Fluency".to_owned(), vec![1.0]);
        let config = JudgeConfig::new(
            RatingScale::integer_range(1, 10),
            vec![coherence(), Dimension::new("Fluency", "grammar", "phrasing")],
        );
        let text = synth_judge(&sample, &config, &profile, 0).unwrap();
        assert_eq!(text, "Coherence: 8\nFluency: 8");
    }

    #[test]
    fn surface_formats_follow_cot_mode() {
        let profile = BiasProfile::neutral(2);
        let sample = sample_with(4.0, None);
        let mut config = ten_point_config();
        assert_eq!(synth_judge(&sample, &config, &profile, 0).unwrap(), "4");
        config = config.with_cot(CotMode::RateExplain);
        assert_eq!(
            synth_judge(&sample, &config, &profile, 0).unwrap(),
            "4 - synthetic rationale."
        );
        config = config.with_cot(CotMode::ExplainRate);
        assert_eq!(
            synth_judge(&sample, &config, &profile, 0).unwrap(),
            "Synthetic rationale.\nScore: 4"
        );
    }

    #[test]
    fn word_modifier_surface_uses_labels() {
        let profile = BiasProfile::neutral(4);
        let mut sample = sample_with(0.0, None);
        sample.expert_scores.insert("Coherence".to_owned(), vec![4.33]);
        let config = JudgeConfig::new(
            RatingScale::word_modifier(1, 5),
            vec![coherence()],
        );
        assert_eq!(synth_judge(&sample, &config, &profile, 0).unwrap(), "strong 4");
    }

    #[test]
    fn missing_perplexity_is_an_error_only_when_needed() {
        let sample = sample_with(3.0, None);
        let biased = BiasProfile { familiarity_coeff: 0.5, ..BiasProfile::neutral(1) };
        let err = synth_judge(&sample, &ten_point_config(), &biased, 0).unwrap_err();
        assert_eq!(err, SynthError::MissingPerplexity { sample_id: "s1".to_string() });
        assert!(synth_judge(&sample, &ten_point_config(), &BiasProfile::neutral(1), 0).is_ok());
    }

    #[test]
    fn missing_expert_scores_are_an_error() {
        let mut sample = sample_with(3.0, None);
        sample.expert_scores.clear();
        let err = synth_judge(&sample, &ten_point_config(), &BiasProfile::neutral(1), 0)
            .unwrap_err();
        assert!(matches!(err, SynthError::MissingExpertScore { .. }));
    }

    #[test]
    fn invalid_profile_is_rejected() {
        let profile = BiasProfile { anchor_coeff: 1.5, ..BiasProfile::neutral(1) };
        let err =
            synth_judge(&sample_with(3.0, None), &ten_point_config(), &profile, 0).unwrap_err();
        assert_eq!(err, SynthError::InvalidProfile { field: "anchor_coeff" });
    }
}
