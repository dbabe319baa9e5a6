//! Score distribution summaries and coarse-grained rebinning.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::scale::{RatingScale, VALUE_EPS};

use super::StatsError;

/// Round-number mass is only meaningful on wide scales; narrower ones
/// have every value close to a multiple of five.
const ROUND_MASS_MIN_WIDTH: f64 = 50.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreHistogram {
    /// (value, relative frequency), ascending by value. Finite scales
    /// list every legal value, including zero-frequency ones.
    pub frequencies: Vec<(f64, f64)>,
    /// Total frequency on multiples of 5; None when the scale is too
    /// narrow for the statistic to discriminate.
    pub round_number_mass: Option<f64>,
}

pub fn score_histogram(
    scores: &[f64],
    scale: &RatingScale,
) -> Result<ScoreHistogram, StatsError> {
    scale.validate().map_err(|_| StatsError::DegenerateData)?;
    for &s in scores {
        if !s.is_finite() {
            return Err(StatsError::NonFiniteValue);
        }
        if !scale.contains(s) {
            return Err(StatsError::OutOfRange { value: s });
        }
    }

    let mut frequencies: Vec<(f64, f64)> = if scale.is_finite_kind() {
        scale.value_set.iter().map(|&v| (v, 0.0)).collect()
    } else {
        let mut distinct: Vec<f64> = scores.to_vec();
        distinct.sort_unstable_by(f64::total_cmp);
        distinct.dedup_by(|a, b| (*a - *b).abs() <= VALUE_EPS);
        distinct.into_iter().map(|v| (v, 0.0)).collect()
    };

    if !scores.is_empty() {
        let weight = 1.0 / scores.len() as f64;
        for &s in scores {
            let slot = frequencies
                .iter_mut()
                .find(|(v, _)| (v - s).abs() <= VALUE_EPS)
                .expect("score verified against scale");
            slot.1 += weight;
        }
    }

    let round_number_mass = if scale.width() >= ROUND_MASS_MIN_WIDTH {
        let mass = super::stable_sum(
            frequencies
                .iter()
                .filter(|(v, _)| is_multiple_of_five(*v))
                .map(|(_, f)| *f),
        );
        Some(mass)
    } else {
        None
    };

    Ok(ScoreHistogram { frequencies, round_number_mass })
}

fn is_multiple_of_five(v: f64) -> bool {
    (v / 5.0 - (v / 5.0).round()).abs() <= VALUE_EPS
}

/// Maps `value` from a finite scale onto `1..=n_bins` equal-width bins
/// over [min, max]. The last bin is closed on the right.
pub fn bin_scale(value: f64, from: &RatingScale, n_bins: u32) -> Result<u32, StatsError> {
    if n_bins == 0 {
        return Err(StatsError::BadBinCount);
    }
    from.validate().map_err(|_| StatsError::DegenerateData)?;
    if !value.is_finite() || !from.contains(value) {
        return Err(StatsError::OutOfRange { value });
    }
    let width = (from.max - from.min) / n_bins as f64;
    let raw = 1 + ((value - from.min) / width).floor() as i64;
    Ok(raw.clamp(1, n_bins as i64) as u32)
}
