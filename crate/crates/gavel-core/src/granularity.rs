//! Effective granularity G: how many distinct final values a scoring
//! method can produce once n sampled scores are averaged.

use alloc::collections::BTreeSet;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::scale::{RatingScale, ScaleKind};

/// Relative slack when deciding whether a value set is equally spaced.
/// The GPA grid steps alternate 0.33/0.34 (a 3% wobble from rounding to
/// two decimals) and must count as uniform, matching its published G.
const SPACING_SLACK: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GranularityError {
    UnsupportedScale,
    TooFewValues { count: usize },
    ZeroSamples,
}

impl fmt::Display for GranularityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GranularityError::UnsupportedScale => {
                write!(f, "effective granularity is undefined for continuous scales")
            }
            GranularityError::TooFewValues { count } => {
                write!(f, "scale needs at least 2 values, has {count}")
            }
            GranularityError::ZeroSamples => write!(f, "n_samples must be >= 1"),
        }
    }
}

impl core::error::Error for GranularityError {}

/// Number of distinct mean-of-n values: n*(V-1)+1 for equally spaced value
/// sets, exact enumeration of attainable sums otherwise.
pub fn effective_granularity(
    scale: &RatingScale,
    n_samples: usize,
) -> Result<u64, GranularityError> {
    if scale.kind == ScaleKind::ContinuousUnit {
        return Err(GranularityError::UnsupportedScale);
    }
    let values = &scale.value_set;
    if values.len() < 2 {
        return Err(GranularityError::TooFewValues { count: values.len() });
    }
    if n_samples == 0 {
        return Err(GranularityError::ZeroSamples);
    }
    if equally_spaced(values) {
        return Ok(n_samples as u64 * (values.len() as u64 - 1) + 1);
    }
    Ok(count_attainable_sums(values, n_samples))
}

fn equally_spaced(values: &[f64]) -> bool {
    let steps: alloc::vec::Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let mut min_step = f64::INFINITY;
    let mut max_step = 0.0f64;
    let mut sum = 0.0;
    for &s in &steps {
        min_step = min_step.min(s);
        max_step = max_step.max(s);
        sum += s;
    }
    let mean = sum / steps.len() as f64;
    max_step - min_step <= SPACING_SLACK * mean
}

/// Distinct sums of n-element multisets, on an integer grid of hundredths
/// (scale values carry at most 2 decimals).
fn count_attainable_sums(values: &[f64], n_samples: usize) -> u64 {
    let cents: alloc::vec::Vec<i64> = values.iter().map(|&v| (v * 100.0).round() as i64).collect();
    let mut sums = BTreeSet::new();
    sums.insert(0i64);
    for _ in 0..n_samples {
        let mut next = BTreeSet::new();
        for &s in &sums {
            for &c in &cents {
                next.insert(s + c);
            }
        }
        sums = next;
    }
    sums.len() as u64
}
