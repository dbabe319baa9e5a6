//! Statistics of a score conditioned on the previously emitted score.
//!
//! Input pairs are (previous value, next value) in emission order. A
//! drifting judge shows correlated partitions; an independent one shows
//! matching conditional means.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::scale::VALUE_EPS;

use super::{mean, pearson_r};

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalStats {
    pub n_above: usize,
    pub n_at_or_below: usize,
    pub mean_above: Option<f64>,
    pub mean_at_or_below: Option<f64>,
    /// Normalized (value, frequency) over next-scores within each
    /// partition, ascending by value.
    pub histogram_above: Vec<(f64, f64)>,
    pub histogram_at_or_below: Vec<(f64, f64)>,
    /// Pearson r over the full (previous, next) pairing; None when either
    /// side is constant or there are fewer than two pairs.
    pub pearson_r: Option<f64>,
}

pub fn conditional_stats(pairs: &[(f64, f64)], threshold: f64) -> ConditionalStats {
    let mut above: Vec<f64> = Vec::new();
    let mut at_or_below: Vec<f64> = Vec::new();
    for &(prev, next) in pairs {
        if prev > threshold {
            above.push(next);
        } else {
            at_or_below.push(next);
        }
    }

    let prevs: Vec<f64> = pairs.iter().map(|&(p, _)| p).collect();
    let nexts: Vec<f64> = pairs.iter().map(|&(_, n)| n).collect();
    let r = if pairs.len() >= 2 { pearson_r(&prevs, &nexts).ok() } else { None };

    ConditionalStats {
        n_above: above.len(),
        n_at_or_below: at_or_below.len(),
        mean_above: if above.is_empty() { None } else { Some(mean(&above)) },
        mean_at_or_below: if at_or_below.is_empty() { None } else { Some(mean(&at_or_below)) },
        histogram_above: normalized_histogram(&above),
        histogram_at_or_below: normalized_histogram(&at_or_below),
        pearson_r: r,
    }
}

fn normalized_histogram(values: &[f64]) -> Vec<(f64, f64)> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let weight = 1.0 / values.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some(last) if (last.0 - v).abs() <= VALUE_EPS => last.1 += weight,
            _ => out.push((v, weight)),
        }
    }
    out
}
