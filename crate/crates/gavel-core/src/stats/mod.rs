//! Self-contained statistical kernel: rank correlation, agreement,
//! bootstrap intervals, binning, conditional distributions.
//!
//! Everything here is pure and deterministic: summation order is fixed
//! (index order, Neumaier compensation) so identical inputs give
//! bit-identical outputs across runs and platforms.

mod agreement;
mod bootstrap;
mod conditional;
mod histogram;
mod rank;

pub use agreement::{krippendorff_alpha, Level, ReliabilityMatrix};
pub use bootstrap::{
    bootstrap_ci_with, bootstrap_tau_ci, bootstrap_tau_difference_ci, ResamplePlan,
};
pub use conditional::{conditional_stats, ConditionalStats};
pub use histogram::{bin_scale, score_histogram, ScoreHistogram};
pub use rank::{kendall_tau_b, pearson_r};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum StatsError {
    TooFewPairs { n: usize },
    LengthMismatch { x: usize, y: usize },
    DuplicateId { id: String },
    NonFiniteValue,
    /// All ties or zero variance: the correlation has no defined value.
    UndefinedCorrelation,
    /// Zero expected disagreement: agreement has no defined value.
    DegenerateData,
    /// The statistic was undefined on more than half the resamples.
    Unstable { failed: usize, total: usize },
    OutOfRange { value: f64 },
    BadConfidence { confidence: f64 },
    BadBinCount,
    ExhaustiveTooLarge { n_units: usize },
    MatrixShape { detail: &'static str },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::TooFewPairs { n } => write!(f, "need at least 2 pairs, got {n}"),
            StatsError::LengthMismatch { x, y } => {
                write!(f, "paired inputs differ in length: {x} vs {y}")
            }
            StatsError::DuplicateId { id } => write!(f, "duplicate sample id {id:?}"),
            StatsError::NonFiniteValue => write!(f, "inputs must be finite"),
            StatsError::UndefinedCorrelation => {
                write!(f, "correlation undefined (all ties or zero variance)")
            }
            StatsError::DegenerateData => {
                write!(f, "agreement undefined (zero expected disagreement)")
            }
            StatsError::Unstable { failed, total } => write!(
                f,
                "statistic undefined on {failed}/{total} resamples (more than half)"
            ),
            StatsError::OutOfRange { value } => write!(f, "value {value} outside the scale"),
            StatsError::BadConfidence { confidence } => {
                write!(f, "confidence must be in (0, 1), got {confidence}")
            }
            StatsError::BadBinCount => write!(f, "n_bins must be >= 1"),
            StatsError::ExhaustiveTooLarge { n_units } => {
                write!(f, "exhaustive resampling infeasible for {n_units} units")
            }
            StatsError::MatrixShape { detail } => write!(f, "invalid reliability matrix: {detail}"),
        }
    }
}

impl core::error::Error for StatsError {}

/// Two score vectors paired by sample id.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedScores {
    pub ids: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PairedScores {
    pub fn new(ids: Vec<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self, StatsError> {
        if x.len() != y.len() || ids.len() != x.len() {
            return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
        }
        if x.len() < 2 {
            return Err(StatsError::TooFewPairs { n: x.len() });
        }
        for (i, id) in ids.iter().enumerate() {
            if ids[..i].iter().any(|other| other == id) {
                return Err(StatsError::DuplicateId { id: id.clone() });
            }
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(StatsError::NonFiniteValue);
        }
        Ok(PairedScores { ids, x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn kendall_tau_b(&self) -> Result<f64, StatsError> {
        kendall_tau_b(&self.x, &self.y)
    }

    pub fn pearson_r(&self) -> Result<f64, StatsError> {
        pearson_r(&self.x, &self.y)
    }
}

/// Neumaier-compensated sum in index order.
pub fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    stable_sum(values.iter().copied()) / values.len() as f64
}
