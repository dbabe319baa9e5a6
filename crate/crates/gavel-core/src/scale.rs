//! Rating scales and the word/float modifier arithmetic.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use serde::{Deserialize, Serialize};

/// Tolerance for matching a parsed or stored value against a scale's
/// legal value set. Scale values are 2-decimal quantities, so anything
/// tighter than 1e-2 and looser than f64 noise works.
pub const VALUE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleKind {
    IntegerRange,
    WordModifier,
    FloatModifier,
    ContinuousUnit,
}

/// A judging scale: its kind, bounds, and (for finite kinds) the explicit
/// list of legal values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingScale {
    pub kind: ScaleKind,
    pub min: f64,
    pub max: f64,
    /// Sorted, deduplicated, all within [min, max]. Empty for continuous-unit.
    #[serde(default)]
    pub value_set: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modifier {
    None,
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScaleError {
    InvalidBounds { min: f64, max: f64 },
    EmptyValueSet,
    UnsortedValueSet,
    ValueOutOfBounds { value: f64 },
    /// (base, modifier) combination clamped out of the scale: weak on the
    /// minimum or strong on the maximum.
    IllegalModifier { base: i64, modifier: Modifier },
}

impl fmt::Display for ScaleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleError::InvalidBounds { min, max } => {
                write!(f, "scale bounds must satisfy min < max, got [{min}, {max}]")
            }
            ScaleError::EmptyValueSet => write!(f, "finite scale has an empty value set"),
            ScaleError::UnsortedValueSet => {
                write!(f, "scale value set must be sorted and deduplicated")
            }
            ScaleError::ValueOutOfBounds { value } => {
                write!(f, "scale value {value} lies outside [min, max]")
            }
            ScaleError::IllegalModifier { base, modifier } => {
                write!(f, "modifier {modifier:?} on base {base} is clamped out of the scale")
            }
        }
    }
}

impl core::error::Error for ScaleError {}

impl RatingScale {
    pub fn integer_range(min: i64, max: i64) -> Self {
        assert!(min < max, "integer scale needs min < max");
        RatingScale {
            kind: ScaleKind::IntegerRange,
            min: min as f64,
            max: max as f64,
            value_set: (min..=max).map(|v| v as f64).collect(),
        }
    }

    /// 1-5 star scale refined by "strong"/"weak" (+-0.33). Legal values are
    /// the same 3*(max-min)+1 points as the float-modifier scale: weak-min
    /// and strong-max are clamped out.
    pub fn word_modifier(min: i64, max: i64) -> Self {
        RatingScale {
            kind: ScaleKind::WordModifier,
            min: min as f64,
            max: max as f64,
            value_set: gpa_value_set(min, max),
        }
    }

    /// GPA-style scale: direct fractional predictions on the same grid.
    pub fn float_modifier(min: i64, max: i64) -> Self {
        RatingScale {
            kind: ScaleKind::FloatModifier,
            min: min as f64,
            max: max as f64,
            value_set: gpa_value_set(min, max),
        }
    }

    /// Continuous [0, 1] scale (ACU-style fractional coverage).
    pub fn continuous_unit() -> Self {
        RatingScale {
            kind: ScaleKind::ContinuousUnit,
            min: 0.0,
            max: 1.0,
            value_set: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ScaleError> {
        if !(self.min < self.max) {
            return Err(ScaleError::InvalidBounds { min: self.min, max: self.max });
        }
        if self.kind == ScaleKind::ContinuousUnit {
            return Ok(());
        }
        if self.value_set.is_empty() {
            return Err(ScaleError::EmptyValueSet);
        }
        for w in self.value_set.windows(2) {
            if !(w[0] + VALUE_EPS < w[1]) {
                return Err(ScaleError::UnsortedValueSet);
            }
        }
        for &v in &self.value_set {
            if v < self.min - VALUE_EPS || v > self.max + VALUE_EPS {
                return Err(ScaleError::ValueOutOfBounds { value: v });
            }
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn is_finite_kind(&self) -> bool {
        self.kind != ScaleKind::ContinuousUnit
    }

    /// Whether `value` is legal on this scale: a member of the value set
    /// (finite kinds) or within bounds (continuous).
    pub fn contains(&self, value: f64) -> bool {
        if !value.is_finite() {
            return false;
        }
        if self.kind == ScaleKind::ContinuousUnit {
            return value >= self.min && value <= self.max;
        }
        self.value_set.iter().any(|&v| (v - value).abs() < VALUE_EPS)
    }

    /// Fill an empty `value_set` from kind and bounds. Deserialized scales
    /// may omit the set; call this before `validate`. Non-empty sets and
    /// continuous scales are left untouched.
    pub fn materialize(&mut self) -> Result<(), ScaleError> {
        if !self.value_set.is_empty() || self.kind == ScaleKind::ContinuousUnit {
            return Ok(());
        }
        if !(self.min < self.max) {
            return Err(ScaleError::InvalidBounds { min: self.min, max: self.max });
        }
        let (min_i, max_i) = (self.min as i64, self.max as i64);
        if (self.min - min_i as f64).abs() > VALUE_EPS || (self.max - max_i as f64).abs() > VALUE_EPS {
            return Err(ScaleError::InvalidBounds { min: self.min, max: self.max });
        }
        self.value_set = match self.kind {
            ScaleKind::IntegerRange => (min_i..=max_i).map(|v| v as f64).collect(),
            ScaleKind::WordModifier | ScaleKind::FloatModifier => gpa_value_set(min_i, max_i),
            ScaleKind::ContinuousUnit => unreachable!(),
        };
        Ok(())
    }

    /// Nearest legal value; exact midpoints resolve upward. Continuous
    /// scales clamp to bounds.
    pub fn nearest(&self, x: f64) -> f64 {
        if self.kind == ScaleKind::ContinuousUnit {
            return x.max(self.min).min(self.max);
        }
        let mut best = self.value_set[0];
        let mut best_d = (x - best).abs();
        for &v in &self.value_set[1..] {
            let d = (x - v).abs();
            if d <= best_d {
                best = v;
                best_d = d;
            }
        }
        best
    }
}

/// Render a scale value the way prompts and judges write them: integers
/// bare, fractional values with two decimals.
pub fn format_value(v: f64) -> String {
    if (v - v.round()).abs() < VALUE_EPS {
        alloc::format!("{}", v.round() as i64)
    } else {
        alloc::format!("{v:.2}")
    }
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// The GPA-style grid {min, min+0.33, min+0.67, min+1, ..., max}:
/// exactly 3*(max-min)+1 values.
pub fn gpa_value_set(min: i64, max: i64) -> Vec<f64> {
    assert!(min < max, "gpa_value_set needs min < max");
    let mut values = Vec::with_capacity((3 * (max - min) + 1) as usize);
    for base in min..max {
        let b = base as f64;
        values.push(b);
        values.push(round2(b + 0.33));
        values.push(round2(b + 0.67));
    }
    values.push(max as f64);
    values
}

/// Word-modifier arithmetic: strong adds 0.33, weak subtracts 0.33,
/// rounded to 2 decimals. Combinations that would leave the scale
/// (weak on min, strong on max) are illegal rather than clamped.
pub fn map_word_modifier(
    base: i64,
    modifier: Modifier,
    min: i64,
    max: i64,
) -> Result<f64, ScaleError> {
    if base < min || base > max {
        return Err(ScaleError::ValueOutOfBounds { value: base as f64 });
    }
    match modifier {
        Modifier::None => Ok(base as f64),
        Modifier::Strong if base == max => {
            Err(ScaleError::IllegalModifier { base, modifier })
        }
        Modifier::Weak if base == min => {
            Err(ScaleError::IllegalModifier { base, modifier })
        }
        Modifier::Strong => Ok(round2(base as f64 + 0.33)),
        Modifier::Weak => Ok(round2(base as f64 - 0.33)),
    }
}
