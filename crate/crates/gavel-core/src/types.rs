//! Domain types shared by every audit: dimensions, samples, datasets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::scale::{RatingScale, ScaleError};

/// One quality under evaluation, with the two prose slots the prompt
/// templates consume.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    pub definition: String,
    pub aspects: String,
}

impl Dimension {
    pub fn new(name: &str, definition: &str, aspects: &str) -> Self {
        Dimension {
            name: name.into(),
            definition: definition.into(),
            aspects: aspects.into(),
        }
    }
}

/// One (document, summary) pair plus whatever ground truth came with it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSample {
    pub sample_id: String,
    pub document: String,
    pub summary: String,
    /// Identifier of the summarizer that produced this summary.
    pub system_id: String,
    /// Per-dimension annotator ratings, one entry per human annotator.
    /// Kept as lists so agreement statistics stay computable.
    #[serde(default)]
    pub expert_scores: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_perplexity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document_perplexity: Option<f64>,
}

impl EvaluationSample {
    /// Mean annotator rating for a dimension; None when unannotated.
    pub fn expert_mean(&self, dimension: &str) -> Option<f64> {
        let scores = self.expert_scores.get(dimension)?;
        if scores.is_empty() {
            return None;
        }
        Some(scores.iter().sum::<f64>() / scores.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    /// Scale of the expert annotations (not of any judge run).
    pub human_scale: RatingScale,
    pub dimensions: Vec<Dimension>,
    pub samples: Vec<EvaluationSample>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetError {
    Scale(ScaleError),
    NoSamples,
    EmptyDatasetName,
    EmptyDimensionField { dimension: String, field: &'static str },
    DuplicateDimension { name: String },
    DuplicateSampleId { sample_id: String },
    EmptySampleField { sample_id: String, field: &'static str },
    UnknownDimension { sample_id: String, dimension: String },
    ScoreOutOfScale { sample_id: String, dimension: String, value: f64 },
    InvalidPerplexity { sample_id: String, field: &'static str, value: f64 },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::Scale(e) => write!(f, "invalid human scale: {e}"),
            DatasetError::NoSamples => write!(f, "dataset has no samples"),
            DatasetError::EmptyDatasetName => write!(f, "dataset name is empty"),
            DatasetError::EmptyDimensionField { dimension, field } => {
                write!(f, "dimension {dimension:?} has an empty {field}")
            }
            DatasetError::DuplicateDimension { name } => {
                write!(f, "dimension {name:?} declared more than once")
            }
            DatasetError::DuplicateSampleId { sample_id } => {
                write!(f, "sample id {sample_id:?} appears more than once")
            }
            DatasetError::EmptySampleField { sample_id, field } => {
                write!(f, "sample {sample_id:?}: field {field} is empty")
            }
            DatasetError::UnknownDimension { sample_id, dimension } => {
                write!(f, "sample {sample_id:?}: scores reference undeclared dimension {dimension:?}")
            }
            DatasetError::ScoreOutOfScale { sample_id, dimension, value } => {
                write!(f, "sample {sample_id:?}: expert score {value} on {dimension:?} is outside the human scale")
            }
            DatasetError::InvalidPerplexity { sample_id, field, value } => {
                write!(f, "sample {sample_id:?}: {field} must be > 1.0, got {value}")
            }
        }
    }
}

impl core::error::Error for DatasetError {}

impl From<ScaleError> for DatasetError {
    fn from(e: ScaleError) -> Self {
        DatasetError::Scale(e)
    }
}

impl Dataset {
    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        self.human_scale.validate()?;
        if self.name.is_empty() {
            return Err(DatasetError::EmptyDatasetName);
        }
        for (i, dim) in self.dimensions.iter().enumerate() {
            if dim.name.is_empty() {
                return Err(DatasetError::EmptyDimensionField {
                    dimension: dim.name.clone(),
                    field: "name",
                });
            }
            if dim.definition.is_empty() {
                return Err(DatasetError::EmptyDimensionField {
                    dimension: dim.name.clone(),
                    field: "definition",
                });
            }
            if self.dimensions[..i].iter().any(|d| d.name == dim.name) {
                return Err(DatasetError::DuplicateDimension { name: dim.name.clone() });
            }
        }
        if self.samples.is_empty() {
            return Err(DatasetError::NoSamples);
        }
        for (i, sample) in self.samples.iter().enumerate() {
            let id = &sample.sample_id;
            if id.is_empty() {
                return Err(DatasetError::EmptySampleField {
                    sample_id: id.clone(),
                    field: "sample_id",
                });
            }
            if self.samples[..i].iter().any(|s| s.sample_id == *id) {
                return Err(DatasetError::DuplicateSampleId { sample_id: id.clone() });
            }
            if sample.document.is_empty() {
                return Err(DatasetError::EmptySampleField {
                    sample_id: id.clone(),
                    field: "document",
                });
            }
            if sample.summary.is_empty() {
                return Err(DatasetError::EmptySampleField {
                    sample_id: id.clone(),
                    field: "summary",
                });
            }
            for (dim, scores) in &sample.expert_scores {
                if self.dimension(dim).is_none() {
                    return Err(DatasetError::UnknownDimension {
                        sample_id: id.clone(),
                        dimension: dim.clone(),
                    });
                }
                for &score in scores {
                    if !self.human_scale.contains(score) {
                        return Err(DatasetError::ScoreOutOfScale {
                            sample_id: id.clone(),
                            dimension: dim.clone(),
                            value: score,
                        });
                    }
                }
            }
            for (value, field) in [
                (sample.summary_perplexity, "summary_perplexity"),
                (sample.document_perplexity, "document_perplexity"),
            ] {
                if let Some(v) = value {
                    if !(v > 1.0) {
                        return Err(DatasetError::InvalidPerplexity {
                            sample_id: id.clone(),
                            field,
                            value: v,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}
