//! Dataset file IO. One JSON document per dataset; the schema is the
//! serde form of `Dataset` (see docs/formats.md).

use std::fs;
use std::path::Path;

use gavel_core::scale::ScaleKind;
use gavel_core::types::Dataset;

use crate::error::AppError;

/// Both formats share the schema; the format pins the expected kind of
/// the expert scale so a mixed-up file fails loudly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetFormat {
    /// Star-rated expert annotations on a finite scale.
    SummevalLike,
    /// Continuous unit-interval coverage scores.
    RoseLike,
}

impl DatasetFormat {
    pub fn parse(name: &str) -> Result<Self, AppError> {
        match name {
            "summeval-like" => Ok(DatasetFormat::SummevalLike),
            "rose-like" => Ok(DatasetFormat::RoseLike),
            other => Err(AppError::Usage(format!(
                "unknown dataset format {other:?} (expected summeval-like or rose-like)"
            ))),
        }
    }

    pub fn infer(dataset: &Dataset) -> Self {
        if dataset.human_scale.kind == ScaleKind::ContinuousUnit {
            DatasetFormat::RoseLike
        } else {
            DatasetFormat::SummevalLike
        }
    }

    fn check_scale(self, dataset: &Dataset) -> Result<(), AppError> {
        let kind = dataset.human_scale.kind;
        let ok = match self {
            DatasetFormat::SummevalLike => kind != ScaleKind::ContinuousUnit,
            DatasetFormat::RoseLike => kind == ScaleKind::ContinuousUnit,
        };
        if ok {
            Ok(())
        } else {
            Err(AppError::Config(format!(
                "dataset scale kind {kind:?} does not match the {self:?} format"
            )))
        }
    }
}

pub fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Dataset, AppError> {
    let dataset = load_dataset_auto(path)?;
    format.check_scale(&dataset)?;
    Ok(dataset)
}

/// Load without a declared format; the file is self-describing.
pub fn load_dataset_auto(path: &Path) -> Result<Dataset, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Config(format!("cannot read dataset {}: {e}", path.display())))?;
    let mut dataset: Dataset = serde_json::from_str(&text)?;
    dataset.human_scale.materialize()?;
    dataset.validate()?;
    Ok(dataset)
}

pub fn save_dataset(path: &Path, dataset: &Dataset) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(dataset)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
