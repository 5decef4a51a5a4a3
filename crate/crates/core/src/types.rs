//! Uniform sample and label representation shared by every classification type.
//!
//! Targets for binary, multi-class and multi-label problems all use the same
//! bipolar [`LabelVector`]: `+1` where the sample belongs to a label and `-1`
//! elsewhere. A binary problem is simply a two-label vector.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const POSITIVE: f64 = 1.0;
pub const NEGATIVE: f64 = -1.0;

/// The three problem families a single model can serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassificationType {
    Binary,
    #[serde(rename = "multiclass")]
    MultiClass,
    #[serde(rename = "multilabel")]
    MultiLabel,
}

impl ClassificationType {
    pub fn is_single_label(self) -> bool {
        !matches!(self, ClassificationType::MultiLabel)
    }
}

impl fmt::Display for ClassificationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassificationType::Binary => "binary",
            ClassificationType::MultiClass => "multiclass",
            ClassificationType::MultiLabel => "multilabel",
        })
    }
}

/// Bipolar target vector of length `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelVector {
    values: Vec<f64>,
}

impl LabelVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of the `+1` entries, ascending.
    pub fn positives(&self) -> BTreeSet<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == POSITIVE)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn positive_count(&self) -> usize {
        self.values.iter().filter(|&&v| v == POSITIVE).count()
    }
}

/// Encodes a set of 0-based label indices as a bipolar vector of length `labels`.
pub fn encode_labels<I>(raw_labels: I, labels: usize) -> Result<LabelVector>
where
    I: IntoIterator<Item = usize>,
{
    if labels < 2 {
        return Err(Error::config(format!(
            "label count must be at least 2, got {labels}"
        )));
    }
    let mut values = vec![NEGATIVE; labels];
    for index in raw_labels {
        if index >= labels {
            return Err(Error::Encoding { index, labels });
        }
        values[index] = POSITIVE;
    }
    Ok(LabelVector { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub labels: Option<LabelVector>,
}

impl Sample {
    pub fn new(features: Vec<f64>, labels: LabelVector) -> Self {
        Self {
            features,
            labels: Some(labels),
        }
    }

    pub fn unlabeled(features: Vec<f64>) -> Self {
        Self {
            features,
            labels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    feature_dim: usize,
    label_count: usize,
    label_names: Vec<String>,
    declared_type: Option<ClassificationType>,
}

impl Dataset {
    /// Validates every sample against the declared shape before accepting it.
    pub fn new(
        samples: Vec<Sample>,
        feature_dim: usize,
        label_count: usize,
        label_names: Vec<String>,
        declared_type: Option<ClassificationType>,
    ) -> Result<Self> {
        if label_count < 2 {
            return Err(Error::config(format!(
                "label count must be at least 2, got {label_count}"
            )));
        }
        if feature_dim == 0 {
            return Err(Error::config("feature dimension must be positive"));
        }
        if label_names.len() != label_count {
            return Err(Error::config(format!(
                "{} label names given for {label_count} labels",
                label_names.len()
            )));
        }
        if declared_type == Some(ClassificationType::Binary) && label_count != 2 {
            return Err(Error::config(format!(
                "binary datasets have exactly 2 labels, got {label_count}"
            )));
        }
        let single_label = declared_type.is_some_and(ClassificationType::is_single_label);
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != feature_dim {
                return Err(Error::shape(format!(
                    "sample {i} has {} features, expected {feature_dim}",
                    s.features.len()
                )));
            }
            if let Some(j) = s.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!(
                    "sample {i} feature {j} is not finite"
                )));
            }
            if let Some(lv) = &s.labels {
                if lv.len() != label_count {
                    return Err(Error::shape(format!(
                        "sample {i} has {} labels, expected {label_count}",
                        lv.len()
                    )));
                }
                if single_label && lv.positive_count() != 1 {
                    return Err(Error::config(format!(
                        "sample {i} has {} positive labels in a single-label dataset",
                        lv.positive_count()
                    )));
                }
            }
        }
        Ok(Self {
            samples,
            feature_dim,
            label_count,
            label_names,
            declared_type,
        })
    }

    /// Same shape and metadata, different rows. Rows are assumed already valid.
    pub(crate) fn with_samples(&self, samples: Vec<Sample>) -> Self {
        Self {
            samples,
            feature_dim: self.feature_dim,
            label_count: self.label_count,
            label_names: self.label_names.clone(),
            declared_type: self.declared_type,
        }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn declared_type(&self) -> Option<ClassificationType> {
        self.declared_type
    }

    /// The declared type, or the narrowest type consistent with the labels.
    pub fn effective_type(&self) -> ClassificationType {
        if let Some(t) = self.declared_type {
            return t;
        }
        let single = self
            .samples
            .iter()
            .filter_map(|s| s.labels.as_ref())
            .all(|lv| lv.positive_count() == 1);
        match (single, self.label_count) {
            (true, 2) => ClassificationType::Binary,
            (true, _) => ClassificationType::MultiClass,
            (false, _) => ClassificationType::MultiLabel,
        }
    }
}

/// Label cardinality and density of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub cardinality: f64,
    pub density: f64,
    pub samples: usize,
}

pub fn dataset_stats(d: &Dataset) -> Result<DatasetStats> {
    let labelled: Vec<&LabelVector> = d.samples.iter().filter_map(|s| s.labels.as_ref()).collect();
    if labelled.is_empty() {
        return Err(Error::Stats("dataset has no labelled samples".into()));
    }
    let positives: usize = labelled.iter().map(|lv| lv.positive_count()).sum();
    let cardinality = positives as f64 / labelled.len() as f64;
    Ok(DatasetStats {
        cardinality,
        density: cardinality / d.label_count as f64,
        samples: labelled.len(),
    })
}

/// Stacks sample features row-wise into an `N x n` matrix.
pub fn feature_matrix(samples: &[Sample]) -> DMatrix<f64> {
    let cols = samples.first().map_or(0, |s| s.features.len());
    DMatrix::from_fn(samples.len(), cols, |i, j| samples[i].features[j])
}

/// Stacks bipolar targets row-wise into an `N x L` matrix.
pub fn target_matrix(samples: &[Sample]) -> Result<DMatrix<f64>> {
    let mut rows = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        match &s.labels {
            Some(lv) => rows.push(lv.values()),
            None => return Err(Error::shape(format!("sample {i} has no labels"))),
        }
    }
    let cols = rows.first().map_or(0, |r| r.len());
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}
