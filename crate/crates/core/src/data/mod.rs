//! Dataset ingestion, feature scaling and stream partitioning.
//!
//! Three on-disk formats are understood:
//!
//! * [`Format::DenseCsv`]: comma-separated numeric rows with either a single
//!   class-index column or a block of `L` 0/1 indicator columns, leading or
//!   trailing. See [`dense`].
//! * [`Format::ArffMultiLabel`]: attribute-relation files whose first or last
//!   `L` attributes are binary labels. See [`arff`].
//! * [`Format::SparseMultiLabel`]: `labels index:value ...` lines with 1-based
//!   indices. See [`sparse`].

pub mod arff;
pub mod dense;
pub mod normalize;
pub mod sparse;
pub mod stream;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Dataset;

pub use normalize::{fit_apply_normalizer, Normalizer};
pub use stream::{chunk_stream, DataStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    DenseCsv,
    ArffMultiLabel,
    SparseMultiLabel,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" | "csv" | "dense-csv" => Ok(Format::DenseCsv),
            "arff" | "arff-multilabel" => Ok(Format::ArffMultiLabel),
            "sparse" | "sparse-multilabel" => Ok(Format::SparseMultiLabel),
            other => Err(Error::config(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::DenseCsv => "dense",
            Format::ArffMultiLabel => "arff",
            Format::SparseMultiLabel => "sparse",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LabelPosition {
    Leading,
    #[default]
    Trailing,
}

impl FromStr for LabelPosition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "leading" | "first" => Ok(LabelPosition::Leading),
            "trailing" | "last" => Ok(LabelPosition::Trailing),
            other => Err(Error::config(format!("unknown label position '{other}'"))),
        }
    }
}

/// How labels are laid out in a dense file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LabelEncoding {
    /// One column holding a 0-based class index (single-label data).
    #[default]
    Class,
    /// `L` columns of 0/1 indicators (multi-label data).
    Indicators,
}

impl FromStr for LabelEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "class" => Ok(LabelEncoding::Class),
            "indicators" | "indicator" => Ok(LabelEncoding::Indicators),
            other => Err(Error::config(format!("unknown label encoding '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatSpec {
    pub format: Format,
    pub label_count: usize,
    pub label_position: LabelPosition,
    /// Only consulted for dense files.
    pub label_encoding: LabelEncoding,
    /// Fixes the feature dimension of sparse files; otherwise the largest index seen.
    pub feature_dim: Option<usize>,
}

impl FormatSpec {
    pub fn new(format: Format, label_count: usize) -> Self {
        Self {
            format,
            label_count,
            label_position: LabelPosition::Trailing,
            label_encoding: match format {
                Format::DenseCsv => LabelEncoding::Class,
                _ => LabelEncoding::Indicators,
            },
            feature_dim: None,
        }
    }

    pub fn with_position(mut self, position: LabelPosition) -> Self {
        self.label_position = position;
        self
    }

    pub fn with_encoding(mut self, encoding: LabelEncoding) -> Self {
        self.label_encoding = encoding;
        self
    }

    pub fn with_feature_dim(mut self, n: usize) -> Self {
        self.feature_dim = Some(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.label_count < 2 {
            return Err(Error::config(format!(
                "label count must be at least 2, got {}",
                self.label_count
            )));
        }
        if self.feature_dim == Some(0) {
            return Err(Error::config("feature dimension must be positive"));
        }
        Ok(())
    }
}

pub fn parse_dataset(path: impl AsRef<Path>, spec: &FormatSpec) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_str(&text, spec)
}

pub fn parse_str(text: &str, spec: &FormatSpec) -> Result<Dataset> {
    spec.validate()?;
    match spec.format {
        Format::DenseCsv => dense::parse(text, spec),
        Format::ArffMultiLabel => arff::parse(text, spec),
        Format::SparseMultiLabel => sparse::parse(text, spec),
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines<'a>(
    text: &'a str,
    comment: char,
) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(move |(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with(comment)
        })
}

pub(crate) fn parse_number(token: &str, line: usize) -> Result<f64> {
    let t = token.trim();
    if t.is_empty() || t == "?" {
        return Err(Error::Parse {
            line,
            message: "missing value".into(),
        });
    }
    let v: f64 = t.parse().map_err(|_| Error::Parse {
        line,
        message: format!("'{t}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("'{t}' is not finite"),
        });
    }
    Ok(v)
}

/// Deterministic permutation of `0..n`.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}
