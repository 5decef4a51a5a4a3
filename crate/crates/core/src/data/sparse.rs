//! Sparse multi-label lines.
//!
//! ```text
//! line     := [labels] SP features
//! labels   := label ("," label)*          1-based label indices
//! features := pair (SP pair)*             pair := index ":" value, 1-based index
//! ```
//!
//! A line with no labels starts with whitespace (or directly with a pair).
//! Unlisted features are 0. The feature dimension is fixed by
//! [`FormatSpec::feature_dim`] when given, otherwise the largest index in the
//! file. Blank lines and lines starting with `#` are skipped.

use crate::data::{content_lines, parse_number, FormatSpec};
use crate::error::{Error, Result};
use crate::types::{encode_labels, ClassificationType, Dataset, Sample};

/// Line number, label indices, feature pairs.
type Row = (usize, Vec<usize>, Vec<(usize, f64)>);

pub(crate) fn parse(text: &str, spec: &FormatSpec) -> Result<Dataset> {
    let l = spec.label_count;
    let mut rows: Vec<Row> = Vec::new();
    let mut max_index = 0usize;

    for (line, raw) in content_lines(text, '#') {
        let mut tokens = raw.split_whitespace().peekable();
        let label_token = if raw.starts_with(char::is_whitespace) {
            None
        } else {
            tokens.next_if(|t| !t.contains(':'))
        };
        let mut labels = Vec::new();
        if let Some(tok) = label_token {
            for part in tok.split(',').filter(|p| !p.is_empty()) {
                let one_based: usize = part.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("'{part}' is not a label index"),
                })?;
                if one_based == 0 {
                    return Err(Error::Parse {
                        line,
                        message: "label indices are 1-based".into(),
                    });
                }
                if one_based > l {
                    return Err(Error::Encoding {
                        index: one_based - 1,
                        labels: l,
                    });
                }
                labels.push(one_based - 1);
            }
        }

        let mut pairs = Vec::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected index:value, found '{tok}'"),
            })?;
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{idx}' is not a feature index"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line,
                    message: "feature indices are 1-based".into(),
                });
            }
            if let Some(n) = spec.feature_dim {
                if idx > n {
                    return Err(Error::Schema {
                        line,
                        message: format!("feature index {idx} exceeds dimension {n}"),
                    });
                }
            }
            max_index = max_index.max(idx);
            pairs.push((idx - 1, parse_number(val, line)?));
        }
        rows.push((line, labels, pairs));
    }

    let n = spec.feature_dim.unwrap_or(max_index);
    if rows.is_empty() || n == 0 {
        return Err(Error::Schema {
            line: 0,
            message: "file contains no feature data".into(),
        });
    }
    let samples = rows
        .into_iter()
        .map(|(_, labels, pairs)| {
            let mut features = vec![0.0; n];
            for (j, v) in pairs {
                features[j] = v;
            }
            Ok(Sample::new(features, encode_labels(labels, l)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let label_names = (1..=l).map(|j| j.to_string()).collect();
    Dataset::new(
        samples,
        n,
        l,
        label_names,
        Some(ClassificationType::MultiLabel),
    )
}
