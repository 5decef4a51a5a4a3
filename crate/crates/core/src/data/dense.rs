//! Dense comma-separated files.
//!
//! Grammar, one record per line:
//!
//! ```text
//! file    := [header NL] row (NL row)*
//! row     := field ("," field)*
//! field   := decimal floating-point literal, surrounding spaces ignored
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. The first remaining
//! line is a header when some field is neither a number nor empty nor `?`;
//! header fields name the label columns. Labels occupy one column (a 0-based class index, written
//! as an integer) or `L` columns of `0`/`1` indicators, placed first or last
//! according to [`LabelPosition`]. Every row must have the same arity. `?` or
//! empty fields are rejected.

use std::fmt::Write as _;

use crate::data::{content_lines, parse_number, FormatSpec, LabelEncoding, LabelPosition};
use crate::error::{Error, Result};
use crate::types::{encode_labels, ClassificationType, Dataset, Sample};

pub(crate) fn parse(text: &str, spec: &FormatSpec) -> Result<Dataset> {
    let l = spec.label_count;
    let label_cols = match spec.label_encoding {
        LabelEncoding::Class => 1,
        LabelEncoding::Indicators => l,
    };

    let mut lines = content_lines(text, '#').peekable();
    let mut header: Option<Vec<String>> = None;
    if let Some(&(_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        if fields
            .iter()
            .any(|f| !f.is_empty() && *f != "?" && f.parse::<f64>().is_err())
        {
            header = Some(fields.iter().map(|s| s.to_string()).collect());
            lines.next();
        }
    }

    let mut samples = Vec::new();
    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    for (line, row) in lines {
        let fields: Vec<&str> = row.split(',').collect();
        let w = *width.get_or_insert(fields.len());
        if fields.len() != w {
            return Err(Error::Schema {
                line,
                message: format!("expected {w} fields, found {}", fields.len()),
            });
        }
        if w <= label_cols {
            return Err(Error::Schema {
                line,
                message: format!(
                    "{w} fields leave no room for features after {label_cols} label column(s)"
                ),
            });
        }
        let (label_fields, feature_fields) = match spec.label_position {
            LabelPosition::Leading => (&fields[..label_cols], &fields[label_cols..]),
            LabelPosition::Trailing => (&fields[w - label_cols..], &fields[..w - label_cols]),
        };
        let features = feature_fields
            .iter()
            .map(|f| parse_number(f, line))
            .collect::<Result<Vec<f64>>>()?;
        let label_set = match spec.label_encoding {
            LabelEncoding::Class => vec![parse_class(label_fields[0], line)?],
            LabelEncoding::Indicators => {
                let mut set = Vec::new();
                for (j, f) in label_fields.iter().enumerate() {
                    match f.trim() {
                        "1" | "1.0" => set.push(j),
                        "0" | "0.0" => {}
                        other => {
                            return Err(Error::Parse {
                                line,
                                message: format!("label indicator '{other}' is not 0 or 1"),
                            })
                        }
                    }
                }
                set
            }
        };
        samples.push(Sample::new(features, encode_labels(label_set, l)?));
    }

    let n = width.map_or(0, |w| w.saturating_sub(label_cols));
    if samples.is_empty() || n == 0 {
        return Err(Error::Schema {
            line: 0,
            message: "file contains no data rows".into(),
        });
    }

    let label_names = match (&header, spec.label_encoding) {
        (Some(h), LabelEncoding::Indicators) => match spec.label_position {
            LabelPosition::Leading => h[..l].to_vec(),
            LabelPosition::Trailing => h[h.len() - l..].to_vec(),
        },
        _ => (0..l).map(|j| j.to_string()).collect(),
    };
    let declared = match (spec.label_encoding, l) {
        (LabelEncoding::Indicators, _) => ClassificationType::MultiLabel,
        (LabelEncoding::Class, 2) => ClassificationType::Binary,
        (LabelEncoding::Class, _) => ClassificationType::MultiClass,
    };
    Dataset::new(samples, n, l, label_names, Some(declared))
}

fn parse_class(token: &str, line: usize) -> Result<usize> {
    let v = parse_number(token, line)?;
    if v < 0.0 || v.fract() != 0.0 {
        return Err(Error::Parse {
            line,
            message: format!("class '{}' is not a nonnegative integer", token.trim()),
        });
    }
    Ok(v as usize)
}

/// Writes a dataset back in the dense grammar, with a header line.
pub fn write(d: &Dataset, spec: &FormatSpec) -> Result<String> {
    let l = d.label_count();
    let mut out = String::new();
    let feature_names: Vec<String> = (0..d.feature_dim()).map(|j| format!("x{j}")).collect();
    let label_names: Vec<String> = match spec.label_encoding {
        LabelEncoding::Class => vec!["class".into()],
        LabelEncoding::Indicators => d.label_names().to_vec(),
    };
    let header = match spec.label_position {
        LabelPosition::Leading => [label_names, feature_names].concat(),
        LabelPosition::Trailing => [feature_names, label_names].concat(),
    };
    out.push_str(&header.join(","));
    out.push('\n');

    for (i, s) in d.samples().iter().enumerate() {
        let lv = s
            .labels
            .as_ref()
            .ok_or_else(|| Error::shape(format!("sample {i} has no labels")))?;
        let labels: Vec<String> = match spec.label_encoding {
            LabelEncoding::Class => {
                let pos = lv.positives();
                if pos.len() != 1 {
                    return Err(Error::shape(format!(
                        "sample {i} has {} labels; a class column needs exactly one",
                        pos.len()
                    )));
                }
                vec![pos.iter().next().unwrap().to_string()]
            }
            LabelEncoding::Indicators => {
                let pos = lv.positives();
                (0..l)
                    .map(|j| if pos.contains(&j) { "1" } else { "0" }.to_string())
                    .collect()
            }
        };
        let features: Vec<String> = s.features.iter().map(|v| format!("{v:?}")).collect();
        let row = match spec.label_position {
            LabelPosition::Leading => [labels, features].concat(),
            LabelPosition::Trailing => [features, labels].concat(),
        };
        writeln!(out, "{}", row.join(",")).expect("writing to a String");
    }
    Ok(out)
}
