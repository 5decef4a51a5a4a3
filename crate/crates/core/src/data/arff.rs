//! Attribute-relation multi-label files.
//!
//! ```text
//! file       := header "@data" NL row*
//! header     := ("@relation" name | "@attribute" name type)*
//! type       := "numeric" | "real" | "integer" | "{" value ("," value)* "}"
//! row        := value ("," value)*                    dense row
//!             | "{" [index SP value ("," index SP value)*] "}"   sparse row, 0-based
//! ```
//!
//! Keywords are case-insensitive; `%` starts a comment line; names may be
//! quoted with `'` or `"`. The last `L` attributes (or the first `L` with a
//! leading label position) are labels and must take values `0`/`1`. Every
//! other attribute must be numeric. Attributes missing from a sparse row are 0.

use crate::data::{content_lines, parse_number, FormatSpec, LabelPosition};
use crate::error::{Error, Result};
use crate::types::{encode_labels, ClassificationType, Dataset, Sample};

#[derive(Debug)]
struct Attribute {
    name: String,
    numeric: bool,
}

pub(crate) fn parse(text: &str, spec: &FormatSpec) -> Result<Dataset> {
    let l = spec.label_count;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut lines = content_lines(text, '%');
    let mut saw_data = false;

    for (line, raw) in lines.by_ref() {
        let t = raw.trim();
        let lower = t.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            continue;
        } else if lower.starts_with("@attribute") {
            attributes.push(parse_attribute(&t["@attribute".len()..], line)?);
        } else if lower.starts_with("@data") {
            saw_data = true;
            break;
        } else {
            return Err(Error::Parse {
                line,
                message: format!("unexpected header line '{t}'"),
            });
        }
    }
    if !saw_data {
        return Err(Error::Schema {
            line: 0,
            message: "missing @data section".into(),
        });
    }
    let width = attributes.len();
    if width <= l {
        return Err(Error::Schema {
            line: 0,
            message: format!("{width} attributes leave no room for features after {l} labels"),
        });
    }
    let label_range = match spec.label_position {
        LabelPosition::Leading => 0..l,
        LabelPosition::Trailing => width - l..width,
    };
    for (i, a) in attributes.iter().enumerate() {
        if !label_range.contains(&i) && !a.numeric {
            return Err(Error::Schema {
                line: 0,
                message: format!("feature attribute '{}' is not numeric", a.name),
            });
        }
    }

    let mut samples = Vec::new();
    for (line, raw) in lines {
        let values = parse_row(raw.trim(), width, line)?;
        let mut features = Vec::with_capacity(width - l);
        let mut labels = Vec::new();
        for (i, v) in values.into_iter().enumerate() {
            if label_range.contains(&i) {
                if v == 1.0 {
                    labels.push(i - label_range.start);
                } else if v != 0.0 {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "label '{}' has value {v}, expected 0 or 1",
                            attributes[i].name
                        ),
                    });
                }
            } else {
                features.push(v);
            }
        }
        samples.push(Sample::new(features, encode_labels(labels, l)?));
    }

    let label_names = attributes[label_range]
        .iter()
        .map(|a| a.name.clone())
        .collect();
    Dataset::new(
        samples,
        width - l,
        l,
        label_names,
        Some(ClassificationType::MultiLabel),
    )
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let rest = rest.trim();
    let (name, ty) = if let Some(q) = rest.chars().next().filter(|c| *c == '\'' || *c == '"') {
        let end = rest[1..].find(q).ok_or_else(|| Error::Parse {
            line,
            message: "unterminated quoted attribute name".into(),
        })?;
        (rest[1..1 + end].to_string(), rest[end + 2..].trim())
    } else {
        let mut it = rest.splitn(2, char::is_whitespace);
        let name = it.next().unwrap_or_default().to_string();
        (name, it.next().unwrap_or_default().trim())
    };
    if name.is_empty() || ty.is_empty() {
        return Err(Error::Parse {
            line,
            message: "attribute declaration needs a name and a type".into(),
        });
    }
    let numeric = match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => true,
        t if t.starts_with('{') => false,
        other => {
            return Err(Error::Schema {
                line,
                message: format!("unsupported attribute type '{other}'"),
            })
        }
    };
    Ok(Attribute { name, numeric })
}

fn parse_row(row: &str, width: usize, line: usize) -> Result<Vec<f64>> {
    if let Some(inner) = row.strip_prefix('{') {
        let inner = inner.strip_suffix('}').ok_or_else(|| Error::Parse {
            line,
            message: "sparse row is missing its closing '}'".into(),
        })?;
        let mut values = vec![0.0; width];
        for pair in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let mut it = pair.split_whitespace();
            let (idx, val) = match (it.next(), it.next(), it.next()) {
                (Some(i), Some(v), None) => (i, v),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("malformed sparse entry '{pair}'"),
                    })
                }
            };
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{idx}' is not an attribute index"),
            })?;
            if idx >= width {
                return Err(Error::Schema {
                    line,
                    message: format!("attribute index {idx} out of range for {width} attributes"),
                });
            }
            values[idx] = parse_number(val, line)?;
        }
        Ok(values)
    } else {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != width {
            return Err(Error::Schema {
                line,
                message: format!("expected {width} values, found {}", fields.len()),
            });
        }
        fields.iter().map(|f| parse_number(f, line)).collect()
    }
}
