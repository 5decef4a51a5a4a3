//! Decision rule turning raw outputs into a problem type, a label count and a label set.
//!
//! The positive-entry count `CT` of the thresholded output together with the
//! label count `L` identifies the problem type:
//!
//! | CT  | L   | type        | labels emitted |
//! |-----|-----|-------------|----------------|
//! | 1   | 2   | binary      | 1              |
//! | 1   | >2  | multi-class | 1              |
//! | >1  | >2  | multi-label | CT             |
//!
//! Every other `(CT, L)` pair is unlisted and resolved by [`FallbackPolicy`];
//! such predictions carry `fallback_used = true`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::elm::OnlineModel;
use crate::error::{Error, Result};
pub use crate::types::ClassificationType;

/// What to emit when the thresholded output has no positive entry on a
/// multi-label (or undeclared, `L > 2`) problem. Single-label problems always
/// fall back to the argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FallbackPolicy {
    Argmax,
    #[default]
    Empty,
}

impl fmt::Display for FallbackPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FallbackPolicy::Argmax => "argmax",
            FallbackPolicy::Empty => "empty",
        })
    }
}

impl FromStr for FallbackPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "argmax" => Ok(FallbackPolicy::Argmax),
            "empty" => Ok(FallbackPolicy::Empty),
            other => Err(Error::config(format!("unknown fallback policy '{other}'"))),
        }
    }
}

/// Per-sample type identification from `(CT, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub ctype: ClassificationType,
    /// False for `(CT, L)` pairs outside the identification table.
    pub listed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub raw: Vec<f64>,
    pub ct: usize,
    /// Type used to pick the labels: the declared type when known.
    pub ctype: ClassificationType,
    /// Type inferred from this sample's outputs alone.
    pub identified: Identification,
    pub belongingness: Vec<u8>,
    pub labels: BTreeSet<usize>,
    pub fallback_used: bool,
}

impl Prediction {
    /// True when the per-sample identification is a listed row matching `expected`.
    pub fn agrees_with(&self, expected: ClassificationType) -> bool {
        self.identified.listed && self.identified.ctype == expected
    }
}

/// `HS(y)` with `HS(0) = 0`.
pub fn heaviside(y: &[f64]) -> Result<Vec<u8>> {
    y.iter()
        .enumerate()
        .map(|(j, &v)| {
            if v.is_nan() {
                Err(Error::Numerical(format!("raw output {j} is NaN")))
            } else {
                Ok(u8::from(v > 0.0))
            }
        })
        .collect()
}

pub fn compute_ct(y: &[f64]) -> Result<usize> {
    Ok(heaviside(y)?.iter().filter(|&&b| b == 1).count())
}

pub fn identify_type(ct: usize, labels: usize) -> Result<Identification> {
    use ClassificationType::*;
    if labels < 2 {
        return Err(Error::config(format!(
            "label count must be at least 2, got {labels}"
        )));
    }
    let (ctype, listed) = match (ct, labels) {
        (1, 2) => (Binary, true),
        (1, _) => (MultiClass, true),
        (_, 2) => (Binary, false),
        (0, _) => (MultiClass, false),
        (_, _) => (MultiLabel, true),
    };
    Ok(Identification { ctype, listed })
}

/// Number of target labels implied by the type: one for single-label types, `CT` otherwise.
pub fn count_labels(ctype: ClassificationType, y: &[f64]) -> Result<usize> {
    match ctype {
        ClassificationType::Binary | ClassificationType::MultiClass => Ok(1),
        ClassificationType::MultiLabel => compute_ct(y),
    }
}

/// Index of the largest entry; ties go to the lowest index.
fn argmax(y: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in y.iter().enumerate().skip(1) {
        if v > y[best] {
            best = j;
        }
    }
    best
}

/// Applies the decision rule to one raw output vector.
pub fn classify_raw(
    raw: &[f64],
    policy: FallbackPolicy,
    declared: Option<ClassificationType>,
) -> Result<Prediction> {
    let belongingness = heaviside(raw)?;
    let ct = belongingness.iter().filter(|&&b| b == 1).count();
    let identified = identify_type(ct, raw.len())?;

    let ctype = match declared {
        Some(t) => t,
        None if ct == 0 && raw.len() > 2 && policy == FallbackPolicy::Empty => {
            ClassificationType::MultiLabel
        }
        None => identified.ctype,
    };

    let positives: BTreeSet<usize> = belongingness
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(j, _)| j)
        .collect();

    let (labels, fallback_used) = if ctype.is_single_label() {
        if ct == 1 {
            (positives, false)
        } else {
            (BTreeSet::from([argmax(raw)]), true)
        }
    } else if ct == 0 {
        match policy {
            FallbackPolicy::Argmax => (BTreeSet::from([argmax(raw)]), true),
            FallbackPolicy::Empty => (BTreeSet::new(), true),
        }
    } else {
        (positives, false)
    };

    Ok(Prediction {
        raw: raw.to_vec(),
        ct,
        ctype,
        identified,
        belongingness,
        labels,
        fallback_used,
    })
}

/// Runs the network on one feature vector and applies the decision rule.
pub fn classify(
    model: &OnlineModel,
    features: &[f64],
    policy: FallbackPolicy,
    declared: Option<ClassificationType>,
) -> Result<Prediction> {
    let x = DMatrix::from_row_slice(1, features.len(), features);
    let raw = model.predict_raw(&x)?;
    let row: Vec<f64> = raw.row(0).iter().copied().collect();
    classify_raw(&row, policy, declared)
}

/// Row-wise [`classify`] over a feature matrix, sharing one hidden-layer pass.
pub fn classify_batch(
    model: &OnlineModel,
    x: &DMatrix<f64>,
    policy: FallbackPolicy,
    declared: Option<ClassificationType>,
) -> Result<Vec<Prediction>> {
    let raw = model.predict_raw(x)?;
    let mut row = vec![0.0; raw.ncols()];
    (0..raw.nrows())
        .map(|i| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = raw[(i, j)];
            }
            classify_raw(&row, policy, declared)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassificationType::*;

    #[test]
    fn heaviside_sign_patterns() {
        assert_eq!(heaviside(&[0.7, -0.3]).unwrap(), vec![1, 0]);
        assert_eq!(heaviside(&[0.0, 0.0, 0.0]).unwrap(), vec![0, 0, 0]);
        assert_eq!(
            heaviside(&[-0.1, 0.5, 0.2, -0.9]).unwrap(),
            vec![0, 1, 1, 0]
        );
        assert!(matches!(
            heaviside(&[0.1, f64::NAN]),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn ct_counts_positive_entries() {
        assert_eq!(compute_ct(&[0.7, -0.3]).unwrap(), 1);
        assert_eq!(compute_ct(&[0.5, 0.2, -0.1]).unwrap(), 2);
        assert_eq!(compute_ct(&[-1.0, -2.0, -3.0]).unwrap(), 0);
    }

    #[test]
    fn identification_table_rows() {
        assert_eq!(
            identify_type(1, 2).unwrap(),
            Identification {
                ctype: Binary,
                listed: true
            }
        );
        assert_eq!(
            identify_type(1, 5).unwrap(),
            Identification {
                ctype: MultiClass,
                listed: true
            }
        );
        assert_eq!(
            identify_type(3, 14).unwrap(),
            Identification {
                ctype: MultiLabel,
                listed: true
            }
        );
        assert!(!identify_type(0, 2).unwrap().listed);
        assert!(!identify_type(0, 7).unwrap().listed);
        assert_eq!(
            identify_type(2, 2).unwrap(),
            Identification {
                ctype: Binary,
                listed: false
            }
        );
        assert!(identify_type(1, 1).is_err());
    }

    #[test]
    fn label_count_table_rows() {
        assert_eq!(count_labels(Binary, &[0.3, -2.0]).unwrap(), 1);
        assert_eq!(count_labels(MultiClass, &[0.3, 0.4, 0.5]).unwrap(), 1);
        assert_eq!(count_labels(MultiLabel, &[0.5, 0.2, -0.1, 0.8]).unwrap(), 3);
    }

    #[test]
    fn classify_binary_positive() {
        let p = classify_raw(&[0.9, -0.8], FallbackPolicy::Empty, None).unwrap();
        assert_eq!(p.ctype, Binary);
        assert_eq!(p.labels, BTreeSet::from([0]));
        assert!(!p.fallback_used);
    }

    #[test]
    fn all_negative_multiclass_falls_back_to_argmax() {
        for policy in [FallbackPolicy::Empty, FallbackPolicy::Argmax] {
            let p = classify_raw(&[-0.2, -0.6, -0.9], policy, Some(MultiClass)).unwrap();
            assert_eq!(p.labels, BTreeSet::from([0]));
            assert!(p.fallback_used);
            assert_eq!(p.ct, 0);
        }
    }

    #[test]
    fn argmax_tie_goes_to_lowest_index() {
        let p = classify_raw(&[0.3, 0.3, -1.0], FallbackPolicy::Argmax, Some(MultiClass)).unwrap();
        assert_eq!(p.labels, BTreeSet::from([0]));
        assert!(p.fallback_used);
        assert_eq!(p.ct, 2);
    }

    #[test]
    fn two_positives_with_two_labels_is_binary_fallback() {
        let p = classify_raw(&[0.2, 0.6], FallbackPolicy::Empty, None).unwrap();
        assert_eq!(p.ctype, Binary);
        assert!(!p.identified.listed);
        assert_eq!(p.labels, BTreeSet::from([1]));
        assert!(p.fallback_used);
    }

    #[test]
    fn multilabel_empty_and_argmax_policies() {
        let raw = [-0.5, -0.1, -0.3, -0.9];
        let e = classify_raw(&raw, FallbackPolicy::Empty, Some(MultiLabel)).unwrap();
        assert!(e.labels.is_empty() && e.fallback_used);
        let a = classify_raw(&raw, FallbackPolicy::Argmax, Some(MultiLabel)).unwrap();
        assert_eq!(a.labels, BTreeSet::from([1]));
        assert!(a.fallback_used);
        let u = classify_raw(&raw, FallbackPolicy::Empty, None).unwrap();
        assert_eq!(u.ctype, MultiLabel);
        assert!(u.labels.is_empty());
    }

    #[test]
    fn multilabel_positive_entries_become_labels() {
        let p = classify_raw(
            &[0.5, 0.2, -0.1, 0.8],
            FallbackPolicy::Empty,
            Some(MultiLabel),
        )
        .unwrap();
        assert_eq!(p.labels, BTreeSet::from([0, 1, 3]));
        assert_eq!(p.belongingness, vec![1, 1, 0, 1]);
        assert!(!p.fallback_used);
        assert!(p.agrees_with(MultiLabel));
    }

    #[test]
    fn declared_type_overrides_identification() {
        let p = classify_raw(&[0.5, 0.2, -0.1], FallbackPolicy::Empty, Some(MultiClass)).unwrap();
        assert_eq!(p.ctype, MultiClass);
        assert_eq!(p.identified.ctype, MultiLabel);
        assert_eq!(p.labels, BTreeSet::from([0]));
        assert!(p.fallback_used);
        assert!(!p.agrees_with(MultiClass));
    }

    #[test]
    fn policy_parsing() {
        assert_eq!(
            "ARGMAX".parse::<FallbackPolicy>().unwrap(),
            FallbackPolicy::Argmax
        );
        assert!("top3".parse::<FallbackPolicy>().is_err());
    }
}
