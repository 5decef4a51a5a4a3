//! Accuracy for single-label problems; hamming loss and example-based
//! set metrics for multi-label problems.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleLabelResult {
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiLabelResult {
    pub hamming_loss: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    /// Harmonic mean of the averaged precision and recall.
    pub f1: f64,
    /// Mean over samples of the per-sample F1 `2|Y n Z| / (|Y| + |Z|)`.
    pub f1_per_example: f64,
}

/// Example-based scores averaged over samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleScores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f1_per_example: f64,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::shape(format!("{a} true entries vs {b} predicted")));
    }
    if a == 0 {
        return Err(Error::shape("no samples to score"));
    }
    Ok(())
}

pub fn single_label_accuracy(truth: &[usize], pred: &[usize]) -> Result<f64> {
    check_lengths(truth.len(), pred.len())?;
    let correct = truth.iter().zip(pred).filter(|(t, p)| t == p).count();
    Ok(correct as f64 / truth.len() as f64)
}

/// Fraction of mismatched sample-label pairs.
pub fn hamming_loss(truth: &[Vec<bool>], pred: &[Vec<bool>]) -> Result<f64> {
    check_lengths(truth.len(), pred.len())?;
    let width = truth[0].len();
    if width == 0 {
        return Err(Error::shape("zero-width label matrix"));
    }
    let mut mismatches = 0usize;
    for (i, (t, p)) in truth.iter().zip(pred).enumerate() {
        if t.len() != width || p.len() != width {
            return Err(Error::shape(format!(
                "row {i} has {} true / {} predicted labels, expected {width}",
                t.len(),
                p.len()
            )));
        }
        mismatches += t.iter().zip(p).filter(|(a, b)| a != b).count();
    }
    Ok(mismatches as f64 / (truth.len() * width) as f64)
}

/// Hamming loss between label sets over a universe of `labels` labels.
pub fn hamming_loss_sets(
    truth: &[BTreeSet<usize>],
    pred: &[BTreeSet<usize>],
    labels: usize,
) -> Result<f64> {
    check_lengths(truth.len(), pred.len())?;
    if labels == 0 {
        return Err(Error::shape("zero-width label matrix"));
    }
    if let Some(&j) = truth
        .iter()
        .chain(pred)
        .flat_map(|s| s.iter())
        .find(|&&j| j >= labels)
    {
        return Err(Error::Encoding { index: j, labels });
    }
    let mismatches: usize = truth
        .iter()
        .zip(pred)
        .map(|(t, p)| t.symmetric_difference(p).count())
        .sum();
    Ok(mismatches as f64 / (truth.len() * labels) as f64)
}

/// `num / den`, with `0/0` scored as 1 (both sets empty) and `x/0` as 0.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        if num == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        num as f64 / den as f64
    }
}

/// Example-based accuracy, precision, recall and F1, averaged over samples.
///
/// Empty-set conventions: when both sets are empty every score is 1 for that
/// sample; an empty prediction against a non-empty truth scores 0 precision.
pub fn example_based_metrics(
    truth: &[BTreeSet<usize>],
    pred: &[BTreeSet<usize>],
) -> Result<ExampleScores> {
    check_lengths(truth.len(), pred.len())?;
    let (mut acc, mut prec, mut rec, mut f1e) = (0.0, 0.0, 0.0, 0.0);
    for (y, z) in truth.iter().zip(pred) {
        let both_empty = y.is_empty() && z.is_empty();
        let inter = y.intersection(z).count();
        let union = y.len() + z.len() - inter;
        if both_empty {
            acc += 1.0;
            prec += 1.0;
            rec += 1.0;
            f1e += 1.0;
        } else {
            acc += ratio(inter, union);
            prec += if z.is_empty() {
                0.0
            } else {
                ratio(inter, z.len())
            };
            rec += if y.is_empty() {
                0.0
            } else {
                ratio(inter, y.len())
            };
            f1e += ratio(2 * inter, y.len() + z.len());
        }
    }
    let n = truth.len() as f64;
    let (acc, prec, rec, f1e) = (acc / n, prec / n, rec / n, f1e / n);
    let f1 = if prec + rec > 0.0 {
        2.0 * prec * rec / (prec + rec)
    } else {
        0.0
    };
    Ok(ExampleScores {
        accuracy: acc,
        precision: prec,
        recall: rec,
        f1,
        f1_per_example: f1e,
    })
}

pub fn multi_label_metrics(
    truth: &[BTreeSet<usize>],
    pred: &[BTreeSet<usize>],
    labels: usize,
) -> Result<MultiLabelResult> {
    let hamming_loss = hamming_loss_sets(truth, pred, labels)?;
    let e = example_based_metrics(truth, pred)?;
    Ok(MultiLabelResult {
        hamming_loss,
        accuracy: e.accuracy,
        precision: e.precision,
        recall: e.recall,
        f1: e.f1,
        f1_per_example: e.f1_per_example,
    })
}

/// Sample mean and (n-1) standard deviation; the deviation of a single value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn scores(t: &[BTreeSet<usize>], p: &[BTreeSet<usize>]) -> (f64, f64, f64, f64, f64) {
        let e = example_based_metrics(t, p).unwrap();
        (e.accuracy, e.precision, e.recall, e.f1, e.f1_per_example)
    }

    #[test]
    fn accuracy_cases() {
        assert_eq!(single_label_accuracy(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(single_label_accuracy(&[0, 1, 2], &[1, 2, 0]).unwrap(), 0.0);
        assert_eq!(
            single_label_accuracy(&[0, 1, 2, 1], &[0, 1, 2, 0]).unwrap(),
            0.75
        );
        assert!(matches!(
            single_label_accuracy(&[0], &[0, 1]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn hamming_cases() {
        let a = vec![vec![true, false, true], vec![false, false, true]];
        let not_a: Vec<Vec<bool>> = a.iter().map(|r| r.iter().map(|b| !b).collect()).collect();
        assert_eq!(hamming_loss(&a, &a).unwrap(), 0.0);
        assert_eq!(hamming_loss(&a, &not_a).unwrap(), 1.0);
        let t = vec![vec![true, false, true, false]];
        let p = vec![vec![true, true, false, false]];
        assert_eq!(hamming_loss(&t, &p).unwrap(), 0.5);
        assert!(hamming_loss(&t, &[vec![true]]).is_err());
        assert!(hamming_loss(&t, &a).is_err());
    }

    #[test]
    fn hamming_on_sets_matches_matrix_form() {
        let t = [set(&[0, 2]), set(&[])];
        let p = [set(&[0, 1]), set(&[3])];
        assert_eq!(hamming_loss_sets(&t, &p, 4).unwrap(), 3.0 / 8.0);
        assert!(hamming_loss_sets(&t, &p, 3).is_err());
    }

    #[test]
    fn example_based_set_arithmetic() {
        let e = example_based_metrics(&[set(&[0, 1])], &[set(&[1, 2])]).unwrap();
        assert!((e.accuracy - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            (e.precision, e.recall, e.f1, e.f1_per_example),
            (0.5, 0.5, 0.5, 0.5)
        );
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let t = [set(&[0, 3]), set(&[1])];
        assert_eq!(scores(&t, &t), (1.0, 1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn empty_set_conventions() {
        assert_eq!(scores(&[set(&[0])], &[set(&[])]), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(scores(&[set(&[])], &[set(&[])]), (1.0, 1.0, 1.0, 1.0, 1.0));
        let (a, p, r, _, _) = scores(&[set(&[])], &[set(&[2])]);
        assert_eq!((a, p, r), (0.0, 0.0, 0.0));
    }

    #[test]
    fn mean_std_sample_deviation() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[0.7]), (0.7, 0.0));
    }
}
