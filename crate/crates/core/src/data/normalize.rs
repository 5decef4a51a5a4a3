use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Dataset;

/// Per-feature affine map sending the training min to -1 and max to +1.
///
/// Constant training features map to 0. Values outside the training range
/// extrapolate linearly and are not clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl Normalizer {
    pub fn fit(train: &Dataset) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::config("cannot fit a normalizer on an empty dataset"));
        }
        let n = train.feature_dim();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for s in train.samples() {
            for (j, &v) in s.features.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn from_bounds(mins: Vec<f64>, maxs: Vec<f64>) -> Result<Self> {
        if mins.len() != maxs.len() {
            return Err(Error::shape(format!(
                "{} minima vs {} maxima",
                mins.len(),
                maxs.len()
            )));
        }
        if mins
            .iter()
            .zip(&maxs)
            .any(|(a, b)| a.is_nan() || b.is_nan() || a > b)
        {
            return Err(Error::config("normalizer minimum exceeds maximum"));
        }
        Ok(Self { mins, maxs })
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    pub fn dim(&self) -> usize {
        self.mins.len()
    }

    pub fn apply_features(&self, features: &mut [f64]) {
        for ((v, &lo), &hi) in features.iter_mut().zip(&self.mins).zip(&self.maxs) {
            *v = if hi > lo {
                2.0 * (*v - lo) / (hi - lo) - 1.0
            } else {
                0.0
            };
        }
    }

    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        if d.feature_dim() != self.dim() {
            return Err(Error::shape(format!(
                "dataset has {} features, normalizer was fitted on {}",
                d.feature_dim(),
                self.dim()
            )));
        }
        let samples = d
            .samples()
            .iter()
            .map(|s| {
                let mut s = s.clone();
                self.apply_features(&mut s.features);
                s
            })
            .collect();
        Ok(d.with_samples(samples))
    }
}

/// Fits on `train` only and applies the same map to `train` and every other split.
pub fn fit_apply_normalizer(
    train: &Dataset,
    others: &[&Dataset],
) -> Result<(Normalizer, Dataset, Vec<Dataset>)> {
    let norm = Normalizer::fit(train)?;
    let train_n = norm.apply(train)?;
    let others_n = others
        .iter()
        .map(|d| norm.apply(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((norm, train_n, others_n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{encode_labels, Sample};

    fn ds(values: &[f64]) -> Dataset {
        let samples = values
            .iter()
            .map(|&v| Sample::new(vec![v], encode_labels([0], 2).unwrap()))
            .collect();
        Dataset::new(samples, 1, 2, vec!["a".into(), "b".into()], None).unwrap()
    }

    #[test]
    fn affine_endpoints_and_extension() {
        let (_, train, others) =
            fit_apply_normalizer(&ds(&[0.0, 10.0]), &[&ds(&[5.0, 20.0])]).unwrap();
        assert_eq!(train.samples()[0].features, vec![-1.0]);
        assert_eq!(train.samples()[1].features, vec![1.0]);
        assert_eq!(others[0].samples()[0].features, vec![0.0]);
        assert_eq!(others[0].samples()[1].features, vec![3.0]);
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let (_, train, others) =
            fit_apply_normalizer(&ds(&[7.0, 7.0, 7.0]), &[&ds(&[-3.0])]).unwrap();
        assert!(train.samples().iter().all(|s| s.features == vec![0.0]));
        assert_eq!(others[0].samples()[0].features, vec![0.0]);
    }

    #[test]
    fn fitted_on_train_only() {
        let a = Normalizer::fit(&ds(&[0.0, 1.0])).unwrap();
        let b = Normalizer::fit(&ds(&[5.0, 9.0])).unwrap();
        assert_ne!(a, b);
    }
}
