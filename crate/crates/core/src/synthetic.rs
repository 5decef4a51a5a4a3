//! Seeded synthetic datasets for benchmarks, demos and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{encode_labels, ClassificationType, Dataset, Sample};

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn names(l: usize) -> Vec<String> {
    (0..l).map(|j| format!("label{j}")).collect()
}

/// Single-label data: each class has a random centre in `[-1, 1]^dim` and samples
/// are the centre plus uniform noise of half-width `noise`.
pub fn blobs(samples: usize, dim: usize, classes: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if classes < 2 {
        return Err(Error::Config("need at least 2 classes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres: Vec<Vec<f64>> = (0..classes).map(|_| uniform_vec(&mut rng, dim)).collect();
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let c = rng.random_range(0..classes);
        let x = centres[c]
            .iter()
            .map(|m| m + noise * rng.random_range(-1.0..=1.0))
            .collect();
        out.push(Sample::new(x, encode_labels([c], classes)?));
    }
    let declared = if classes == 2 {
        ClassificationType::Binary
    } else {
        ClassificationType::MultiClass
    };
    Dataset::new(out, dim, classes, names(classes), Some(declared))
}

/// Multi-label data from a known linear map.
///
/// Label `j` is on when `w_j . x > t_j`, with `w_j` and `x` uniform on the cube
/// and `t_j` the empirical quantile giving each label probability
/// `cardinality / labels`. Candidate points closer than `margin * |w_j|` to any
/// decision boundary are discarded, so the data are linearly separable with
/// that margin.
pub fn linear_multilabel(
    samples: usize,
    dim: usize,
    labels: usize,
    cardinality: f64,
    margin: f64,
    seed: u64,
) -> Result<Dataset> {
    if labels < 2 || !(0.0 < cardinality && cardinality < labels as f64) {
        return Err(Error::Config(format!(
            "cardinality {cardinality} must lie strictly between 0 and {labels}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Vec<f64>> = (0..labels).map(|_| uniform_vec(&mut rng, dim)).collect();
    let norms: Vec<f64> = weights
        .iter()
        .map(|w| w.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let score = |w: &[f64], x: &[f64]| -> f64 { w.iter().zip(x).map(|(a, b)| a * b).sum() };

    let pilot: Vec<Vec<f64>> = (0..4000).map(|_| uniform_vec(&mut rng, dim)).collect();
    let p_on = cardinality / labels as f64;
    let thresholds: Vec<f64> = weights
        .iter()
        .map(|w| {
            let mut s: Vec<f64> = pilot.iter().map(|x| score(w, x)).collect();
            s.sort_by(f64::total_cmp);
            s[((1.0 - p_on) * (s.len() - 1) as f64).round() as usize]
        })
        .collect();

    let mut out = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    while out.len() < samples {
        attempts += 1;
        if attempts > samples * 1000 {
            return Err(Error::Config(
                "margin too wide to draw enough samples".into(),
            ));
        }
        let x = uniform_vec(&mut rng, dim);
        let mut set = Vec::new();
        let mut near = false;
        for j in 0..labels {
            let d = score(&weights[j], &x) - thresholds[j];
            if d.abs() < margin * norms[j] {
                near = true;
                break;
            }
            if d > 0.0 {
                set.push(j);
            }
        }
        if !near {
            out.push(Sample::new(x, encode_labels(set, labels)?));
        }
    }
    Dataset::new(
        out,
        dim,
        labels,
        names(labels),
        Some(ClassificationType::MultiLabel),
    )
}
