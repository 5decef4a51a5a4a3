#![allow(dead_code)]

use nalgebra::DMatrix;
use oselm::types::encode_labels;
use oselm::{Activation, Dataset, HiddenLayer, NetworkConfig, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..=1.0))
}

/// Random bipolar targets with at least one positive label per row.
pub fn bipolar_targets(rng: &mut ChaCha8Rng, rows: usize, labels: usize) -> DMatrix<f64> {
    let mut y = DMatrix::from_element(rows, labels, -1.0);
    for i in 0..rows {
        y[(i, rng.random_range(0..labels))] = 1.0;
        for j in 0..labels {
            if rng.random_bool(0.2) {
                y[(i, j)] = 1.0;
            }
        }
    }
    y
}

pub struct Problem {
    pub layer: HiddenLayer,
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
}

pub fn problem(
    seed: u64,
    samples: usize,
    n: usize,
    hidden: usize,
    labels: usize,
    ridge: f64,
) -> Problem {
    let mut r = rng(seed);
    let x = uniform(&mut r, samples, n);
    let y = bipolar_targets(&mut r, samples, labels);
    let cfg = NetworkConfig::new(hidden, n, labels)
        .with_activation(Activation::Sigmoid)
        .with_ridge(ridge)
        .with_seed(seed ^ 0x5eed);
    Problem {
        layer: HiddenLayer::new(cfg).unwrap(),
        x,
        y,
    }
}

pub fn rows(m: &DMatrix<f64>, range: std::ops::Range<usize>) -> DMatrix<f64> {
    m.rows(range.start, range.len()).into_owned()
}

pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Single-label dataset of `classes` well-separated clusters.
pub fn clusters(samples: usize, dim: usize, classes: usize, seed: u64) -> Dataset {
    oselm::synthetic::blobs(samples, dim, classes, 0.3, seed).unwrap()
}

/// Dataset whose rows come straight from `x`, with one label per row taken from `y`'s first positive.
pub fn dataset_from(x: &DMatrix<f64>, classes: &[usize], labels: usize) -> Dataset {
    let samples = (0..x.nrows())
        .map(|i| {
            Sample::new(
                x.row(i).iter().copied().collect(),
                encode_labels([classes[i]], labels).unwrap(),
            )
        })
        .collect();
    let names = (0..labels).map(|j| j.to_string()).collect();
    Dataset::new(samples, x.ncols(), labels, names, None).unwrap()
}

/// Solves `(H^T H + ridge I) B = H^T Y` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn normal_equations_oracle(h: &DMatrix<f64>, y: &DMatrix<f64>, ridge: f64) -> Vec<Vec<f64>> {
    let k = h.ncols();
    let l = y.ncols();
    let mut a = vec![vec![0.0; k + l]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..h.nrows()).map(|r| h[(r, i)] * h[(r, j)]).sum();
        }
        a[i][i] += ridge;
        for c in 0..l {
            a[i][k + c] = (0..h.nrows()).map(|r| h[(r, i)] * y[(r, c)]).sum();
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..k + l {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..k)
        .map(|i| (0..l).map(|c| a[i][k + c] / a[i][i]).collect())
        .collect()
}
