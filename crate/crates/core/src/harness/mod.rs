//! Cross-validation and streaming benchmarks with timing and structured reports.

mod kfold;
mod report;
mod stream_bench;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::classifier::{classify_batch, FallbackPolicy, Prediction};
use crate::data::{chunk_stream, FormatSpec, Normalizer};
use crate::elm::{Activation, HiddenLayer, NetworkConfig, OnlineModel, DEFAULT_RIDGE};
use crate::error::{Error, Result};
use crate::metrics::{multi_label_metrics, single_label_accuracy};
use crate::persist::SavedModel;
use crate::types::{feature_matrix, target_matrix, ClassificationType, Dataset, Sample};

pub use kfold::{fold_ranges, run_kfold};
pub use report::{
    DatasetSummary, EvaluationReport, FoldResult, MetricSummary, RunMode, TrajectoryPoint,
    REPORT_SCHEMA_VERSION,
};
pub use stream_bench::run_stream_benchmark;

/// Where the data came from; echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSource {
    pub path: PathBuf,
    pub format: FormatSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: Option<DataSource>,
    pub n_hidden: usize,
    pub activation: Activation,
    pub ridge: f64,
    /// Seed of the hidden layer; repetition `r` uses `seed + r`.
    pub seed: u64,
    /// Initial block size; `None` means `min(2 * n_hidden, training size)`.
    pub init_block: Option<usize>,
    pub chunk_size: usize,
    pub folds: usize,
    pub repetitions: usize,
    /// Seed of the sample shuffle; repetition `r` uses `shuffle_seed + r`.
    pub shuffle_seed: u64,
    pub fallback: FallbackPolicy,
    /// Run folds on the rayon pool. Results are identical either way.
    pub parallel: bool,
    /// Number of evaluation points along a streaming run.
    pub checkpoints: usize,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(n_hidden: usize) -> Self {
        Self {
            source: None,
            n_hidden,
            activation: Activation::Sigmoid,
            ridge: DEFAULT_RIDGE,
            seed: 0,
            init_block: None,
            chunk_size: 1,
            folds: 10,
            repetitions: 1,
            shuffle_seed: 0,
            fallback: FallbackPolicy::default(),
            parallel: false,
            checkpoints: 20,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::config(format!(
                "need at least 2 folds, got {}",
                self.folds
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.n_hidden == 0 {
            return Err(Error::config("hidden neuron count must be at least 1"));
        }
        if self.chunk_size == 0 {
            return Err(Error::config("chunk size must be at least 1"));
        }
        if self.init_block == Some(0) {
            return Err(Error::config("initial block size must be at least 1"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::config("ridge must be a finite nonnegative number"));
        }
        Ok(())
    }

    pub fn network_config(&self, data: &Dataset, repetition: usize) -> NetworkConfig {
        NetworkConfig::new(self.n_hidden, data.feature_dim(), data.label_count())
            .with_activation(self.activation)
            .with_ridge(self.ridge)
            .with_seed(self.seed.wrapping_add(repetition as u64))
    }

    fn init_block_for(&self, train_len: usize) -> Result<usize> {
        match self.init_block {
            Some(n0) if n0 > train_len => Err(Error::config(format!(
                "training split has {train_len} samples but the initial block needs {n0}; \
                 use a smaller initial block"
            ))),
            Some(n0) => Ok(n0),
            None => Ok((2 * self.n_hidden).min(train_len)),
        }
    }
}

/// Trains on `train` in arrival order: an initial block, then chunks.
///
/// `observe` is called after the initial block and after every chunk with the
/// current model; time spent inside it is excluded from the returned duration.
pub(crate) fn train_online(
    layer: HiddenLayer,
    train: &Dataset,
    n0: usize,
    chunk_size: usize,
    mut observe: impl FnMut(&OnlineModel) -> Result<()>,
) -> Result<(OnlineModel, Duration)> {
    let initial = &train.samples()[..n0];
    let x0 = feature_matrix(initial);
    let y0 = target_matrix(initial)?;
    let start = Instant::now();
    let mut model = OnlineModel::init_block(layer, &x0, &y0)?;
    let mut elapsed = start.elapsed();
    observe(&model)?;

    if n0 < train.len() {
        let stream = chunk_stream(train, n0, chunk_size, None)?;
        for chunk in stream.chunks() {
            let x = feature_matrix(chunk);
            let y = target_matrix(chunk)?;
            let start = Instant::now();
            model.sequential_update(&x, &y)?;
            elapsed += start.elapsed();
            observe(&model)?;
        }
    }
    Ok((model, elapsed))
}

/// Fits a normalizer on all of `data` and trains one model on it in file order.
///
/// Returns the model bundled for saving, plus the training time.
pub fn train_model(data: &Dataset, cfg: &RunConfig) -> Result<(SavedModel, Duration)> {
    cfg.validate()?;
    let norm = Normalizer::fit(data)?;
    let train = norm.apply(data)?;
    let n0 = cfg.init_block_for(train.len())?;
    let layer = HiddenLayer::new(cfg.network_config(data, 0))?;
    let (model, elapsed) = train_online(layer, &train, n0, cfg.chunk_size, |_| Ok(()))?;
    let saved = SavedModel {
        model,
        normalizer: Some(norm),
        declared_type: Some(data.effective_type()),
        label_names: data.label_names().to_vec(),
    };
    Ok((saved, elapsed))
}

/// Scores of one evaluation pass.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Evaluation {
    pub metrics: BTreeMap<String, f64>,
    pub agreements: usize,
    pub fallbacks: usize,
    pub samples: usize,
}

pub(crate) fn evaluate(
    model: &OnlineModel,
    test: &[Sample],
    ctype: ClassificationType,
    labels: usize,
    policy: FallbackPolicy,
) -> Result<(Evaluation, Duration)> {
    let x = feature_matrix(test);
    let start = Instant::now();
    let preds = classify_batch(model, &x, policy, Some(ctype))?;
    let elapsed = start.elapsed();
    Ok((score(&preds, test, ctype, labels)?, elapsed))
}

fn score(
    preds: &[Prediction],
    test: &[Sample],
    ctype: ClassificationType,
    labels: usize,
) -> Result<Evaluation> {
    let truth: Vec<_> = test
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.labels
                .as_ref()
                .map(|lv| lv.positives())
                .ok_or_else(|| Error::shape(format!("test sample {i} has no labels")))
        })
        .collect::<Result<_>>()?;
    let predicted: Vec<_> = preds.iter().map(|p| p.labels.clone()).collect();

    let mut metrics = BTreeMap::new();
    if ctype.is_single_label() {
        let first =
            |s: &std::collections::BTreeSet<usize>| s.iter().next().copied().unwrap_or(usize::MAX);
        let t: Vec<usize> = truth.iter().map(first).collect();
        let p: Vec<usize> = predicted.iter().map(first).collect();
        metrics.insert("accuracy".to_string(), single_label_accuracy(&t, &p)?);
    } else {
        let m = multi_label_metrics(&truth, &predicted, labels)?;
        metrics.insert("hamming_loss".to_string(), m.hamming_loss);
        metrics.insert("accuracy".to_string(), m.accuracy);
        metrics.insert("precision".to_string(), m.precision);
        metrics.insert("recall".to_string(), m.recall);
        metrics.insert("f1".to_string(), m.f1);
        metrics.insert("f1_per_example".to_string(), m.f1_per_example);
    }
    Ok(Evaluation {
        metrics,
        agreements: preds.iter().filter(|p| p.agrees_with(ctype)).count(),
        fallbacks: preds.iter().filter(|p| p.fallback_used).count(),
        samples: preds.len(),
    })
}
