use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::harness::RunConfig;
use crate::metrics::mean_std;
use crate::types::{dataset_stats, ClassificationType, Dataset};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Kfold,
    StreamBench,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Self {
        let (mean, std) = mean_std(values);
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub samples: usize,
    pub feature_dim: usize,
    pub label_count: usize,
    pub classification_type: ClassificationType,
    pub cardinality: f64,
    pub density: f64,
}

impl DatasetSummary {
    pub fn of(d: &Dataset) -> Self {
        let (cardinality, density) = dataset_stats(d)
            .map(|s| (s.cardinality, s.density))
            .unwrap_or((f64::NAN, f64::NAN));
        Self {
            samples: d.len(),
            feature_dim: d.feature_dim(),
            label_count: d.label_count(),
            classification_type: d.effective_type(),
            cardinality,
            density,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repetition: usize,
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub metrics: BTreeMap<String, f64>,
    pub train_seconds: f64,
    pub test_seconds: f64,
    /// Share of test samples whose per-sample identification matched the dataset type.
    pub type_agreement: f64,
    pub fallback_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub samples_seen: u64,
    pub metrics: BTreeMap<String, f64>,
}

/// Machine-readable result of a run. Serialised as JSON; see `docs/report-schema.md`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub mode: RunMode,
    pub config: RunConfig,
    pub dataset: DatasetSummary,
    pub folds: Vec<FoldResult>,
    pub summary: BTreeMap<String, MetricSummary>,
    pub train_seconds: MetricSummary,
    pub test_seconds: MetricSummary,
    pub type_agreement_rate: f64,
    pub fallback_rate: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectory: Vec<TrajectoryPoint>,
}

impl EvaluationReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        mode: RunMode,
        config: RunConfig,
        dataset: DatasetSummary,
        folds: Vec<FoldResult>,
        agreements: usize,
        fallbacks: usize,
        tested: usize,
        trajectory: Vec<TrajectoryPoint>,
    ) -> Self {
        let mut summary = BTreeMap::new();
        if let Some(first) = folds.first() {
            for name in first.metrics.keys() {
                let values: Vec<f64> = folds.iter().map(|f| f.metrics[name]).collect();
                summary.insert(name.clone(), MetricSummary::of(&values));
            }
        }
        let train: Vec<f64> = folds.iter().map(|f| f.train_seconds).collect();
        let test: Vec<f64> = folds.iter().map(|f| f.test_seconds).collect();
        let rate = |k: usize| {
            if tested == 0 {
                0.0
            } else {
                k as f64 / tested as f64
            }
        };
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            mode,
            config,
            dataset,
            summary,
            train_seconds: MetricSummary::of(&train),
            test_seconds: MetricSummary::of(&test),
            type_agreement_rate: rate(agreements),
            fallback_rate: rate(fallbacks),
            folds,
            trajectory,
        }
    }

    /// Metric name used for the headline number of this dataset type.
    pub fn primary_metric(&self) -> &'static str {
        if self.dataset.classification_type.is_single_label() {
            "accuracy"
        } else {
            "hamming_loss"
        }
    }

    /// Copy with wall-clock fields zeroed; everything left is a function of config and data.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for f in &mut r.folds {
            f.train_seconds = 0.0;
            f.test_seconds = 0.0;
        }
        r.train_seconds = MetricSummary {
            mean: 0.0,
            std: 0.0,
        };
        r.test_seconds = MetricSummary {
            mean: 0.0,
            std: 0.0,
        };
        r
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Human-readable summary table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let d = &self.dataset;
        let _ = writeln!(
            out,
            "{} | N={} n={} L={} | cardinality {:.2} density {:.3}",
            d.classification_type,
            d.samples,
            d.feature_dim,
            d.label_count,
            d.cardinality,
            d.density
        );
        let c = &self.config;
        let _ = writeln!(
            out,
            "hidden {} ({}) ridge {:e} | N0 {} chunk {} | folds {} x{} | seed {} shuffle {} | fallback {}",
            c.n_hidden,
            c.activation,
            c.ridge,
            c.init_block.map_or("auto".to_string(), |v| v.to_string()),
            c.chunk_size,
            c.folds,
            c.repetitions,
            c.seed,
            c.shuffle_seed,
            c.fallback
        );
        let _ = writeln!(out, "{:<16} {:>10} {:>10}", "metric", "mean", "std");
        for (name, s) in &self.summary {
            let _ = writeln!(out, "{name:<16} {:>10.4} {:>10.4}", s.mean, s.std);
        }
        let _ = writeln!(
            out,
            "{:<16} {:>10.5} {:>10.5}",
            "train seconds", self.train_seconds.mean, self.train_seconds.std
        );
        let _ = writeln!(
            out,
            "{:<16} {:>10.5} {:>10.5}",
            "test seconds", self.test_seconds.mean, self.test_seconds.std
        );
        let _ = writeln!(
            out,
            "type agreement {:.4} | fallback rate {:.4}",
            self.type_agreement_rate, self.fallback_rate
        );
        if !self.trajectory.is_empty() {
            let key = self.primary_metric();
            let _ = writeln!(out, "{:>12} {:>12}", "seen", key);
            for p in &self.trajectory {
                let _ = writeln!(
                    out,
                    "{:>12} {:>12.4}",
                    p.samples_seen,
                    p.metrics.get(key).copied().unwrap_or(f64::NAN)
                );
            }
        }
        out
    }
}
