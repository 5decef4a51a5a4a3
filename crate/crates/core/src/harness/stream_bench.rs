use crate::data::{shuffled_indices, Normalizer};
use crate::elm::HiddenLayer;
use crate::error::{Error, Result};
use crate::harness::kfold::fold_ranges;
use crate::harness::report::{
    DatasetSummary, EvaluationReport, FoldResult, RunMode, TrajectoryPoint,
};
use crate::harness::{evaluate, train_online, RunConfig};
use crate::types::Dataset;
use crate::types::Sample;

/// Single split: the first of `cfg.folds` shuffled folds is held out, the rest is
/// streamed. Records wall-clock training and testing time and a held-out
/// score trajectory at up to `cfg.checkpoints` evenly spaced points.
pub fn run_stream_benchmark(data: &Dataset, cfg: &RunConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let n = data.len();
    if n < cfg.folds {
        return Err(Error::config(format!(
            "{n} samples cannot be split into {} folds",
            cfg.folds
        )));
    }
    let order = shuffled_indices(n, cfg.shuffle_seed);
    let held = fold_ranges(n, cfg.folds)[0].clone();
    let pick =
        |idx: &[usize]| -> Vec<Sample> { idx.iter().map(|&i| data.samples()[i].clone()).collect() };
    let test_raw = data.with_samples(pick(&order[held.clone()]));
    let train_raw = data.with_samples(pick(&order[held.end..]));

    let norm = Normalizer::fit(&train_raw)?;
    let train = norm.apply(&train_raw)?;
    let test = norm.apply(&test_raw)?;

    let n0 = cfg.init_block_for(train.len())?;
    let ctype = data.effective_type();
    let labels = data.label_count();
    let updates = (train.len() - n0).div_ceil(cfg.chunk_size);
    let every = updates.div_ceil(cfg.checkpoints.max(1)).max(1);

    let mut trajectory = Vec::new();
    let mut step = 0usize;
    let layer = HiddenLayer::new(cfg.network_config(data, 0))?;
    let (model, train_time) = train_online(layer, &train, n0, cfg.chunk_size, |m| {
        let last = step == updates;
        if step.is_multiple_of(every) || last {
            let (eval, _) = evaluate(m, test.samples(), ctype, labels, cfg.fallback)?;
            trajectory.push(TrajectoryPoint {
                samples_seen: m.samples_seen(),
                metrics: eval.metrics,
            });
        }
        step += 1;
        Ok(())
    })?;

    let (eval, test_time) = evaluate(&model, test.samples(), ctype, labels, cfg.fallback)?;
    let tested = eval.samples;
    let fold = FoldResult {
        repetition: 0,
        fold: 0,
        train_size: train.len(),
        test_size: test.len(),
        metrics: eval.metrics,
        train_seconds: train_time.as_secs_f64(),
        test_seconds: test_time.as_secs_f64(),
        type_agreement: eval.agreements as f64 / tested as f64,
        fallback_rate: eval.fallbacks as f64 / tested as f64,
    };
    Ok(EvaluationReport::assemble(
        RunMode::StreamBench,
        cfg.clone(),
        DatasetSummary::of(data),
        vec![fold],
        eval.agreements,
        eval.fallbacks,
        tested,
        trajectory,
    ))
}
