use std::ops::Range;

use rayon::prelude::*;

use crate::data::{shuffled_indices, Normalizer};
use crate::elm::HiddenLayer;
use crate::error::{Error, Result};
use crate::harness::report::{DatasetSummary, EvaluationReport, FoldResult, RunMode};
use crate::harness::{evaluate, train_online, RunConfig};
use crate::types::{Dataset, Sample};

/// Contiguous fold boundaries over `n` items; the first `n % k` folds get one extra.
pub fn fold_ranges(n: usize, k: usize) -> Vec<Range<usize>> {
    let base = n / k;
    let extra = n % k;
    let mut start = 0;
    (0..k)
        .map(|f| {
            let len = base + usize::from(f < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

struct FoldOutcome {
    result: FoldResult,
    agreements: usize,
    fallbacks: usize,
    tested: usize,
}

/// Seeded shuffle, `k` contiguous folds, online training on each complement.
pub fn run_kfold(data: &Dataset, cfg: &RunConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let n = data.len();
    if n < cfg.folds {
        return Err(Error::config(format!(
            "{n} samples cannot be split into {} folds",
            cfg.folds
        )));
    }

    let jobs: Vec<(usize, usize)> = (0..cfg.repetitions)
        .flat_map(|r| (0..cfg.folds).map(move |f| (r, f)))
        .collect();
    let orders: Vec<Vec<usize>> = (0..cfg.repetitions)
        .map(|r| shuffled_indices(n, cfg.shuffle_seed.wrapping_add(r as u64)))
        .collect();
    let ranges = fold_ranges(n, cfg.folds);

    let run = |&(rep, fold): &(usize, usize)| run_fold(data, cfg, &orders[rep], &ranges, rep, fold);
    let outcomes: Vec<FoldOutcome> = if cfg.parallel {
        jobs.par_iter().map(run).collect::<Result<_>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_>>()?
    };

    let agreements = outcomes.iter().map(|o| o.agreements).sum();
    let fallbacks = outcomes.iter().map(|o| o.fallbacks).sum();
    let tested = outcomes.iter().map(|o| o.tested).sum();
    Ok(EvaluationReport::assemble(
        RunMode::Kfold,
        cfg.clone(),
        DatasetSummary::of(data),
        outcomes.into_iter().map(|o| o.result).collect(),
        agreements,
        fallbacks,
        tested,
        Vec::new(),
    ))
}

fn run_fold(
    data: &Dataset,
    cfg: &RunConfig,
    order: &[usize],
    ranges: &[Range<usize>],
    rep: usize,
    fold: usize,
) -> Result<FoldOutcome> {
    let test_range = &ranges[fold];
    let pick =
        |idx: &[usize]| -> Vec<Sample> { idx.iter().map(|&i| data.samples()[i].clone()).collect() };
    let test_idx = &order[test_range.clone()];
    let train_idx: Vec<usize> = order[..test_range.start]
        .iter()
        .chain(&order[test_range.end..])
        .copied()
        .collect();

    let train_raw = data.with_samples(pick(&train_idx));
    let test_raw = data.with_samples(pick(test_idx));
    let norm = Normalizer::fit(&train_raw)?;
    let train = norm.apply(&train_raw)?;
    let test = norm.apply(&test_raw)?;

    let n0 = cfg.init_block_for(train.len())?;
    let layer = HiddenLayer::new(cfg.network_config(data, rep))?;
    let (model, train_time) = train_online(layer, &train, n0, cfg.chunk_size, |_| Ok(()))?;

    let ctype = data.effective_type();
    let (eval, test_time) = evaluate(
        &model,
        test.samples(),
        ctype,
        data.label_count(),
        cfg.fallback,
    )?;
    let tested = eval.samples;
    Ok(FoldOutcome {
        result: FoldResult {
            repetition: rep,
            fold,
            train_size: train.len(),
            test_size: test.len(),
            metrics: eval.metrics,
            train_seconds: train_time.as_secs_f64(),
            test_seconds: test_time.as_secs_f64(),
            type_agreement: eval.agreements as f64 / tested as f64,
            fallback_rate: eval.fallbacks as f64 / tested as f64,
        },
        agreements: eval.agreements,
        fallbacks: eval.fallbacks,
        tested,
    })
}
