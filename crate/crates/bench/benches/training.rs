use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use oselm::harness::{run_kfold, train_model, RunConfig};
use oselm::synthetic::{blobs, linear_multilabel};
use oselm::types::{feature_matrix, target_matrix};
use oselm::{classify_batch, FallbackPolicy, HiddenLayer, NetworkConfig, OnlineModel};

fn sequential_updates(c: &mut Criterion) {
    let data = blobs(5000, 21, 3, 0.8, 1).unwrap();
    let x = feature_matrix(data.samples());
    let y = target_matrix(data.samples()).unwrap();
    let mut group = c.benchmark_group("sequential_update");
    group.throughput(Throughput::Elements(4900));
    for chunk in [1usize, 10, 100] {
        for hidden in [20usize, 50, 100] {
            let layer = HiddenLayer::new(NetworkConfig::new(hidden, 21, 3).with_seed(7)).unwrap();
            let base = OnlineModel::init_block(
                layer,
                &x.rows(0, 100).into_owned(),
                &y.rows(0, 100).into_owned(),
            )
            .unwrap();
            group.bench_with_input(
                BenchmarkId::new(format!("chunk{chunk}"), hidden),
                &hidden,
                |b, _| {
                    b.iter(|| {
                        let mut m = base.clone();
                        let mut s = 100;
                        while s < 5000 {
                            let n = chunk.min(5000 - s);
                            m.sequential_update(
                                &x.rows(s, n).into_owned(),
                                &y.rows(s, n).into_owned(),
                            )
                            .unwrap();
                            s += n;
                        }
                        black_box(m)
                    })
                },
            );
        }
    }
    group.finish();
}

fn whole_stream(c: &mut Criterion) {
    let data = blobs(5000, 21, 3, 0.8, 2).unwrap();
    let mut cfg = RunConfig::new(50);
    cfg.chunk_size = 1;
    c.bench_function("train_model/5000x21/hidden50", |b| {
        b.iter(|| black_box(train_model(&data, &cfg).unwrap()))
    });
}

fn prediction(c: &mut Criterion) {
    let data = linear_multilabel(2000, 10, 5, 2.0, 0.05, 3).unwrap();
    let (saved, _) = train_model(&data, &RunConfig::new(40)).unwrap();
    let x = feature_matrix(data.samples());
    let mut group = c.benchmark_group("classify_batch");
    group.throughput(Throughput::Elements(2000));
    group.bench_function("2000x10/L5", |b| {
        b.iter(|| black_box(classify_batch(&saved.model, &x, FallbackPolicy::Empty, None).unwrap()))
    });
    group.finish();
}

fn cross_validation(c: &mut Criterion) {
    let data = blobs(1000, 8, 4, 0.5, 4).unwrap();
    let mut cfg = RunConfig::new(30);
    let mut group = c.benchmark_group("run_kfold");
    group.sample_size(20);
    for parallel in [false, true] {
        cfg.parallel = parallel;
        let name = if parallel { "parallel" } else { "serial" };
        group.bench_function(name, |b| {
            b.iter(|| black_box(run_kfold(&data, &cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    sequential_updates,
    whole_stream,
    prediction,
    cross_validation
);
criterion_main!(benches);
