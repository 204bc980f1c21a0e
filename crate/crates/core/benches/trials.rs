//! Trial-batch throughput. With the default `parallel` feature the batch is
//! timed on a one-thread pool and on a pool with every core (at least
//! two). Build with `--no-default-features` to time the sequential
//! fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use randlp::experiments::{run_avg_experiment, run_consistency_experiment, ExperimentConfig};
use randlp::solver::{enumerate_answer_sets, has_answer_set};
use randlp::{generate, LinearModelParams, Seed};

fn single_program(c: &mut Criterion) {
    let mut g = c.benchmark_group("program");
    for n in [50usize, 200] {
        let params = LinearModelParams::new(n, 5.0, 0.0).unwrap();
        g.bench_with_input(BenchmarkId::new("generate", n), &params, |b, p| {
            let mut i = 0;
            b.iter(|| {
                i += 1;
                black_box(generate(p, Seed(i)).unwrap())
            })
        });
        let program = generate(&params, Seed(1)).unwrap();
        g.bench_with_input(BenchmarkId::new("enumerate", n), &program, |b, p| {
            b.iter(|| black_box(enumerate_answer_sets(p, None).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("exists", n), &program, |b, p| {
            b.iter(|| black_box(has_answer_set(p).unwrap()))
        });
    }
    g.finish();
}

fn batches() -> [(&'static str, ExperimentConfig); 2] {
    [
        ("avg_n50_x200", ExperimentConfig::new(50, 5.0, 0.0, 200, 1)),
        ("consistency_n300_x50", ExperimentConfig::new(300, 4.0, 4.0, 50, 1)),
    ]
}

fn run_batch(name: &str, cfg: &ExperimentConfig) {
    if name.starts_with("avg") {
        black_box(run_avg_experiment(cfg).unwrap());
    } else {
        black_box(run_consistency_experiment(cfg).unwrap());
    }
}

#[cfg(feature = "parallel")]
fn trial_batches(c: &mut Criterion) {
    // On a single core the second pool is oversubscribed, which still
    // shows the scheduling overhead of the parallel path.
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get()).max(2);
    let mut g = c.benchmark_group("batch");
    g.sample_size(10);
    for (name, cfg) in batches() {
        for threads in [1, cores] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            g.bench_function(BenchmarkId::new(name, format!("threads_{threads}")), |b| {
                b.iter(|| pool.install(|| run_batch(name, &cfg)))
            });
        }
    }
    g.finish();
}

#[cfg(not(feature = "parallel"))]
fn trial_batches(c: &mut Criterion) {
    let mut g = c.benchmark_group("batch");
    g.sample_size(10);
    for (name, cfg) in batches() {
        g.bench_function(BenchmarkId::new(name, "sequential"), |b| b.iter(|| run_batch(name, &cfg)));
    }
    g.finish();
}

criterion_group!(benches, single_program, trial_batches);
criterion_main!(benches);
