//! Parallel vs sequential throughput on the two map-heavy workloads:
//! moment tables (quadrature per entry) and disk-grid derivative sweeps.
//!
//! The parallel path is exercised when the default `parallel` feature is
//! on; build with `--no-default-features` to benchmark the fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use genhilbert::analytic::{self, PowerSeries};
use genhilbert::measure::Measure;
use genhilbert::par::{par_map, seq_map};
use num_complex::Complex64;

fn moment_entry(m: &Measure, n: usize) -> f64 {
    m.moment(n as i64).unwrap().value
}

fn bench_moment_table(c: &mut Criterion) {
    // log weight forces the quadrature route for every entry
    let m = Measure::power_log(1.0, 1.0, -2.0).unwrap();
    let mut group = c.benchmark_group("moment_table");
    group.sample_size(10);
    for n in [64usize, 256] {
        let idx: Vec<usize> = (0..=n).collect();
        group.bench_with_input(BenchmarkId::new("par_map", n), &n, |b, _| {
            b.iter(|| par_map(idx.clone(), |k| moment_entry(&m, k)))
        });
        group.bench_with_input(BenchmarkId::new("seq_map", n), &n, |b, _| {
            b.iter(|| seq_map(idx.clone(), |k| moment_entry(&m, k)))
        });
    }
    group.finish();
}

fn bench_grid_sweep(c: &mut Criterion) {
    let f = analytic::test_function_power(0.9, 2.0, 4096).unwrap();
    let grid = analytic::disk_grid(2);
    let eval = |z: Complex64| f.eval_derivative(z).unwrap().norm();
    let mut group = c.benchmark_group("grid_sweep");
    group.sample_size(10);
    group.bench_function("par_map", |b| b.iter(|| par_map(grid.clone(), eval)));
    group.bench_function("seq_map", |b| b.iter(|| seq_map(grid.clone(), eval)));
    group.finish();
}

fn bench_bloch_seminorm(c: &mut Criterion) {
    // end-to-end norm estimate; uses the crate's internal map layer
    let f = PowerSeries::log_kernel(2048);
    let mut group = c.benchmark_group("bloch_seminorm");
    group.sample_size(10);
    group.bench_function("log_kernel_2048", |b| {
        b.iter(|| analytic::bloch_seminorm(&f, 1.0).unwrap().value)
    });
    group.finish();
}

criterion_group!(benches, bench_moment_table, bench_grid_sweep, bench_bloch_seminorm);
criterion_main!(benches);
