use std::hint::black_box;

use acfreq_core::montecarlo::{moments, McConfig};
use acfreq_core::phase_model::{CentroidBranch, Protocol, SignalSpec};
use acfreq_core::sweeps::{probe_sweep, pulse_verify, FigConfig, PulseGrid};
use acfreq_core::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_probe_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("probe_sweep");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = FigConfig {
            n_max: 60,
            fidelity_check: false,
            execution,
            ..FigConfig::single_freq()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(probe_sweep(cfg)))
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let spec = SignalSpec::bi(1.4, 0.6, 0.8).unwrap();
    let protocol = Protocol::CentroidFree(CentroidBranch::Exact);
    let mut group = c.benchmark_group("mc_moments_200k");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = McConfig::new(200_000, 1).unwrap().with_execution(execution);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| black_box(moments(&spec, protocol, 0.9, cfg).unwrap()))
        });
    }
    group.finish();
}

fn bench_pulse_verify(c: &mut Criterion) {
    let grid = PulseGrid::default();
    let mut group = c.benchmark_group("pulse_verify");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(pulse_verify(&grid, execution).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_probe_sweep, bench_monte_carlo, bench_pulse_verify);
criterion_main!(benches);
