use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use irs_chanest::experiment::{run_sweep_with, ScenarioConfig, SchemeId, SweepAxis};
use irs_chanest::{Execution, SystemConfig};

fn scenario(trials: usize) -> ScenarioConfig {
    ScenarioConfig {
        base: SystemConfig::default(),
        axis: SweepAxis::SnrDb,
        grid: vec![10.0],
        trials,
        seed: 1,
        schemes: vec![
            SchemeId::Scheme1Optimal,
            SchemeId::Scheme1RandomReflection,
            SchemeId::Scheme2Optimal,
            SchemeId::Scheme2RandomPilot,
        ],
        snr_db: 20.0,
        record_timing: false,
    }
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let trials = 64;
    let s = scenario(trials);
    let mut modes = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    modes.push(("parallel", Execution::Parallel));
    for (name, exec) in modes {
        group.bench_with_input(BenchmarkId::new(name, trials), &s, |b, s| {
            b.iter(|| run_sweep_with(s, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
