//! A batch of independent solves, serial against rayon-parallel.

use criterion::{criterion_group, criterion_main, Criterion};
use pohozaev::sweep::{parallel_available, solve_all, SweepJob};
use pohozaev::{LinearSolver, NonlinearityModel, SolverConfig};

fn jobs() -> Vec<SweepJob> {
    let config = SolverConfig {
        panels: 200,
        eps_stop: 1e-2,
        linear_solver: LinearSolver::Thomas,
        ..SolverConfig::default()
    };
    [0.1, 0.3, 0.5, 0.7, 1.0]
        .iter()
        .flat_map(|&lambda| {
            [0.1, 0.5].map(|s| SweepJob {
                model: NonlinearityModel::asym_linear(lambda, s).unwrap(),
                config,
            })
        })
        .collect()
}

fn sweep(c: &mut Criterion) {
    let jobs = jobs();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("serial", |b| b.iter(|| solve_all(&jobs, false)));
    if parallel_available() {
        group.bench_function("parallel", |b| b.iter(|| solve_all(&jobs, true)));
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
