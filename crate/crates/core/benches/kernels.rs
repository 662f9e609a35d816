//! Inner kernels: one descent-direction solve by SOR and by Thomas, and the
//! moment pass behind every evaluation of `I`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pohozaev::descent::{assemble_system, sor_solve, thomas_solve, SorOptions};
use pohozaev::energy::Moments;
use pohozaev::{initial_guess, project, NonlinearityModel, RadialGrid};

fn kernels(c: &mut Criterion) {
    let model = NonlinearityModel::power(1.0).unwrap();
    let mut group = c.benchmark_group("direction");
    for panels in [250usize, 1000] {
        let guess = initial_guess(100.0, 10.0, RadialGrid::new(1.0, panels).unwrap()).unwrap();
        let w1 = project(&model, &guess).unwrap().projected;
        let system = assemble_system(&model, &w1);
        let options = SorOptions::default();
        group.bench_with_input(BenchmarkId::new("sor", panels), &system, |b, s| {
            b.iter(|| sor_solve(black_box(s), &options, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("thomas", panels), &system, |b, s| {
            b.iter(|| thomas_solve(black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("moments", panels), &w1, |b, w| {
            b.iter(|| Moments::of(&model, black_box(w)))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
