use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lrn_core::descent::{build_mod3_family, build_mod4_family, CurveModel};
use lrn_core::oracle::{brute_force_raw, OracleBounds};
use lrn_core::par::Execution;
use lrn_core::points::{search_many, SearchBounds};
use lrn_core::PrimeBasis;

fn family_subset() -> Vec<CurveModel> {
    let basis = PrimeBasis::default();
    let mut models: Vec<CurveModel> = build_mod3_family(&basis).into_iter().step_by(27).collect();
    models.extend(build_mod4_family(&basis).into_iter().step_by(8));
    models
}

fn bench_search(c: &mut Criterion) {
    let basis = PrimeBasis::default();
    let models = family_subset();
    let bounds = SearchBounds { numerator_height: 100_000, s_exponent_max: 2, y_range: 100_000, budget: u128::MAX };
    let mut group = c.benchmark_group("point_search");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| search_many(black_box(&models), &bounds, &basis, exec).unwrap()));
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let bounds = OracleBounds::default();
    let mut group = c.benchmark_group("oracle");
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| brute_force_raw(black_box(&bounds), &[17, 41, 59], exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_search, bench_oracle);
criterion_main!(benches);
