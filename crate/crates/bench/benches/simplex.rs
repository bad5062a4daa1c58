use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use btiepi_bench::desk_instance;
use btiepi_core::{build, mip_objective, relaxation_bound, solve_lp, Formulation};

fn relaxations(c: &mut Criterion) {
    let inst = desk_instance(3, 12, 4);
    let mut group = c.benchmark_group("relaxation");
    group.sample_size(10);
    for f in [Formulation::OneBin, Formulation::ThreeBin, Formulation::Temp] {
        let model = build(&inst, f).expect("model");
        let mut lp = model.lp().clone();
        for j in 0..lp.columns().len() {
            lp.set_integer(j, false);
        }
        group.bench_function(f.as_str(), |b| b.iter(|| solve_lp(black_box(&lp)).expect("lp")));
    }
    group.bench_function("bti-cuts", |b| {
        b.iter(|| relaxation_bound(black_box(&inst), Formulation::Bti).expect("cuts"))
    });
    group.finish();
}

fn branch_and_bound(c: &mut Criterion) {
    let inst = desk_instance(2, 8, 5);
    let mut group = c.benchmark_group("mip");
    group.sample_size(10);
    group.bench_function("3bin/2x8", |b| b.iter(|| mip_objective(black_box(&inst)).expect("mip")));
    group.finish();
}

criterion_group!(benches, relaxations, branch_and_bound);
criterion_main!(benches);
