use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gridshift::par::Execution;
use gridshift::scenario::ThreeBusScenario;
use gridshift::sweep::{heatmap, verify, HeatmapGrid};

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn bench_verify(c: &mut Criterion) {
    let s = ThreeBusScenario::canonical();
    let mut group = c.benchmark_group("verify_2000");
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| verify(black_box(&s), 2000, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_heatmap(c: &mut Criterion) {
    let s = ThreeBusScenario::canonical();
    let grid = HeatmapGrid {
        resolution: 200,
        ..HeatmapGrid::default_for(&s)
    };
    let mut group = c.benchmark_group("heatmap_200x200");
    for (name, exec) in modes() {
        group.bench_function(name, |b| b.iter(|| heatmap(black_box(&s), grid, exec)));
    }
    group.finish();
}

criterion_group!(benches, bench_verify, bench_heatmap);
criterion_main!(benches);
