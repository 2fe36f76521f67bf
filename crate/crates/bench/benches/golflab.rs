use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use golflab::dynamics::{run_parking, simulate_golf};
use golflab::exact::{cycle_law, prob_block0_full, z_block0_law_general};
use golflab::forest::sample_block_sizes_via_forest;
use golflab::line::{find_window_separators, sample_line_window};
use golflab::oracle::exact_final_distribution;
use golflab::{Seed, Strategy};
use golflab_bench::half_filled_cycle;

fn golf(c: &mut Criterion) {
    let mut g = c.benchmark_group("golf");
    let walk = Strategy::pwalk(1, 2);
    for n in [1_000usize, 10_000, 100_000] {
        let config = half_filled_cycle(n, 1);
        let mut rng = Seed(2).rng();
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("pwalk", n), &config, |b, cfg| {
            b.iter(|| simulate_golf(black_box(cfg), &walk, &mut rng).unwrap())
        });
    }
    let mut rng = Seed(3).rng();
    g.bench_function("parking/10000", |b| b.iter(|| run_parking(10_000, 9_000, &Strategy::pwalk(1, 1), &mut rng).unwrap()));
    g.finish();
}

fn forests(c: &mut Criterion) {
    let mut g = c.benchmark_group("forest_sampler");
    for (n, nl) in [(10_000usize, 100usize), (100_000, 316)] {
        let mut rng = Seed(4).rng();
        g.throughput(Throughput::Elements(n as u64));
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| sample_block_sizes_via_forest(black_box(n), nl, &mut rng).unwrap())
        });
    }
    g.finish();
}

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    let config = half_filled_cycle(8, 5);
    g.bench_function("oracle/n8", |b| b.iter(|| exact_final_distribution(black_box(&config), &Strategy::pwalk(1, 3)).unwrap()));
    g.bench_function("cycle_law/n12", |b| b.iter(|| cycle_law(black_box(12), 4, 6).unwrap()));
    g.bench_function("block0/n10000", |b| b.iter(|| prob_block0_full(black_box(10_000), 4_950, 10).unwrap()));
    g.bench_function("zgeneral/l1000", |b| b.iter(|| z_block0_law_general(0.3, 0.5, black_box(1_000)).unwrap()));
    g.finish();
}

fn line(c: &mut Criterion) {
    let mut rng = Seed(6).rng();
    c.bench_function("line/window2001", |b| {
        b.iter(|| find_window_separators(&sample_line_window(0.4, 0.6, 1_000, &mut rng).unwrap()))
    });
}

criterion_group!(benches, golf, forests, exact, line);
criterion_main!(benches);
