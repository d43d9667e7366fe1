use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use egm_bench::{near_extremal, random};
use egm_core::{
    count_maximum_matchings_bruteforce, count_maximum_matchings_decomposed, decompose, decompose_by_definition,
    maximum_matching, maximum_matching_unordered, CountLimits,
};

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximum_matching");
    for n in [50, 200, 800] {
        let g = random(n, 1, 1);
        group.bench_with_input(BenchmarkId::new("unordered", n), &g, |b, g| b.iter(|| maximum_matching_unordered(black_box(g))));
        if n <= 200 {
            group.bench_with_input(BenchmarkId::new("lexmin", n), &g, |b, g| b.iter(|| maximum_matching(black_box(g))));
        }
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for n in [30, 120] {
        let g = random(n, 1, 2);
        group.bench_with_input(BenchmarkId::new("blossom", n), &g, |b, g| b.iter(|| decompose(black_box(g))));
        group.bench_with_input(BenchmarkId::new("definition", n), &g, |b, g| {
            b.iter(|| decompose_by_definition(black_box(g)))
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_maximum_matchings");
    group.sample_size(20);
    let limits = CountLimits::default();
    for (n, s, d) in [(12, 3, 2), (14, 4, 3), (13, 6, 2)] {
        let g = near_extremal(n, s, d, 3);
        let id = format!("n{n}_s{s}_d{d}");
        group.bench_with_input(BenchmarkId::new("brute", &id), &g, |b, g| {
            b.iter(|| count_maximum_matchings_bruteforce(black_box(g)))
        });
        group.bench_with_input(BenchmarkId::new("decomposed", &id), &g, |b, g| {
            b.iter(|| count_maximum_matchings_decomposed(black_box(g), &limits))
        });
    }
    group.finish();
}

criterion_group!(benches, matching, decomposition, counting);
criterion_main!(benches);
