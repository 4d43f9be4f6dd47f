use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use normwalk_core::census::{count_bruteforce, count_l1_recursive};
use normwalk_core::green::green_dp;
use normwalk_core::stable::stable_draws;
use normwalk_core::walk::{make_simple_walk, simulate, SiteTracking, WalkRun};
use normwalk_core::NormSpec;

fn census(c: &mut Criterion) {
    let spec = NormSpec::weighted_l1(3);
    c.bench_function("census/bruteforce_w1_d3_k30", |b| b.iter(|| count_bruteforce(black_box(&spec), 30).unwrap()));
    c.bench_function("census/recursive_l1_d4_k200", |b| b.iter(|| count_l1_recursive(4, black_box(200)).unwrap()));
}

fn walk(c: &mut Criterion) {
    let step = make_simple_walk(3);
    let spec = NormSpec::max(3);
    c.bench_function("walk/simulate_1e5_steps", |b| {
        b.iter(|| {
            let run = WalkRun::new(&step, &spec, 1, black_box(0), 100_000);
            simulate(&run, SiteTracking::Off, &mut []).unwrap()
        })
    });
}

fn green(c: &mut Criterion) {
    let step = make_simple_walk(3);
    let mut g = c.benchmark_group("green");
    g.sample_size(10);
    g.bench_function("dp_n400_box40", |b| b.iter(|| green_dp(&step, black_box(&[1, 0, 0]), 400, 40).unwrap()));
    g.finish();
}

fn stable(c: &mut Criterion) {
    c.bench_function("stable/draws_1e5", |b| b.iter(|| stable_draws(black_box(0.5), 1.0, 100_000, 1, "bench").unwrap()));
}

criterion_group!(benches, census, walk, green, stable);
criterion_main!(benches);
