use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use malmquist::blaschke::{compressed_shift, MalmquistBasis};
use malmquist::interpolator::{hermite_trace, phi, sup_norm_rep};
use malmquist::oracle::{interp_constant_estimate, min_norm, pick_min_norm, OracleConfig};
use malmquist::{Complex64, Sigma, SpaceSpec, TaylorSeries};
use malmquist_bench::ring;

fn poly(deg: usize) -> TaylorSeries {
    TaylorSeries::new((0..=deg).map(|k| Complex64::new(1.0 / (k + 1) as f64, (k % 3) as f64 * 0.1)).collect()).unwrap()
}

fn expansion(c: &mut Criterion) {
    let mut group = c.benchmark_group("taylor_expansion");
    for n in [4, 16, 64] {
        let basis = MalmquistBasis::new(&ring(n, 0.9));
        group.bench_with_input(BenchmarkId::from_parameter(n), &basis, |b, basis| b.iter(|| basis.taylor(black_box(512))));
    }
    group.finish();
}

fn interpolant(c: &mut Criterion) {
    let sigma = ring(10, 0.9);
    let f = poly(50);
    c.bench_function("phi_n10_deg50", |b| b.iter(|| phi(black_box(&f), &sigma)));
    let g = phi(&f, &sigma);
    c.bench_function("sup_norm_n10", |b| b.iter(|| sup_norm_rep(black_box(&g))));
}

fn oracles(c: &mut Criterion) {
    let sigma = ring(6, 0.8);
    let f = poly(8);
    let trace = hermite_trace(&f, &sigma);
    c.bench_function("compressed_shift_n6", |b| b.iter(|| compressed_shift(black_box(&sigma))));
    c.bench_function("min_norm_n6", |b| b.iter(|| min_norm(&sigma, black_box(&trace))));
    c.bench_function("pick_min_norm_n6", |b| b.iter(|| pick_min_norm(&sigma, black_box(&trace))));
    let one = Sigma::one_point(Complex64::new(0.5, 0.0), 8).unwrap();
    let cfg = OracleConfig { restarts: 4, ..Default::default() };
    c.bench_function("estimate_n8_r05_hardy", |b| {
        b.iter(|| interp_constant_estimate(black_box(&one), &SpaceSpec::hardy(), &cfg))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = expansion, interpolant, oracles
}
criterion_main!(benches);
