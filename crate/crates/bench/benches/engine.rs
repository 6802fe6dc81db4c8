use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sarima_core::correlogram::pacf;
use sarima_core::hypothesis::{adf_test, shapiro_wilk, AdfLags, AdfRegression};
use sarima_core::sarima::{exact_loglik, fit, simulate};
use sarima_core::{CoefficientSet, ModelSpec, TimeSeries, TransformRecord};

const REFERENCE: [f64; 4] = [0.6877, -0.4831, 0.9972, 0.4131];

fn reference_series(n: usize) -> (ModelSpec, CoefficientSet, TimeSeries) {
    let spec = ModelSpec::new(2, 1, 0, 0, 0, 2, 12).unwrap();
    let c = CoefficientSet::from_vec(&spec, &REFERENCE, 0.0416f64.powi(2)).unwrap();
    let y = simulate(&spec, &c, n, 1, None).unwrap();
    (spec, c, y)
}

fn loglik(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_loglik");
    for n in [96usize, 500, 2000] {
        let (spec, coeffs, y) = reference_series(n + 1);
        let w: Vec<f64> = y.values().windows(2).map(|p| p[1] - p[0]).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| exact_loglik(&spec, &coeffs, black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn estimation(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    let (spec, _, y) = reference_series(96);
    group.bench_function("sarima_2_1_0_x_0_0_2_n96", |b| {
        b.iter(|| fit(black_box(&y), &spec, &TransformRecord::identity()).unwrap())
    });
    let ar1 = ModelSpec::arima(1, 0, 0);
    let c1 = CoefficientSet::from_vec(&ar1, &[0.6], 1.0).unwrap();
    let y1 = simulate(&ar1, &c1, 500, 2, None).unwrap();
    group.bench_function("ar1_n500", |b| {
        b.iter(|| fit(black_box(&y1), &ar1, &TransformRecord::identity()).unwrap())
    });
    group.finish();
}

fn tests(c: &mut Criterion) {
    let errors = [
        23.170, -66.977, 157.893, -254.799, 3.386, 68.653, 45.081, 91.265, -289.497, 60.783, -26.862, 160.801,
    ];
    c.bench_function("shapiro_wilk_n12", |b| b.iter(|| shapiro_wilk(black_box(&errors)).unwrap()));
    let (_, _, y) = reference_series(500);
    c.bench_function("adf_auto_n500", |b| {
        b.iter(|| adf_test(black_box(y.values()), AdfRegression::Drift, AdfLags::Auto).unwrap())
    });
    c.bench_function("pacf_40_n500", |b| b.iter(|| pacf(black_box(y.values()), 40).unwrap()));
}

criterion_group!(benches, loglik, estimation, tests);
criterion_main!(benches);
