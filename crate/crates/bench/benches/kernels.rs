use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gapdeph::asymptotics::model_limits;
use gapdeph::dynamics::{dephasing_factor, dephasing_rate, transform_pair, Weight};
use gapdeph::measures::detect_sign_intervals;
use gapdeph::spectral::{SpectralModel, DEFAULT_SERIES_ORDER};

fn transforms(c: &mut Criterion) {
    let m = SpectralModel::benchmark(0.5, 1.0, 1.0).unwrap();
    let mut g = c.benchmark_group("transform_pair");
    for tau in [1.0, 100.0] {
        g.bench_function(format!("plain_tau{tau}"), |b| {
            b.iter(|| transform_pair(&m, Weight::Plain, 0.0, black_box(tau), 1e-10).unwrap())
        });
    }
    g.finish();
    c.bench_function("dephasing_rate_t1", |b| {
        b.iter(|| dephasing_rate(&m, 1.0, black_box(10.0), 1e-10).unwrap())
    });
    c.bench_function("dephasing_factor_t1", |b| {
        b.iter(|| dephasing_factor(&m, 1.0, black_box(10.0), 1e-10).unwrap())
    });
}

fn limits(c: &mut Criterion) {
    let m = SpectralModel::benchmark(1.0, 1.0, 1.0).unwrap();
    c.bench_function("model_limits_bm1", |b| {
        b.iter(|| model_limits(&m, black_box(1.0), DEFAULT_SERIES_ORDER).unwrap())
    });
}

fn scans(c: &mut Criterion) {
    let m = SpectralModel::benchmark(0.0, 1.0, 1.0).unwrap();
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    g.bench_function("gamma_sign_intervals_20pi", |b| {
        b.iter(|| {
            detect_sign_intervals(
                |t| Ok(dephasing_rate(&m, 1.0, t, 1e-10)?.value),
                0.0,
                20.0 * std::f64::consts::PI,
                std::f64::consts::PI / 32.0,
            )
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, transforms, limits, scans);
criterion_main!(benches);
