use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use theta_bench::{dense_matrix, fixture_pairs};
use theta_core::exactlin::{kernel, rank};
use theta_core::kspec::{orbit_ring_series, sp_series, transfer_series};
use theta_core::lift::lift_orbit;
use theta_core::moment::construct_w;
use theta_core::orbits::{classify, enumerate_orbits, representative};
use theta_core::pairs::{DualPairSpec, Side, Slot};

fn exact_linear_algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("exactlin");
    for n in [6, 10, 14] {
        let m = dense_matrix(n);
        group.bench_with_input(BenchmarkId::new("rank", n), &m, |b, m| b.iter(|| rank(black_box(m))));
        group.bench_with_input(BenchmarkId::new("kernel", n), &m, |b, m| b.iter(|| kernel(black_box(m))));
    }
    group.finish();
}

fn orbit_layer(c: &mut Criterion) {
    let mut group = c.benchmark_group("orbits");
    for (name, pair) in fixture_pairs() {
        let orbits = enumerate_orbits(&pair, Side::G).unwrap();
        group.bench_function(BenchmarkId::new("classify_representatives", name), |b| {
            b.iter(|| orbits.iter().map(|o| classify(&representative(o)).unwrap()).count())
        });
        group.bench_function(BenchmarkId::new("lift", name), |b| b.iter(|| orbits.iter().map(|o| lift_orbit(o).unwrap()).count()));
        group.bench_function(BenchmarkId::new("construct_w", name), |b| {
            b.iter(|| orbits.iter().map(|o| construct_w(o).unwrap()).count())
        });
    }
    group.finish();
}

fn series(c: &mut Criterion) {
    let pair = DualPairSpec::r(1, 2, 2, Slot::First);
    let orbit = enumerate_orbits(&pair, Side::G).unwrap().remove(0);
    let mut group = c.benchmark_group("kspec");
    group.sample_size(10);
    for deg in [2, 4] {
        group.bench_with_input(BenchmarkId::new("orbit_ring_sp2", deg), &deg, |b, &d| {
            b.iter(|| orbit_ring_series(&orbit, d, 7).unwrap())
        });
        let a = sp_series(pair.side_member(Side::G), deg).unwrap();
        group.bench_with_input(BenchmarkId::new("transfer_sp2_o22", deg), &deg, |b, &d| {
            b.iter(|| transfer_series(&pair, &a, d).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact_linear_algebra, orbit_layer, series);
criterion_main!(benches);
