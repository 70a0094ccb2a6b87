use std::hint::black_box;

use adbqc::adversary::escape_probability_exact;
use adbqc::blindness::audit_theta_uniformity;
use adbqc::gadgets::{gadget_cz, Octant};
use adbqc::protocols::{p2_hrz, run_protocol, ProtocolConfig, ProtocolKind};
use adbqc::qsim::{enumerate_choices, StateVector, BRANCH_BUDGET};
use adbqc::rng::stream;
use criterion::{criterion_group, criterion_main, Criterion};

fn gadgets(c: &mut Criterion) {
    let mut rng = stream(0, "bench", 0);
    let psi = StateVector::random(3, &mut rng).unwrap();
    let mut group = c.benchmark_group("gadget_enumeration");
    group.bench_function("p2_hrz", |b| {
        b.iter(|| enumerate_choices(BRANCH_BUDGET, |ch| p2_hrz(black_box(&psi), 0, 3, ch)).unwrap())
    });
    group.bench_function("cz", |b| {
        b.iter(|| {
            enumerate_choices(BRANCH_BUDGET, |ch| gadget_cz(black_box(&psi), 0, 2, ch)).unwrap()
        })
    });
    group.finish();
}

fn protocols(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_protocol");
    group.sample_size(20);
    for (kind, n) in [
        (ProtocolKind::Sueki, 3),
        (ProtocolKind::P1, 9),
        (ProtocolKind::P2, 6),
    ] {
        let config = ProtocolConfig::new(kind, n, 2, 1);
        group.bench_function(format!("{kind:?}_n{n}"), |b| {
            let mut trial = 0;
            b.iter(|| {
                trial += 1;
                run_protocol(black_box(&config), trial, false).unwrap()
            })
        });
    }
    group.finish();
}

fn analysis(c: &mut Criterion) {
    c.bench_function("escape_exact_n30", |b| {
        b.iter(|| escape_probability_exact(30, black_box((10, 10, 10)), 4, 3, 2).unwrap())
    });
    let theta = Octant::new(3).unwrap();
    c.bench_function("theta_audit", |b| {
        b.iter(|| audit_theta_uniformity(black_box(theta), 1))
    });
}

criterion_group!(benches, gadgets, protocols, analysis);
criterion_main!(benches);
