use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use groupcut::compendium::gmic;
use groupcut::rational::q;
use groupcut::{build_complex, extremality_test, minimality_test, oracle_check};
use groupcut_bench::{combination, drlm, psi, rlm};

fn complex(c: &mut Criterion) {
    let p = psi(3);
    c.bench_function("build_complex/psi_3", |b| b.iter(|| build_complex(black_box(&p)).face_list().len()));
}

fn minimality(c: &mut Criterion) {
    let mut g = c.benchmark_group("minimality");
    for (name, pi) in [("rlm", rlm()), ("drlm", drlm()), ("psi_4", psi(4))] {
        g.bench_function(name, |b| b.iter(|| minimality_test(black_box(&pi), None)));
    }
    g.finish();
}

fn extremality(c: &mut Criterion) {
    let mut g = c.benchmark_group("extremality");
    g.sample_size(10);
    for (name, pi) in [("rlm", rlm()), ("drlm", drlm()), ("combination", combination()), ("psi_2", psi(2))] {
        g.bench_function(name, |b| b.iter(|| extremality_test(black_box(&pi)).unwrap().status));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let gm = gmic(&q(1, 5)).unwrap();
    for (name, pi) in [("gmic", gm), ("drlm", drlm())] {
        g.bench_function(name, |b| b.iter(|| oracle_check(black_box(&pi)).unwrap().verdict));
    }
    g.finish();
}

criterion_group!(benches, complex, minimality, extremality, oracle);
criterion_main!(benches);
