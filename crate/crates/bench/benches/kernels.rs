use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use chebycm_core::chebyshev::verify_functional_equation;
use chebycm_core::curves::{make_cd, make_dm, quotient_action, Case};
use chebycm_core::cyclotomic::{eta, minimal_polynomial};
use chebycm_core::zeta::{count_points, irreducibility, l_polynomial};

fn algebra(c: &mut Criterion) {
    c.bench_function("functional_equation_d64", |b| b.iter(|| verify_functional_equation(black_box(64))));
    c.bench_function("minimal_polynomial_eta_128", |b| b.iter(|| minimal_polynomial(&eta(black_box(128)))));
    c.bench_function("quotient_action_case1_d16", |b| b.iter(|| quotient_action(black_box(16), Case::PowerOfTwo).unwrap()));
}

fn counting(c: &mut Criterion) {
    let c5 = make_cd(5).unwrap();
    let d14 = make_dm(14).unwrap();
    c.bench_function("count_c5_f_47", |b| b.iter(|| count_points(&c5, black_box(47), 1).unwrap()));
    c.bench_function("count_c5_f_13^3", |b| b.iter(|| count_points(&c5, black_box(13), 3).unwrap()));
    c.bench_function("count_d14_f_5^6", |b| b.iter(|| count_points(&d14, black_box(5), 6).unwrap()));
    let l = l_polynomial(&make_cd(8).unwrap(), 3).unwrap();
    c.bench_function("irreducibility_c8_q3", |b| b.iter(|| irreducibility(black_box(&l.as_poly())).unwrap()));
    c.bench_function("weil_roots_c8_q3", |b| b.iter(|| black_box(&l).root_modulus_deviation()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = algebra, counting
}
criterion_main!(benches);
