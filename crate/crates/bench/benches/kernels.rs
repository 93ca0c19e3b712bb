use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gfc_core::autgroup::g_orbits;
use gfc_core::curves::{genus_riemann_hurwitz, make_curve, Family};
use gfc_core::ffield::make_field;
use gfc_core::moebius::dickson_audit;
use gfc_core::Poly;

fn field_mul(c: &mut Criterion) {
    let f = make_field(13, 2).unwrap();
    let xs: Vec<_> = f.elements().collect();
    c.bench_function("mul F_169 all pairs of 64", |b| {
        b.iter(|| {
            let mut acc = f.one();
            for x in &xs[..64] {
                for y in &xs[..64] {
                    acc = f.add(&acc, &f.mul(x, y));
                }
            }
            black_box(acc)
        })
    });
    c.bench_function("inv F_169", |b| {
        b.iter(|| {
            black_box(
                xs[1..]
                    .iter()
                    .map(|x| f.inv(x).unwrap())
                    .collect::<Vec<_>>(),
            )
        })
    });
}

fn factorization(c: &mut Criterion) {
    let f = make_field(11, 1).unwrap();
    // x^20 - 3x + 1
    let mut coeffs = vec![0i64; 21];
    coeffs[0] = 1;
    coeffs[1] = -3;
    coeffs[20] = 1;
    let p = Poly::from_ints(&f, &coeffs);
    c.bench_function("factor deg 20 over F_11", |b| {
        b.iter(|| p.factorize(&f).unwrap())
    });
}

fn curves(c: &mut Criterion) {
    let f = make_field(11, 1).unwrap();
    let ps: Vec<_> = [2, 3, 1].iter().map(|&k| f.from_int(k)).collect();
    let curve = make_curve(Family::IIb1, &f, 5, 10, &ps).unwrap();
    c.bench_function("RH genus IIb1 q=11 n=5 m=10", |b| {
        b.iter(|| genus_riemann_hurwitz(&curve).unwrap())
    });
    let small = make_curve(Family::IIb1, &f, 5, 5, &ps).unwrap();
    c.bench_function("orbits IIb1 q=11 n=5 m=5", |b| {
        b.iter(|| g_orbits(&small).unwrap())
    });
    c.bench_function("dickson audit q=7", |b| {
        b.iter(|| dickson_audit(7).unwrap())
    });
}

criterion_group!(benches, field_mul, factorization, curves);
criterion_main!(benches);
