use std::hint::black_box;

use bundlesec_core::extensions::{spec_from_group, FibreModel};
use bundlesec_core::mcg::endo_report;
use bundlesec_core::transgression::transgress;
use bundlesec_core::{abelianization, obstruction_class, parse_presentation, smith_normal_form, IntMatrix};
use criterion::{criterion_group, criterion_main, Criterion};

fn pseudo_random_matrix(n: usize, seed: u64) -> IntMatrix {
    let mut s = seed;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 33) % 19) as i64 - 9
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&rows)
}

fn snf(c: &mut Criterion) {
    for n in [6, 12, 24] {
        let m = pseudo_random_matrix(n, n as u64);
        c.bench_function(&format!("smith_normal_form {n}x{n}"), |b| b.iter(|| smith_normal_form(black_box(&m))));
    }
}

fn extensions(c: &mut Criterion) {
    let flat = parse_presentation(
        "<u,v,x,y | comm(u ; x y), v x v^-1 = x^-1, v y = y v, [u,v] = x^2, x y x^-1 = y^-1>",
    )
    .unwrap();
    let spec = spec_from_group(&flat, &FibreModel::Kb { x: "x".into(), y: "y".into() }).unwrap();
    c.bench_function("obstruction_class flat Kb", |b| b.iter(|| obstruction_class(black_box(&spec)).unwrap()));
    c.bench_function("abelianization flat Kb", |b| b.iter(|| abelianization(black_box(&flat))));
}

fn transgression(c: &mut Criterion) {
    c.bench_function("transgress k=5", |b| b.iter(|| transgress(black_box(5)).unwrap()));
}

fn mcg(c: &mut Criterion) {
    c.bench_function("endo_report", |b| b.iter(|| endo_report().unwrap()));
}

criterion_group!(benches, snf, extensions, transgression, mcg);
criterion_main!(benches);
