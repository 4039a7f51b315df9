use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use uqinv::diagrams::{lens_alpha, lens_space};
use uqinv::invariant_engine::Engine;
use uqinv::qalgebra::{Element, UqAlgebra};
use uqinv::scalars::rat;
use uqinv::C64;

fn dense(alg: &UqAlgebra, seed: f64) -> Element {
    let mut e = alg.zero(rat(1, 7));
    for (i, c) in e.coeffs.iter_mut().enumerate() {
        let t = seed + i as f64;
        *c = C64::new(t.sin(), (1.7 * t).cos());
    }
    e
}

fn multiply(c: &mut Criterion) {
    for ell in [3, 5] {
        let alg = UqAlgebra::from_ell(ell).unwrap();
        let (a, b) = (dense(&alg, 0.3), dense(&alg, 1.1));
        c.bench_function(&format!("multiply dense, ell = {ell}"), |bench| bench.iter(|| alg.mul(black_box(&a), black_box(&b)).unwrap()));
    }
}

fn r_matrix(c: &mut Criterion) {
    let alg = UqAlgebra::from_ell(3).unwrap();
    c.bench_function("R-matrix at (1/7, 2/7), ell = 3", |bench| {
        bench.iter(|| alg.r_matrix(black_box(rat(1, 7)), black_box(rat(2, 7))).unwrap())
    });
}

fn invariant(c: &mut Criterion) {
    let e = Engine::new(3).unwrap();
    let beta = rat(1, 7);
    let d = lens_space(3, 2, lens_alpha(2, beta, 1), Some(beta)).unwrap();
    c.bench_function("H' of L(2,1), ell = 3", |bench| bench.iter(|| e.modified_invariant(black_box(&d), None).unwrap()));
    c.bench_function("oracle on L(2,1), ell = 3", |bench| bench.iter(|| e.cgp_oracle(black_box(&d), None).unwrap()));
}

criterion_group!(benches, multiply, r_matrix, invariant);
criterion_main!(benches);
