use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use multilin::{
    calculus_map, eigh, norm_bounds, sample, FamilyKind, HilbertSpace, MultiMap, MultiPoly,
    NormParams, Vector,
};
use num_complex::Complex64;

fn spaces(dim: usize, arity: usize) -> (Vec<HilbertSpace>, HilbertSpace) {
    let h = HilbertSpace::new(dim, "H").unwrap();
    (vec![h.clone(); arity], h)
}

fn bench_apply(c: &mut Criterion) {
    let mut rng = sample::rng(1);
    let (domain, codomain) = spaces(4, 3);
    let t = sample::multimap(&mut rng, domain.clone(), codomain).unwrap();
    let xs: Vec<Vector> = domain.iter().map(|h| sample::vector(&mut rng, h)).collect();
    c.bench_function("apply trilinear dim 4", |b| {
        b.iter(|| black_box(&t).apply(black_box(&xs)).unwrap())
    });
}

fn bench_compose(c: &mut Criterion) {
    let mut rng = sample::rng(2);
    let (domain, codomain) = spaces(4, 2);
    let s = sample::multimap(&mut rng, domain.clone(), codomain.clone()).unwrap();
    let parts: Vec<MultiMap> = (0..2)
        .map(|_| sample::multimap(&mut rng, domain[..1].to_vec(), codomain.clone()).unwrap())
        .collect();
    c.bench_function("compose bilinear with two linear maps dim 4", |b| {
        b.iter(|| black_box(&s).compose(black_box(&parts)).unwrap())
    });
}

fn bench_norm_bounds(c: &mut Criterion) {
    let mut rng = sample::rng(3);
    let (domain, codomain) = spaces(4, 2);
    let t = sample::multimap(&mut rng, domain, codomain).unwrap();
    let params = NormParams { seed: 7, ..NormParams::default() };
    c.bench_function("norm bounds bilinear dim 4", |b| {
        b.iter(|| norm_bounds(black_box(&t), black_box(&params)).unwrap())
    });
}

fn bench_eigh(c: &mut Criterion) {
    let mut rng = sample::rng(4);
    let h = HilbertSpace::new(16, "H").unwrap();
    let a = sample::hermitian(&mut rng, &h);
    c.bench_function("eigh hermitian dim 16", |b| {
        b.iter(|| eigh(black_box(&a)).unwrap())
    });
}

fn bench_calculus_map(c: &mut Criterion) {
    let mut rng = sample::rng(5);
    let h = HilbertSpace::new(4, "H").unwrap();
    let a = sample::hermitian_with_spectrum_in(&mut rng, &h, -1.5, 1.5);
    let ctx = FamilyKind::Mult.context(&a).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let p = MultiPoly::new(
        2,
        vec![(one, vec![2, 0]), (one, vec![1, 1]), (one, vec![0, 2])],
    )
    .unwrap();
    c.bench_function("calculus map bivariate quadratic dim 4", |b| {
        b.iter(|| calculus_map(black_box(&ctx), black_box(&p)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_apply,
    bench_compose,
    bench_norm_bounds,
    bench_eigh,
    bench_calculus_map
);
criterion_main!(benches);
