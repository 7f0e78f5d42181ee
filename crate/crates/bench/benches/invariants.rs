use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use smallcover::betti::{small_cover_betti, FaceRing};
use smallcover::charmap::{factor_compatible, validate};
use smallcover::enumerate::enumerate_charmaps;
use smallcover::hodge::hodge_analysis;
use smallcover::polytope::rz_poincare_exhaustive;
use smallcover::triangular::blockize;
use smallcover::{samples, PolygonProduct};

fn linear_algebra(c: &mut Criterion) {
    let lam = samples::hexagon_pair();
    c.bench_function("rref 4x12", |b| b.iter(|| black_box(lam.matrix()).rref()));
    c.bench_function("validate hexagon pair", |b| b.iter(|| validate(black_box(&lam))));
}

fn betti(c: &mut Criterion) {
    let lam = samples::hexagon_pair();
    c.bench_function("rational betti hexagon pair", |b| b.iter(|| small_cover_betti(black_box(&lam)).unwrap()));
    c.bench_function("face ring + Sq1 hexagon pair", |b| {
        b.iter(|| FaceRing::new(black_box(&lam)).unwrap().sq1_homology())
    });
    let p = PolygonProduct::new(&[6, 6]).unwrap();
    c.bench_function("RZ betti exhaustive [6,6]", |b| b.iter(|| rz_poincare_exhaustive(black_box(&p)).unwrap()));
}

fn hodge_and_blocks(c: &mut Criterion) {
    let lam = samples::hexagon_pair();
    c.bench_function("hodge hexagon pair", |b| b.iter(|| hodge_analysis(black_box(&lam)).unwrap()));
    let cert = factor_compatible(&lam).unwrap().into_certificate().unwrap();
    c.bench_function("blockize hexagon pair", |b| b.iter(|| blockize(black_box(&cert)).unwrap()));
}

fn enumeration(c: &mut Criterion) {
    let p = PolygonProduct::new(&[4, 4]).unwrap();
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(20);
    group.bench_function("[4,4]", |b| b.iter(|| enumerate_charmaps(black_box(&p), 1).unwrap()));
    group.finish();
}

criterion_group!(benches, linear_algebra, betti, hodge_and_blocks, enumeration);
criterion_main!(benches);
