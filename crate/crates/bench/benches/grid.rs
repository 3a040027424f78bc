use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trackcop::diagonals::fig2;
use trackcop::{
    check_grid, extract_psi, materialize_grid, psi_bounds, uniform_knots, CopulaCpsi, DiagonalSpec, GridMode,
    PsiSelector, Track,
};

fn spec(n: usize) -> Arc<DiagonalSpec> {
    Arc::new(DiagonalSpec::new(fig2(n), Track::identity()).unwrap())
}

fn benches(c: &mut Criterion) {
    for n in [101, 201, 401] {
        let s = spec(n);
        let mesh = uniform_knots(n);
        let copula = CopulaCpsi::new(PsiSelector::Lower.resolve(&s).unwrap()).unwrap();
        let grid = materialize_grid(&copula, &mesh).unwrap();

        c.bench_with_input(BenchmarkId::new("psi_bounds", n), &s, |b, s| b.iter(|| psi_bounds(black_box(s))));
        c.bench_with_input(BenchmarkId::new("materialize_grid", n), &mesh, |b, mesh| {
            b.iter(|| materialize_grid(&copula, black_box(mesh)))
        });
        c.bench_with_input(BenchmarkId::new("check_grid", n), &grid, |b, g| {
            b.iter(|| check_grid(black_box(g), GridMode::Copula))
        });
        c.bench_with_input(BenchmarkId::new("extract_psi", n), &grid, |b, g| {
            b.iter(|| extract_psi(black_box(g), &Track::identity()))
        });
    }
}

criterion_group!(grid, benches);
criterion_main!(grid);
