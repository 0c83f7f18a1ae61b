use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use spectral_taylor::divdiff::{dd_hermite_mc_with, NodeList};
use spectral_taylor::functions::GaussianMixture;
use spectral_taylor::operator::{bracket_mc_with, HermitianMatrix, Spectrum};
use spectral_taylor::spectral_action::{taylor_term_with, TermOptions};
use spectral_taylor::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn taylor_terms(c: &mut Criterion) {
    let f = GaussianMixture::new(&[(1.0, 1.0), (0.5, -0.3)]).unwrap();
    let mut group = c.benchmark_group("taylor_term");
    group.sample_size(10);
    for (dim, n) in [(8, 4), (12, 4), (8, 6)] {
        let spec = Spectrum::dirac_circle(dim).unwrap();
        let a = HermitianMatrix::random(dim, 0.3, 7).unwrap();
        for (name, exec) in MODES {
            let opts = TermOptions {
                exec,
                cyclic_reduction: false,
                ..TermOptions::default()
            };
            group.bench_with_input(
                BenchmarkId::new(name, format!("N{dim}_n{n}")),
                &opts,
                |b, opts| b.iter(|| taylor_term_with(n, &spec, &a, &f, black_box(opts)).unwrap()),
            );
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let f = GaussianMixture::new(&[(1.0, 1.0)]).unwrap();
    let nodes = NodeList::new(vec![-1.0, 0.5, 2.0, 0.1, -0.4]).unwrap();
    let spec = Spectrum::linear(4).unwrap();
    let mats: Vec<HermitianMatrix> = (0..4)
        .map(|s| HermitianMatrix::random(4, 1.0, s).unwrap())
        .collect();
    let ops: Vec<_> = mats.iter().map(|m| m.matrix()).collect();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("dd_hermite_mc", name), |b| {
            b.iter(|| dd_hermite_mc_with(&f, black_box(&nodes), 200_000, 1, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new("bracket_mc", name), |b| {
            b.iter(|| bracket_mc_with(black_box(&ops), &spec, 1.0, 100_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, taylor_terms, monte_carlo);
criterion_main!(benches);
