use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qchain_core::{Approach, ChainSpec, OpenChain};

fn build_and_solve(c: &mut Criterion) {
    let cases = [
        ("dimer", ChainSpec::dimer(1.5, 1.5, 1.0, 2.0, 0.0)),
        ("n3", ChainSpec::uniform(3, 1.0, 0.5, 2.0, 0.1)),
        ("n4", ChainSpec::uniform(4, 1.0, 0.5, 2.0, 0.1)),
    ];
    let mut group = c.benchmark_group("steady");
    for (name, spec) in &cases {
        for approach in Approach::ALL {
            group.bench_with_input(
                BenchmarkId::new(approach.as_str(), name),
                spec,
                |b, spec| {
                    b.iter(|| {
                        OpenChain::build(black_box(spec), approach)
                            .and_then(|c| c.solve())
                            .unwrap()
                    })
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, build_and_solve);
criterion_main!(benches);
