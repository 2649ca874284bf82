use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use korobov_qmc::checks::lemma_grid;
use korobov_qmc::expsum::expsum_union_with;
use korobov_qmc::fourier::{random_function, Frequency, WeightScheme};
use korobov_qmc::integrator::qmc_apply_spectral_with;
use korobov_qmc::korobov::union_set;
use korobov_qmc::{Execution, SetKind};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn union_sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("expsum_union");
    let k = Frequency::from_dense(&[3, -1, 4, 1]);
    for m in [50u64, 200] {
        let u = union_set(SetKind::S, m, 4).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, m), &u, |b, u| {
                b.iter(|| expsum_union_with(&k, u, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn integration(c: &mut Criterion) {
    let mut group = c.benchmark_group("qmc_apply_spectral");
    let f = random_function(7, 4, 8, 20, WeightScheme::F2).unwrap();
    let u = union_set(SetKind::T, 200, 4).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| qmc_apply_spectral_with(&f, &u, exec).unwrap()));
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("lemma_grid");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| lemma_grid(&[2, 3], &[7, 11, 13], 2, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, union_sums, integration, grid);
criterion_main!(benches);
