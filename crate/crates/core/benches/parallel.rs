//! Sequential fallback against the rayon pool on the main workloads.
//!
//! `threads=1` takes the plain sequential path inside `par`; the other
//! variant uses every available core. Build with `--no-default-features`
//! to compile rayon out entirely.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sawcount::connconst::{conn_profile, z2_branching_matrix, Ordering, Pruning, RootSelection};
use sawcount::counting::partition_hc;
use sawcount::par::with_threads;
use sawcount::recurrence::marginal_interval;
use sawcount::{generate, GraphKind, ModelParams};

fn thread_counts() -> Vec<usize> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    if all > 1 {
        vec![1, all]
    } else {
        vec![1]
    }
}

fn bench(c: &mut Criterion) {
    let grid = generate(GraphKind::Grid { width: 8, height: 8 }, 0).unwrap();
    let sparse = generate(GraphKind::Gnp { n: 2000, d: 3.0 }, 1).unwrap();
    let small = generate(GraphKind::Gnp { n: 60, d: 3.0 }, 2).unwrap();
    let hc = ModelParams::HardCore { lambda: 1.0 };

    let mut group = c.benchmark_group("parallel");
    group.sample_size(10);
    for t in thread_counts() {
        group.bench_with_input(BenchmarkId::new("marginal_grid_depth12", t), &t, |b, &t| {
            b.iter(|| with_threads(t, || marginal_interval(black_box(&grid), 27, hc, None, 12, u64::MAX)))
        });
        group.bench_with_input(BenchmarkId::new("partition_hc_gnp60", t), &t, |b, &t| {
            b.iter(|| with_threads(t, || partition_hc(black_box(&small), 1.0, 0.01, 1 << 24)))
        });
        group.bench_with_input(BenchmarkId::new("conn_profile_gnp2000", t), &t, |b, &t| {
            let roots = RootSelection::Sample { m: 20, seed: 1 };
            b.iter(|| with_threads(t, || conn_profile(black_box(&sparse), 10, roots, 1 << 26)))
        });
        group.bench_with_input(BenchmarkId::new("z2_branching_L14", t), &t, |b, &t| {
            b.iter(|| {
                with_threads(t, || {
                    z2_branching_matrix(14, Ordering::Relative, Pruning::Weitz, 1 << 22)
                        .and_then(|m| m.spectral(1e-12))
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
