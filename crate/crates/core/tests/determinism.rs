//! Results must not depend on the worker count.

use sawcount::connconst::{conn_profile, z2_branching_matrix, Ordering, Pruning, RootSelection};
use sawcount::counting::{partition_hc, partition_md};
use sawcount::decay::symmetrize_check;
use sawcount::par::with_threads;
use sawcount::recurrence::marginal_interval;
use sawcount::{generate, GraphKind, ModelParams};

fn same_under_threads<R: PartialEq + std::fmt::Debug + Send>(f: impl Fn() -> R + Sync) {
    let one = with_threads(1, &f);
    let many = with_threads(4, &f);
    assert_eq!(one, many);
}

#[test]
fn partition_functions() {
    let g = generate(GraphKind::Gnp { n: 40, d: 3.0 }, 11).unwrap();
    same_under_threads(|| partition_hc(&g, 1.0, 0.05, 1 << 22).unwrap());
    same_under_threads(|| partition_md(&g, 1.0, 0.05, 1 << 22).unwrap());
}

#[test]
fn marginals_and_budget_failures() {
    let g = generate(GraphKind::Grid { width: 6, height: 6 }, 0).unwrap();
    let hc = ModelParams::HardCore { lambda: 1.0 };
    same_under_threads(|| marginal_interval(&g, 14, hc, None, 9, 1 << 24));
    // exhaustion must be reported identically too
    same_under_threads(|| marginal_interval(&g, 14, hc, None, 12, 5000));
}

#[test]
fn profiles_matrices_and_sampling() {
    let g = generate(GraphKind::Gnp { n: 300, d: 3.0 }, 3).unwrap();
    same_under_threads(|| {
        conn_profile(&g, 8, RootSelection::Sample { m: 10, seed: 5 }, 1 << 20).unwrap()
    });
    same_under_threads(|| {
        z2_branching_matrix(8, Ordering::Relative, Pruning::Weitz, 1 << 20).unwrap()
    });
    let p = ModelParams::MonomerDimer { gamma: 1.5 };
    same_under_threads(|| symmetrize_check(&p, 6, 0.3, 1.7, 3000, 9).unwrap());
}
