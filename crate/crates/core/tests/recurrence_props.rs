//! Randomized checks of the SAW-tree evaluators against the exact oracles.

use std::collections::BTreeMap;

use proptest::prelude::*;
use sawcount::counting::{oracle_marginal, oracle_z, partition_hc, partition_md};
use sawcount::recurrence::{marginal_adaptive, marginal_interval};
use sawcount::{BoundaryCondition, DepthSchedule, Error, Graph, ModelParams, Pin};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop::bool::weighted(0.4), pairs).prop_map(move |keep| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if keep[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn params() -> impl Strategy<Value = ModelParams> {
    prop_oneof![
        (0.05..5.0f64).prop_map(|lambda| ModelParams::HardCore { lambda }),
        (0.05..5.0f64).prop_map(|gamma| ModelParams::MonomerDimer { gamma }),
    ]
}

fn exact(g: &Graph, v: usize, p: &ModelParams, b: Option<&BoundaryCondition>) -> f64 {
    let m = oracle_marginal(g, v, p, b).unwrap();
    m.ratio.unwrap_or(m.probability)
}

/// Greedy pins from a random draw: occupied only when no neighbor already is.
fn boundary(g: &Graph, root: usize, draw: &[u8]) -> BoundaryCondition {
    let mut a = BTreeMap::new();
    for v in 0..g.n() {
        if v == root {
            continue;
        }
        match draw[v % draw.len()] % 4 {
            0 if g.neighbors(v).iter().all(|w| a.get(w) != Some(&Pin::Occupied)) => {
                a.insert(v, Pin::Occupied);
            }
            1 => {
                a.insert(v, Pin::Unoccupied);
            }
            _ => {}
        }
    }
    BoundaryCondition::new(g, a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn edge_list_round_trip(g in graph(12)) {
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn sandwich_contains_exact_marginal(g in graph(9), p in params(), v in 0usize..9, depth in 0usize..7) {
        let v = v % g.n();
        let b = marginal_interval(&g, v, p, None, depth, 1 << 22).unwrap();
        let want = exact(&g, v, &p, None);
        let slack = 1e-12 * want.abs().max(1e-300);
        prop_assert!(b.lo - slack <= want && want <= b.hi + slack,
            "[{}, {}] misses {}", b.lo, b.hi, want);
    }

    #[test]
    fn full_depth_is_exact(g in graph(9), p in params(), v in 0usize..9) {
        let v = v % g.n();
        let b = marginal_interval(&g, v, p, None, g.n() + 1, 1 << 22).unwrap();
        prop_assert!(b.exact);
        let want = exact(&g, v, &p, None);
        prop_assert!((b.lo - want).abs() <= 1e-10 * want.abs().max(1e-300));
        prop_assert_eq!(b.lo, b.hi);
    }

    #[test]
    fn pinned_hard_core_is_exact(g in graph(9), lambda in 0.05..5.0f64, v in 0usize..9, draw in prop::collection::vec(any::<u8>(), 9)) {
        let v = v % g.n();
        let bc = boundary(&g, v, &draw);
        let p = ModelParams::HardCore { lambda };
        let b = marginal_interval(&g, v, p, Some(&bc), g.n() + 1, 1 << 22).unwrap();
        let want = exact(&g, v, &p, Some(&bc));
        prop_assert!((b.lo - want).abs() <= 1e-10 * want.abs().max(1e-300),
            "got {} want {}", b.lo, want);
        // pinning the root itself is refused
        let mut a: BTreeMap<usize, Pin> = bc.iter().collect();
        a.insert(v, Pin::Unoccupied);
        let pinned = BoundaryCondition::new(&g, a).unwrap();
        prop_assert_eq!(marginal_interval(&g, v, p, Some(&pinned), 2, 100), Err(Error::RootPinned(v)));
    }

    #[test]
    fn brackets_nest_with_depth(g in graph(9), p in params(), v in 0usize..9) {
        let v = v % g.n();
        let mut prev: Option<(f64, f64)> = None;
        for depth in 0..=g.n() + 1 {
            let b = marginal_interval(&g, v, p, None, depth, 1 << 22).unwrap();
            if let Some((lo, hi)) = prev {
                let slack = 1e-12 * hi.abs().max(1.0);
                prop_assert!(b.lo >= lo - slack && b.hi <= hi + slack, "depth {}", depth);
            }
            prev = Some((b.lo, b.hi));
        }
    }

    #[test]
    fn adaptive_meets_tolerance(g in graph(9), p in params(), v in 0usize..9, tol_exp in 2i32..10) {
        let v = v % g.n();
        let tol = 10f64.powi(-tol_exp);
        for schedule in [DepthSchedule::Doubling, DepthSchedule::Increment] {
            let r = marginal_adaptive(&g, v, p, None, tol, 1 << 22, schedule).unwrap();
            let want = exact(&g, v, &p, None);
            prop_assert!(r.hi - r.lo <= 2.0 * tol);
            prop_assert!((r.value - want).abs() <= tol + 1e-12 * want.abs());
        }
    }

    #[test]
    fn partition_functions_are_certified(g in graph(10), a in 0.1..3.0f64, eps_exp in 1i32..4) {
        let eps = 10f64.powi(-eps_exp);
        let hc = partition_hc(&g, a, eps, 1 << 22).unwrap();
        let md = partition_md(&g, a, eps, 1 << 22).unwrap();
        for (r, p) in [(hc, ModelParams::HardCore { lambda: a }), (md, ModelParams::MonomerDimer { gamma: a })] {
            let z = oracle_z(&g, &p).unwrap();
            prop_assert!(!r.failed);
            prop_assert!((r.value / z - 1.0).abs() <= eps);
            prop_assert!(r.lo <= z * (1.0 + 1e-12) && z <= r.hi * (1.0 + 1e-12));
            prop_assert!(r.log_lo <= r.log_value + 1e-12 && r.log_value <= r.log_hi + 1e-12);
        }
    }
}

#[test]
fn small_partition_functions_are_exact() {
    let k2 = Graph::parse_edge_list("0 1").unwrap();
    assert_eq!(partition_md(&k2, 2.0, 0.01, 1000).unwrap().value, 3.0);
    assert_eq!(partition_hc(&k2, 1.0, 0.01, 1000).unwrap().value, 3.0);
    let c4 = Graph::parse_edge_list("0 1\n1 2\n2 3\n3 0").unwrap();
    let r = partition_md(&c4, 1.0, 0.01, 1000).unwrap();
    assert!((r.value - 7.0).abs() < 0.07);
}
