use sawcount::connconst::{conn_profile, RootSelection};
use sawcount::sawtree::saw_counts;
use sawcount::{generate, Error, Graph, GraphKind};

#[test]
fn generators_have_expected_shape() {
    let g = generate(GraphKind::Grid { width: 3, height: 4 }, 0).unwrap();
    assert_eq!((g.n(), g.edge_count(), g.max_degree()), (12, 17, 4));
    let g = generate(GraphKind::DaryTree { d: 3, depth: 3 }, 0).unwrap();
    assert_eq!((g.n(), g.edge_count()), (40, 39));
    assert!(g.is_connected());
    let g = generate(GraphKind::Complete { n: 5 }, 0).unwrap();
    assert_eq!(g.edge_count(), 10);
    let a = generate(GraphKind::Gnp { n: 100, d: 3.0 }, 4).unwrap();
    assert_eq!(a, generate(GraphKind::Gnp { n: 100, d: 3.0 }, 4).unwrap());
}

#[test]
fn parse_errors_are_reported() {
    assert!(matches!(Graph::parse_edge_list("0 1\n1 x"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(Graph::parse_edge_list("0 1 2"), Err(Error::Parse { line: 1, .. })));
    assert_eq!(Graph::parse_edge_list("3 3"), Err(Error::SelfLoop(3)));
    assert!(matches!(Graph::parse_edge_list("0 1\n1 0"), Err(Error::DuplicateEdge(..))));
    let g = Graph::parse_edge_list("# n 5\r\n0 1\r\n\r\n# comment\r\n").unwrap();
    assert_eq!((g.n(), g.edge_count()), (5, 1));
}

#[test]
fn tree_walk_counts_are_powers() {
    for d in [2usize, 3] {
        let g = generate(GraphKind::DaryTree { d, depth: 5 }, 0).unwrap();
        let c = saw_counts(&g, 0, 5, 1 << 20).unwrap();
        // index i holds walks of length i + 1
        for (i, &n) in c.iter().enumerate() {
            assert_eq!(n, (d as u64).pow(i as u32 + 1), "d={d} i={i}");
        }
        let p = conn_profile(&g, 5, RootSelection::All, 1 << 20).unwrap();
        // interior vertices have degree d + 1
        assert!(p.rows[0].estimate <= (d + 1) as f64);
        for w in c.windows(2) {
            assert!(w[1] <= d as u64 * w[0]);
        }
    }
}

#[test]
fn profile_counts_agree_with_saw_counts() {
    let g = generate(GraphKind::Gnp { n: 60, d: 3.0 }, 8).unwrap();
    let p = conn_profile(&g, 6, RootSelection::All, 1 << 20).unwrap();
    for row in &p.rows {
        let best = (0..g.n())
            .map(|v| saw_counts(&g, v, row.l, 1 << 20).unwrap().iter().sum::<u64>())
            .max()
            .unwrap();
        assert_eq!(row.max_cumulative, best, "l={}", row.l);
    }
}
