//! The finite-memory automaton against direct enumeration of the walks it
//! is meant to count.

use sawcount::connconst::{z2_branching_matrix, Ordering, Pruning};

// N, E, S, W
const DIRS: [(i32, i32); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];

fn dir_index(dx: i32, dy: i32) -> usize {
    DIRS.iter().position(|&d| d == (dx, dy)).unwrap()
}

fn rank(ordering: Ordering, incoming: Option<usize>, out: usize) -> Option<i8> {
    match ordering {
        Ordering::Uniform => Some([3, 1, 2, 0][out]),
        Ordering::Relative => {
            let inc = incoming?;
            Some(match (out + 4 - inc) % 4 {
                0 => 2,
                1 => 1,
                3 => 0,
                _ => -1,
            })
        }
    }
}

/// Count walks of length `len` from the origin with the whole history in
/// view, applying the memory-`l` rules directly.
fn brute_count(l: usize, ordering: Ordering, pruning: Pruning, len: usize) -> u64 {
    fn go(
        path: &mut Vec<(i32, i32)>,
        dirs: &mut Vec<usize>,
        left: usize,
        l: usize,
        ordering: Ordering,
        pruning: Pruning,
    ) -> u64 {
        if left == 0 {
            return 1;
        }
        let s = path.len() - 1;
        let pt = path[s];
        let mut total = 0;
        'moves: for (m, &(dx, dy)) in DIRS.iter().enumerate() {
            let q = (pt.0 + dx, pt.1 + dy);
            for (i, &p) in path[..s].iter().enumerate() {
                if p == q && s - i + 1 <= l {
                    continue 'moves;
                }
            }
            if pruning == Pruning::Weitz {
                for i in 0..s.saturating_sub(1) {
                    let p = path[i];
                    let (ex, ey) = (q.0 - p.0, q.1 - p.1);
                    if ex.abs() + ey.abs() != 1 || s - i + 2 > l {
                        continue;
                    }
                    let incoming = i.checked_sub(1).map(|k| dirs[k]);
                    let starter = rank(ordering, incoming, dirs[i]);
                    let last = rank(ordering, incoming, dir_index(ex, ey));
                    if let (Some(a), Some(b)) = (starter, last) {
                        if a < b {
                            continue 'moves;
                        }
                    }
                }
            }
            path.push(q);
            dirs.push(m);
            total += go(path, dirs, left - 1, l, ordering, pruning);
            path.pop();
            dirs.pop();
        }
        total
    }
    go(&mut vec![(0, 0)], &mut Vec::new(), len, l, ordering, pruning)
}

#[test]
fn walk_counts_match_enumeration() {
    for ordering in [Ordering::Relative, Ordering::Uniform] {
        for pruning in [Pruning::None, Pruning::Weitz] {
            for l in [2, 4, 6, 8] {
                let b = z2_branching_matrix(l, ordering, pruning, 1 << 20).unwrap();
                for len in 0..=10 {
                    assert_eq!(
                        b.walk_count(len),
                        brute_count(l, ordering, pruning, len) as f64,
                        "{ordering:?} {pruning:?} L={l} len={len}"
                    );
                }
            }
        }
    }
}

#[test]
fn short_walks_are_self_avoiding_walks() {
    // number of self-avoiding walks of length 0..=12 on the square lattice
    let saw = [
        1u64, 4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100, 120292, 324932,
    ];
    let b = z2_branching_matrix(12, Ordering::Relative, Pruning::None, 1 << 20).unwrap();
    for (len, &c) in saw.iter().enumerate() {
        assert_eq!(b.walk_count(len), c as f64, "len={len}");
    }
}

#[test]
fn eigenvalue_nests_in_memory_and_pruning() {
    for ordering in [Ordering::Relative, Ordering::Uniform] {
        let mut prev = [f64::INFINITY; 2];
        for l in (2..=10).step_by(2) {
            let none = z2_branching_matrix(l, ordering, Pruning::None, 1 << 20)
                .unwrap()
                .spectral(1e-12)
                .unwrap()
                .eigenvalue;
            let weitz = z2_branching_matrix(l, ordering, Pruning::Weitz, 1 << 20)
                .unwrap()
                .spectral(1e-12)
                .unwrap()
                .eigenvalue;
            assert!(weitz <= none + 1e-10, "{ordering:?} L={l}");
            if l < 4 {
                assert!((weitz - none).abs() < 1e-10);
            }
            assert!(none <= prev[0] + 1e-10 && weitz <= prev[1] + 1e-10);
            prev = [none, weitz];
        }
    }
}

#[test]
fn gelfand_brackets_power_method() {
    let b = z2_branching_matrix(8, Ordering::Relative, Pruning::Weitz, 1 << 20).unwrap();
    let r = b.spectral(1e-12).unwrap();
    assert!(r.converged);
    for &(l, g) in &r.gelfand {
        assert!(g >= r.eigenvalue - 1e-9, "l={l}");
    }
    // the bound tightens as the power grows
    assert!(r.gelfand.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
    assert!(r.gelfand.last().unwrap().1 - r.eigenvalue < 0.01);
}
