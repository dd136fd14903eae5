//! Finite-memory walk automaton for the Weitz SAW tree of Z².
//!
//! A state is the suffix of the walk that can still matter: the steps back
//! to the oldest point `P_{t−s}` with `s + |P_t − P_{t−s}|₁ ≤ L`, plus one
//! older step so that the incoming direction at every witnessed point is
//! known. A flag records whether the suffix reaches back to the origin.
//!
//! A move to `Q` is forbidden when it closes a cycle of length at most `L`.
//! With Weitz pruning it is also forbidden when `Q` has a neighbor `P_j` on
//! the stored path (other than `P_t`) such that stepping there would close a
//! loop of length at most `L` whose copy of `P_j` is fixed occupied: the
//! node for `Q` is then forced unoccupied and has no subtree. The copy is
//! occupied when the loop's first step out of `P_j` ranks below its last
//! step into `P_j` in the ordering at `P_j`.
//!
//! Under the relative ordering the rank at `P_j` depends on the step into
//! `P_j`, which the origin does not have, so loops witnessed at the origin
//! are not pruned. That prunes less than the true tree, keeping the count an
//! upper bound; such states are transient and do not affect the eigenvalue.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::spectral::{spectral_bound, CsrMatrix, SpectralResult};
use crate::error::{invalid, Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Straight > right > left, relative to the step into the vertex.
    Relative,
    /// North > south > east > west at every vertex.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    None,
    Weitz,
}

pub const DEFAULT_STATE_CAP: usize = 5_000_000;
const MAX_MEMORY: usize = 58;

// directions, clockwise: N, E, S, W
const DIRS: [(i32, i32); 4] = [(0, 1), (1, 0), (0, -1), (-1, 0)];
const UNIFORM_RANK: [i8; 4] = [3, 1, 2, 0];

fn dir_of(dx: i32, dy: i32) -> usize {
    DIRS.iter()
        .position(|&d| d == (dx, dy))
        .expect("unit step")
}

fn relative_rank(incoming: u8, out: usize) -> i8 {
    match (out + 4 - incoming as usize) % 4 {
        0 => 2,
        1 => 1,
        3 => 0,
        _ => -1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    /// Oldest first.
    steps: Vec<u8>,
    /// The suffix starts at the origin.
    complete: bool,
}

impl State {
    fn key(&self) -> u128 {
        let mut k = 0u128;
        for (i, &s) in self.steps.iter().enumerate() {
            k |= (s as u128) << (2 * i);
        }
        k | (self.steps.len() as u128) << 120 | (self.complete as u128) << 127
    }

    fn from_key(k: u128) -> Self {
        let len = ((k >> 120) & 0x7f) as usize;
        State {
            steps: (0..len).map(|i| ((k >> (2 * i)) & 3) as u8).collect(),
            complete: k >> 127 == 1,
        }
    }

    /// Points `P_{t−s}..=P_t`, oldest first, with `P_{t−s}` at the origin.
    fn points(&self) -> Vec<(i32, i32)> {
        let mut p = vec![(0, 0)];
        for &s in &self.steps {
            let (x, y) = *p.last().expect("non-empty");
            let (dx, dy) = DIRS[s as usize];
            p.push((x + dx, y + dy));
        }
        p
    }
}

struct Rules {
    memory: usize,
    ordering: Ordering,
    pruning: Pruning,
}

impl Rules {
    /// The state after moving in direction `m`, or `None` if forbidden.
    fn step(&self, st: &State, m: usize) -> Option<State> {
        let l = self.memory;
        let pts = st.points();
        let s = st.steps.len();
        let pt = pts[s];
        let q = (pt.0 + DIRS[m].0, pt.1 + DIRS[m].1);

        // cycles of length at most L
        for (i, &p) in pts[..s].iter().enumerate() {
            if p == q && s - i < l {
                return None;
            }
        }

        if self.pruning == Pruning::Weitz {
            for i in 0..s.saturating_sub(1) {
                let p = pts[i];
                let (dx, dy) = (q.0 - p.0, q.1 - p.1);
                if dx.abs() + dy.abs() != 1 || s - i + 2 > l {
                    continue;
                }
                let starter = st.steps[i] as usize;
                let last = dir_of(dx, dy);
                let (rs, rl) = match self.ordering {
                    Ordering::Uniform => (UNIFORM_RANK[starter], UNIFORM_RANK[last]),
                    // the origin has no incoming step
                    Ordering::Relative if i == 0 => continue,
                    Ordering::Relative => {
                        let inc = st.steps[i - 1];
                        (relative_rank(inc, starter), relative_rank(inc, last))
                    }
                };
                if rs < rl {
                    return None;
                }
            }
        }

        let mut steps = st.steps.clone();
        steps.push(m as u8);
        let len = steps.len();
        // walk back from the new endpoint
        let (mut x, mut y) = (0i32, 0i32);
        let mut keep = 0;
        for back in 1..=len {
            let (dx, dy) = DIRS[steps[len - back] as usize];
            x -= dx;
            y -= dy;
            if back + (x.abs() + y.abs()) as usize <= l {
                keep = back;
            }
        }
        let keep = (keep + 1).min(len);
        let complete = st.complete && keep == len;
        let mut next = State {
            steps: steps[len - keep..].to_vec(),
            complete,
        };
        if self.ordering == Ordering::Relative {
            let r = (4 - *next.steps.last().expect("non-empty") as usize) % 4;
            for s in &mut next.steps {
                *s = ((*s as usize + r) % 4) as u8;
            }
        }
        Some(next)
    }
}

/// Branching matrix of the finite-memory Weitz SAW automaton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingMatrix {
    pub k: usize,
    pub matrix: CsrMatrix,
    /// Index of the zero-length walk.
    pub start: usize,
    pub memory: usize,
    pub ordering: Ordering,
    pub pruning: Pruning,
    /// State count before isomorphic states were merged.
    pub raw_states: usize,
}

impl BranchingMatrix {
    /// `e_startᵀ M^ℓ 1`: walks of length `ℓ` the automaton allows.
    pub fn walk_count(&self, l: usize) -> f64 {
        let mut v = vec![1.0; self.k];
        let mut w = vec![0.0; self.k];
        for _ in 0..l {
            self.matrix.mul_vec(&v, &mut w);
            std::mem::swap(&mut v, &mut w);
        }
        v[self.start]
    }

    pub fn spectral(&self, tol: f64) -> Result<SpectralResult> {
        spectral_bound(&self.matrix, tol)
    }
}

/// Enumerate the automaton from the zero-length walk, then merge states
/// with identical futures.
pub fn z2_branching_matrix(
    memory: usize,
    ordering: Ordering,
    pruning: Pruning,
    state_cap: usize,
) -> Result<BranchingMatrix> {
    if memory < 2 || !memory.is_multiple_of(2) || memory > MAX_MEMORY {
        return Err(invalid(format!(
            "memory must be even and in [2, {MAX_MEMORY}], got {memory}"
        )));
    }
    let rules = Rules {
        memory,
        ordering,
        pruning,
    };
    let start = State {
        steps: Vec::new(),
        complete: true,
    };
    let mut index: HashMap<u128, u32> = HashMap::new();
    index.insert(start.key(), 0);
    let mut keys = vec![start.key()];
    let mut triples: Vec<(u32, u32, f64)> = Vec::new();
    let mut frontier = vec![0u32];
    while !frontier.is_empty() {
        let succ: Vec<Vec<u128>> = par::map(&frontier, |&i| {
            let st = State::from_key(keys[i as usize]);
            (0..4).filter_map(|m| rules.step(&st, m)).map(|s| s.key()).collect()
        });
        let mut next = Vec::new();
        for (&i, targets) in frontier.iter().zip(succ) {
            for key in targets {
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        let j = keys.len() as u32;
                        if keys.len() >= state_cap {
                            return Err(Error::StateCap { cap: state_cap });
                        }
                        index.insert(key, j);
                        keys.push(key);
                        next.push(j);
                        j
                    }
                };
                triples.push((i, j, 1.0));
            }
        }
        frontier = next;
    }
    drop(index);
    let raw = CsrMatrix::from_triples(keys.len(), triples)?;
    let (matrix, start) = lump(&raw, 0);
    Ok(BranchingMatrix {
        k: matrix.k,
        matrix,
        start,
        memory,
        ordering,
        pruning,
        raw_states: keys.len(),
    })
}

/// Coarsest partition where states in a block have equal transition counts
/// into every block; returns the quotient matrix and the block of `start`.
/// The quotient has the same walk counts from every state and the same
/// spectral radius.
fn lump(m: &CsrMatrix, start: usize) -> (CsrMatrix, usize) {
    let k = m.k;
    let mut block = vec![0u32; k];
    let mut count = 1usize;
    loop {
        let sigs: Vec<(u32, Vec<(u32, u64)>)> = par::map_range(k, |i| {
            let mut row: Vec<(u32, u64)> =
                m.row(i).map(|(j, v)| (block[j], v as u64)).collect();
            row.sort_unstable();
            let mut merged: Vec<(u32, u64)> = Vec::with_capacity(row.len());
            for (b, c) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == b => last.1 += c,
                    _ => merged.push((b, c)),
                }
            }
            (block[i], merged)
        });
        let mut ids: HashMap<&(u32, Vec<(u32, u64)>), u32> = HashMap::new();
        let mut next = vec![0u32; k];
        for (i, sig) in sigs.iter().enumerate() {
            let n = ids.len() as u32;
            next[i] = *ids.entry(sig).or_insert(n);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            let mut rep = vec![usize::MAX; new_count];
            for i in (0..k).rev() {
                rep[block[i] as usize] = i;
            }
            let mut triples = Vec::new();
            for (b, &i) in rep.iter().enumerate() {
                for &(t, c) in &sigs[i].1 {
                    triples.push((b as u32, t, c as f64));
                }
            }
            let q = CsrMatrix::from_triples(new_count, triples).expect("valid quotient");
            return (q, block[start] as usize);
        }
        count = new_count;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_two_is_non_backtracking() {
        for ordering in [Ordering::Relative, Ordering::Uniform] {
            for pruning in [Pruning::None, Pruning::Weitz] {
                let b = z2_branching_matrix(2, ordering, pruning, 1000).unwrap();
                for l in 1..8 {
                    assert_eq!(b.walk_count(l), 4.0 * 3f64.powi(l as i32 - 1));
                }
                let r = b.spectral(1e-12).unwrap();
                assert!((r.eigenvalue - 3.0).abs() < 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_memory() {
        assert!(z2_branching_matrix(3, Ordering::Relative, Pruning::None, 10).is_err());
        assert!(z2_branching_matrix(0, Ordering::Relative, Pruning::None, 10).is_err());
        assert_eq!(
            z2_branching_matrix(10, Ordering::Relative, Pruning::None, 10),
            Err(Error::StateCap { cap: 10 })
        );
    }

    #[test]
    fn rows_have_at_most_three_moves() {
        let b = z2_branching_matrix(6, Ordering::Relative, Pruning::Weitz, 1 << 20).unwrap();
        for i in 0..b.k {
            if i != b.start {
                assert!(b.matrix.row_sum(i) <= 3.0);
            }
        }
        assert_eq!(b.matrix.row_sum(b.start), 4.0);
    }

    #[test]
    fn key_round_trip() {
        let s = State {
            steps: vec![0, 1, 1, 3, 2],
            complete: true,
        };
        assert_eq!(State::from_key(s.key()), s);
    }
}
