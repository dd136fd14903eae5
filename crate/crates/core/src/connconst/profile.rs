use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{seeded_rng, Graph};
use crate::par;
use crate::sawtree::saw_counts;

/// Which roots to enumerate walks from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "roots", rename_all = "snake_case")]
pub enum RootSelection {
    All,
    /// `m` distinct roots drawn uniformly with the given seed.
    Sample { m: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub l: usize,
    /// Max over roots of `Σ_{i≤l} N(v, i)`.
    pub max_cumulative: u64,
    /// `max_cumulative^(1/l)`.
    pub estimate: f64,
    /// Every root contributed to this row.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnProfile {
    pub roots: Vec<usize>,
    pub rows: Vec<ProfileRow>,
    /// Some root hit the budget before `l_max`; its longer rows are missing.
    pub truncated: bool,
}

/// Exact SAW counts for one root, shortening the horizon until the walk
/// enumeration fits in `budget`.
fn root_counts(g: &Graph, v: usize, l_max: usize, budget: u64) -> Result<Vec<u64>> {
    let mut l = l_max;
    loop {
        match saw_counts(g, v, l, budget) {
            Ok(c) => return Ok(c),
            Err(Error::BudgetExceeded { .. }) if l > 0 => l -= 1,
            Err(e) => return Err(e),
        }
    }
}

/// Growth profile of self-avoiding walks; `budget` bounds the walks
/// enumerated per root.
pub fn conn_profile(
    g: &Graph,
    l_max: usize,
    roots: RootSelection,
    budget: u64,
) -> Result<ConnProfile> {
    if l_max == 0 {
        return Err(invalid("l_max must be at least 1"));
    }
    let roots: Vec<usize> = match roots {
        RootSelection::All => (0..g.n()).collect(),
        RootSelection::Sample { m, seed } => {
            if m > g.n() {
                return Err(invalid(format!(
                    "cannot sample {m} roots from {} vertices",
                    g.n()
                )));
            }
            let mut idx = sample(&mut seeded_rng(seed), g.n(), m).into_vec();
            idx.sort_unstable();
            idx
        }
    };
    let counts: Vec<Result<Vec<u64>>> = par::map(&roots, |&v| root_counts(g, v, l_max, budget));
    let counts = counts.into_iter().collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let mut best = 0u64;
        let mut complete = true;
        for c in &counts {
            if c.len() < l {
                complete = false;
                continue;
            }
            best = best.max(c[..l].iter().sum());
        }
        rows.push(ProfileRow {
            l,
            max_cumulative: best,
            estimate: (best as f64).powf(1.0 / l as f64),
            complete,
        });
    }
    Ok(ConnProfile {
        truncated: rows.iter().any(|r| !r.complete),
        roots,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn cycle_profile() {
        let g = generate(GraphKind::Cycle { n: 10 }, 0).unwrap();
        let p = conn_profile(&g, 5, RootSelection::All, 1000).unwrap();
        for r in &p.rows {
            assert_eq!(r.max_cumulative, 2 * r.l as u64);
        }
        assert!((p.rows[4].estimate - 10f64.powf(0.2)).abs() < 1e-12);
        assert!(p.rows.windows(2).all(|w| w[1].estimate <= w[0].estimate));
        assert!(!p.truncated);
    }

    #[test]
    fn k4_profile() {
        let g = generate(GraphKind::Complete { n: 4 }, 0).unwrap();
        let p = conn_profile(&g, 3, RootSelection::All, 1000).unwrap();
        assert_eq!(p.rows[2].max_cumulative, 15);
        assert!((p.rows[2].estimate - 15f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn budget_truncates_rows() {
        let g = generate(GraphKind::Complete { n: 6 }, 0).unwrap();
        let p = conn_profile(&g, 5, RootSelection::All, 50).unwrap();
        assert!(p.truncated);
        assert!(p.rows[0].complete);
        assert!(!p.rows[4].complete);
    }

    #[test]
    fn sampling_is_seeded() {
        let g = generate(GraphKind::Grid { width: 8, height: 8 }, 0).unwrap();
        let sel = RootSelection::Sample { m: 5, seed: 9 };
        let a = conn_profile(&g, 4, sel, 10_000).unwrap();
        let b = conn_profile(&g, 4, sel, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.roots.len(), 5);
        assert!(conn_profile(&g, 4, RootSelection::Sample { m: 65, seed: 1 }, 10).is_err());
    }
}
