use serde::{Deserialize, Serialize};

use super::fused::{eval_fused, FusedEval};
use super::ModelParams;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::sawtree::{BoundaryCondition, Walker};

/// Certified interval from one truncation depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub depth: usize,
    pub nodes: u64,
    /// No node was truncated, so `lo == hi` is the exact marginal.
    pub exact: bool,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub(crate) fn from_eval(e: FusedEval, depth: usize) -> Self {
        Bracket {
            lo: e.zero.min(e.max),
            hi: e.zero.max(e.max),
            depth,
            nodes: e.nodes,
            exact: e.exact,
        }
    }
}

/// Value with a certified interval, as returned by the adaptive evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
    /// Deepest truncation evaluated.
    pub depth: usize,
    /// Tree nodes visited over all depths tried.
    pub nodes: u64,
}

/// Sequence of truncation depths tried by the adaptive evaluator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthSchedule {
    /// 0, 1, 2, 4, 8, ...
    #[default]
    Doubling,
    /// 0, 1, 2, 3, ...: finds the smallest sufficient depth.
    Increment,
}

impl DepthSchedule {
    pub fn next(self, depth: usize) -> usize {
        match self {
            DepthSchedule::Doubling if depth > 0 => depth.saturating_mul(2),
            _ => depth + 1,
        }
    }
}

/// Deepest depth the search will try before giving up on an infinite tree.
const MAX_DEPTH: usize = 1 << 16;

/// Run `eval(depth, remaining_budget)` over the schedule until the bracket
/// is narrow enough or exact. The budget is shared by all iterations.
pub(crate) fn adaptive_search<F>(
    tol: f64,
    budget: u64,
    schedule: DepthSchedule,
    mut eval: F,
) -> Result<ApproxResult>
where
    F: FnMut(usize, u64) -> Result<Bracket>,
{
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut used = 0u64;
    let mut best: Option<Bracket> = None;
    let mut depth = 0usize;
    loop {
        let remaining = budget.saturating_sub(used);
        let b = match eval(depth, remaining) {
            Ok(b) => b,
            Err(Error::BudgetExceeded { .. }) => {
                let (lo, hi, d) = best.map_or((0.0, f64::INFINITY, 0), |b| (b.lo, b.hi, b.depth));
                return Err(Error::Unconverged {
                    lo,
                    hi,
                    depth: d,
                    nodes: budget,
                });
            }
            Err(e) => return Err(e),
        };
        used = used.saturating_add(b.nodes);
        best = Some(b);
        if b.exact || b.width() <= 2.0 * tol {
            return Ok(ApproxResult {
                value: 0.5 * (b.lo + b.hi),
                lo: b.lo,
                hi: b.hi,
                tolerance: tol,
                depth,
                nodes: used,
            });
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Unconverged {
                lo: b.lo,
                hi: b.hi,
                depth,
                nodes: used,
            });
        }
        depth = schedule.next(depth);
    }
}

fn interval_with(
    walker: &Walker<'_>,
    v: usize,
    params: ModelParams,
    depth: usize,
    budget: u64,
) -> Result<Bracket> {
    let e = eval_fused(walker, params, v, depth, budget)?;
    Ok(Bracket::from_eval(e, depth))
}

/// Evaluate the depth-`depth` truncation of the SAW tree at `v` under both
/// extreme initial conditions. The exact marginal (ratio `R_v` for
/// hard-core, monomer probability for monomer-dimer) lies in `[lo, hi]`.
pub fn marginal_interval(
    g: &Graph,
    v: usize,
    params: ModelParams,
    boundary: Option<&BoundaryCondition>,
    depth: usize,
    budget: u64,
) -> Result<Bracket> {
    params.validate()?;
    if budget == 0 {
        return Err(invalid("node budget must be positive"));
    }
    let walker = Walker::new(g, params.mode(), boundary, 0)?;
    walker.check_root(v)?;
    interval_with(&walker, v, params, depth, budget)
}

/// Deepen the truncation until the certified interval has width at most
/// `2 · tol`; `value` is its midpoint.
pub fn marginal_adaptive(
    g: &Graph,
    v: usize,
    params: ModelParams,
    boundary: Option<&BoundaryCondition>,
    tol: f64,
    budget: u64,
    schedule: DepthSchedule,
) -> Result<ApproxResult> {
    params.validate()?;
    let walker = Walker::new(g, params.mode(), boundary, 0)?;
    walker.check_root(v)?;
    adaptive_search(tol, budget, schedule, |depth, remaining| {
        interval_with(&walker, v, params, depth, remaining)
    })
}

/// As [`marginal_adaptive`] on the subgraph induced by vertices
/// `first_alive..n`, without materializing it.
pub(crate) fn marginal_adaptive_alive(
    g: &Graph,
    first_alive: usize,
    v: usize,
    params: ModelParams,
    tol: f64,
    budget: u64,
    schedule: DepthSchedule,
) -> Result<ApproxResult> {
    let walker = Walker::new(g, params.mode(), None, first_alive)?;
    walker.check_root(v)?;
    adaptive_search(tol, budget, schedule, |depth, remaining| {
        interval_with(&walker, v, params, depth, remaining)
    })
}
