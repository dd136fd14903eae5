//! Recurrences on the complete `d`-ary tree, evaluated one level at a time.
//!
//! Every node at a given depth sees the same subtree, so the truncated tree
//! collapses to a scalar iteration. This gives the same numbers as the
//! graph-based evaluator on trees far too large to enumerate.

use super::adaptive::{adaptive_search, ApproxResult, Bracket, DepthSchedule};
use super::ModelParams;
use crate::error::{invalid, Result};

/// Complete tree where the root and every internal node have `d` children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularTree {
    pub d: usize,
    /// Depth of the leaves; `None` for the infinite tree.
    pub depth: Option<usize>,
}

impl RegularTree {
    pub fn new(d: usize, depth: Option<usize>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("arity must be at least 1"));
        }
        Ok(RegularTree { d, depth })
    }

    /// Nodes at depths `0..=depth`, saturating.
    pub fn nodes_to(&self, depth: usize) -> u64 {
        let depth = self.depth.map_or(depth, |h| h.min(depth));
        let mut total = 0u64;
        let mut level = 1u64;
        for _ in 0..=depth {
            total = total.saturating_add(level);
            level = level.saturating_mul(self.d as u64);
        }
        total
    }

    /// Root value with the depth-`trunc` frontier pinned to `init`.
    pub fn eval(&self, params: &ModelParams, trunc: usize, init: f64) -> f64 {
        let (start, mut x) = match self.depth {
            Some(h) if h <= trunc => (h, params.leaf_value()),
            _ => (trunc, init),
        };
        for _ in 0..start {
            let mut acc = params.identity();
            for _ in 0..self.d {
                acc = params.fold(acc, x);
            }
            x = params.finish(acc);
        }
        x
    }

    /// Sandwich bracket at truncation depth `trunc`.
    pub fn bracket(&self, params: &ModelParams, trunc: usize) -> Bracket {
        let exact = self.depth.is_some_and(|h| h <= trunc);
        let a = self.eval(params, trunc, 0.0);
        let b = self.eval(params, trunc, params.max_value());
        Bracket {
            lo: a.min(b),
            hi: a.max(b),
            depth: trunc,
            nodes: self.nodes_to(trunc),
            exact,
        }
    }

    /// Sandwich widths `|F(0_ℓ) − F(1_ℓ)|` for `ℓ = 0..=max_trunc`.
    pub fn gaps(&self, params: &ModelParams, max_trunc: usize) -> Vec<f64> {
        (0..=max_trunc)
            .map(|l| self.bracket(params, l).width())
            .collect()
    }

    /// Smallest schedule depth whose bracket has width at most `2 · tol`.
    ///
    /// The node count reported is that of the tree being stood in for, so
    /// no budget applies.
    pub fn adaptive(
        &self,
        params: &ModelParams,
        tol: f64,
        schedule: DepthSchedule,
    ) -> Result<ApproxResult> {
        params.validate()?;
        adaptive_search(tol, u64::MAX, schedule, |depth, _| {
            Ok(self.bracket(params, depth))
        })
    }
}
