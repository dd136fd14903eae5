//! Expansion fused with evaluation: walks the SAW tree depth-first and
//! evaluates both extreme initial conditions in one pass, without
//! materializing nodes. Subtrees of the root's children are independent
//! and are evaluated in parallel; their values are folded in child order,
//! so the result is bit-identical for any thread count.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use super::ModelParams;
use crate::error::{Error, Result};
use crate::par;
use crate::sawtree::{Fix, Step, Walker};

/// Values at the root under the all-zero and all-max initial conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FusedEval {
    pub zero: f64,
    pub max: f64,
    pub nodes: u64,
    /// True when no node was truncated, i.e. the value is exact.
    pub exact: bool,
}

const FLUSH: u64 = 4096;

struct Budget {
    limit: u64,
    used: AtomicU64,
    blown: AtomicBool,
}

impl Budget {
    fn add(&self, n: u64) -> bool {
        let total = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.limit {
            self.blown.store(true, Ordering::Relaxed);
        }
        !self.blown.load(Ordering::Relaxed)
    }
}

struct Frame {
    v: usize,
    parent: Option<usize>,
    depth: usize,
    idx: usize,
    acc: [f64; 2],
}

enum Resolved {
    Value([f64; 2]),
    Expand,
}

struct Dfs<'a, 'w> {
    walker: &'a Walker<'w>,
    params: ModelParams,
    max_depth: usize,
    on_path: Vec<bool>,
    pos: Vec<usize>,
    path: Vec<usize>,
    local: u64,
    total: u64,
    truncated: bool,
    budget: &'a Budget,
}

impl Dfs<'_, '_> {
    fn count(&mut self) -> Result<()> {
        self.local += 1;
        self.total += 1;
        if self.local >= FLUSH {
            let n = std::mem::take(&mut self.local);
            if !self.budget.add(n) {
                return Err(Error::BudgetExceeded {
                    budget: self.budget.limit,
                    expanded: self.budget.limit + 1,
                });
            }
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let n = std::mem::take(&mut self.local);
        if !self.budget.add(n) {
            return Err(Error::BudgetExceeded {
                budget: self.budget.limit,
                expanded: self.budget.limit + 1,
            });
        }
        Ok(())
    }

    /// Decide what a free walk node for `v` evaluates to, or that it must be
    /// expanded.
    fn resolve(&mut self, v: usize, parent: Option<usize>, depth: usize) -> Resolved {
        if self.walker.forced_unoccupied(v) {
            return Resolved::Value([0.0, 0.0]);
        }
        if depth == self.max_depth {
            return if self.walker.has_children(v, parent, &self.on_path) {
                self.truncated = true;
                Resolved::Value([0.0, self.params.max_value()])
            } else {
                let leaf = self.params.leaf_value();
                Resolved::Value([leaf, leaf])
            };
        }
        Resolved::Expand
    }

    fn enter(&mut self, v: usize) {
        self.on_path[v] = true;
        self.pos[v] = self.path.len();
        self.path.push(v);
    }

    fn leave(&mut self, v: usize) {
        self.on_path[v] = false;
        self.path.pop();
    }

    /// Evaluate the free walk node at the end of the current path prefix.
    /// The prefix's last vertex must not be entered yet.
    fn run(&mut self, v: usize, parent: Option<usize>, depth: usize) -> Result<[f64; 2]> {
        if let Resolved::Value(val) = self.resolve(v, parent, depth) {
            return Ok(val);
        }
        let id = self.params.identity();
        let mut stack = vec![Frame {
            v,
            parent,
            depth,
            idx: 0,
            acc: [id, id],
        }];
        self.enter(v);
        loop {
            let top = stack.last_mut().expect("non-empty stack");
            let nbrs = self.walker.g.neighbors(top.v);
            if top.idx == nbrs.len() {
                let frame = stack.pop().expect("non-empty stack");
                self.leave(frame.v);
                let val = [
                    self.params.finish(frame.acc[0]),
                    self.params.finish(frame.acc[1]),
                ];
                match stack.last_mut() {
                    None => return Ok(val),
                    Some(parent) => {
                        parent.acc[0] = self.params.fold(parent.acc[0], val[0]);
                        parent.acc[1] = self.params.fold(parent.acc[1], val[1]);
                    }
                }
                continue;
            }
            let w = nbrs[top.idx];
            top.idx += 1;
            let (tv, tparent, tdepth) = (top.v, top.parent, top.depth);
            let Some(step) =
                self.walker
                    .classify(tv, w, tparent, &self.path, &self.pos, &self.on_path)
            else {
                continue;
            };
            self.count()?;
            let child = match step {
                Step::Closing(_, Fix::Occupied) => [f64::INFINITY; 2],
                Step::Closing(_, _) | Step::Pinned(_) => [0.0; 2],
                Step::Walk(w) => match self.resolve(w, Some(tv), tdepth + 1) {
                    Resolved::Value(val) => val,
                    Resolved::Expand => {
                        let id = self.params.identity();
                        stack.push(Frame {
                            v: w,
                            parent: Some(tv),
                            depth: tdepth + 1,
                            idx: 0,
                            acc: [id, id],
                        });
                        self.enter(w);
                        continue;
                    }
                },
            };
            let top = stack.last_mut().expect("non-empty stack");
            top.acc[0] = self.params.fold(top.acc[0], child[0]);
            top.acc[1] = self.params.fold(top.acc[1], child[1]);
        }
    }
}

/// Evaluate the truncated SAW tree rooted at `root` under both extreme
/// initial conditions. `budget` bounds the number of tree nodes visited.
pub(crate) fn eval_fused(
    walker: &Walker<'_>,
    params: ModelParams,
    root: usize,
    max_depth: usize,
    budget: u64,
) -> Result<FusedEval> {
    let budget = Budget {
        limit: budget,
        used: AtomicU64::new(0),
        blown: AtomicBool::new(false),
    };
    let n = walker.g.n();
    let new_dfs = |budget| Dfs {
        walker,
        params,
        max_depth,
        on_path: vec![false; n],
        pos: vec![0; n],
        path: Vec::new(),
        local: 0,
        total: 0,
        truncated: false,
        budget,
    };

    let mut head = new_dfs(&budget);
    head.count()?; // the root
    if let Resolved::Value(val) = head.resolve(root, None, 0) {
        head.flush()?;
        return Ok(FusedEval {
            zero: val[0],
            max: val[1],
            nodes: head.total,
            exact: !head.truncated,
        });
    }

    // children of the root, classified once, in neighbor order
    head.enter(root);
    let mut steps = Vec::new();
    for &w in walker.g.neighbors(root) {
        if let Some(step) = walker.classify(root, w, None, &head.path, &head.pos, &head.on_path) {
            head.count()?;
            steps.push(step);
        }
    }
    head.flush()?;

    let results: Vec<Result<([f64; 2], u64, bool)>> = par::map(&steps, |step| match *step {
        Step::Closing(_, Fix::Occupied) => Ok(([f64::INFINITY; 2], 0, false)),
        Step::Closing(..) | Step::Pinned(_) => Ok(([0.0; 2], 0, false)),
        Step::Walk(w) => {
            let mut dfs = new_dfs(&budget);
            dfs.enter(root);
            let val = dfs.run(w, Some(root), 1)?;
            dfs.flush()?;
            Ok((val, dfs.total, dfs.truncated))
        }
    });

    let mut acc = [params.identity(); 2];
    let mut nodes = head.total;
    let mut truncated = head.truncated;
    for r in results {
        let (val, count, trunc) = r?;
        acc[0] = params.fold(acc[0], val[0]);
        acc[1] = params.fold(acc[1], val[1]);
        nodes += count;
        truncated |= trunc;
    }
    if nodes > budget.limit {
        return Err(Error::BudgetExceeded {
            budget: budget.limit,
            expanded: nodes,
        });
    }
    Ok(FusedEval {
        zero: params.finish(acc[0]),
        max: params.finish(acc[1]),
        nodes,
        exact: !truncated,
    })
}
