//! Partition functions by self-reducibility, and exact oracles.
//!
//! Vertices are eliminated in ascending id order. The `i`-th factor is a
//! marginal at vertex `i` in the subgraph induced by `i..n`, computed on
//! the original graph with the lower ids masked out.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decay::{decay_factor_hc, decay_factor_md, DecayReport};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::par;
use crate::recurrence::{marginal_adaptive_alive, ApproxResult, DepthSchedule, ModelParams};
use crate::sawtree::{BoundaryCondition, Pin};

/// Approximate partition function with a certified interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub model: ModelParams,
    pub value: f64,
    pub log_value: f64,
    pub lo: f64,
    pub hi: f64,
    pub log_lo: f64,
    pub log_hi: f64,
    pub eps: f64,
    /// Deepest truncation used by any factor.
    pub depth: usize,
    pub nodes: u64,
    pub budget: u64,
    /// Some factor ran out of budget; `lo`/`hi` remain certified but may be
    /// wider than `(1 ± eps)`.
    pub failed: bool,
    pub failed_vertices: Vec<usize>,
    /// Analytic decay report for the graph's degree bound, when defined.
    pub advisory: Option<DecayReport>,
}

/// One factor of the telescoping product.
#[derive(Debug, Clone, Copy)]
struct Factor {
    lo: f64,
    hi: f64,
    value: f64,
    depth: usize,
    nodes: u64,
    failed: bool,
}

impl Factor {
    fn from_result(r: &std::result::Result<ApproxResult, Error>, floor: f64, ceil: f64) -> Self {
        match *r {
            Ok(a) => Factor {
                lo: a.lo,
                hi: a.hi,
                value: a.value,
                depth: a.depth,
                nodes: a.nodes,
                failed: false,
            },
            Err(Error::Unconverged { lo, hi, depth, nodes }) => {
                let (lo, hi) = (lo.max(floor), hi.min(ceil));
                Factor {
                    lo,
                    hi,
                    value: 0.5 * (lo + hi),
                    depth,
                    nodes,
                    failed: true,
                }
            }
            Err(_) => unreachable!("only budget failures are recoverable"),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("eps must lie in (0, 1], got {eps}")))
    }
}

/// Degree of `v` among vertices `>= v`.
fn alive_degree(g: &Graph, v: usize) -> usize {
    g.neighbors(v).iter().filter(|&&w| w > v).count()
}

/// Compute every factor with the rolled-forward budget rule: vertex `i`
/// gets `total/n` plus whatever earlier vertices left unused. Parallel runs
/// compute each vertex with its largest possible allowance, then replay the
/// budget sequentially and recompute any vertex that overdrew.
fn run_factors(
    g: &Graph,
    params: ModelParams,
    budget: u64,
    tol: impl Fn(usize) -> f64 + Sync + Send,
    range: impl Fn(usize) -> (f64, f64) + Sync + Send,
) -> Result<Vec<Factor>> {
    let n = g.n();
    let base = budget / n as u64;
    if base == 0 {
        return Err(invalid("budget is smaller than the vertex count"));
    }
    let compute = |v: usize, allowance: u64| {
        let r = marginal_adaptive_alive(g, v, v, params, tol(v), allowance, DepthSchedule::Doubling);
        match r {
            Ok(_) | Err(Error::Unconverged { .. }) => {
                let (floor, ceil) = range(v);
                Ok(Factor::from_result(&r, floor, ceil))
            }
            Err(e) => Err(e),
        }
    };

    let mut out = Vec::with_capacity(n);
    let mut carry = 0u64;
    if par::enabled() {
        let eager: Vec<Result<Factor>> =
            par::map_range(n, |v| compute(v, base.saturating_mul(v as u64 + 1)));
        for (v, f) in eager.into_iter().enumerate() {
            let allowance = base + carry;
            let f = f?;
            let f = if !f.failed && f.nodes <= allowance {
                f
            } else {
                compute(v, allowance)?
            };
            carry = if f.failed { 0 } else { allowance - f.nodes };
            out.push(f);
        }
    } else {
        for v in 0..n {
            let allowance = base + carry;
            let f = compute(v, allowance)?;
            carry = if f.failed { 0 } else { allowance - f.nodes };
            out.push(f);
        }
    }
    Ok(out)
}

fn assemble(
    params: ModelParams,
    eps: f64,
    budget: u64,
    factors: &[Factor],
    // the factor's contribution to Z as a function of the marginal
    term: impl Fn(f64) -> f64,
    advisory: Option<DecayReport>,
) -> PartitionResult {
    let log_term = |x: f64| term(x).ln();
    let mut linear = 1.0;
    let mut log_value = 0.0;
    let (mut a, mut b) = (0.0, 0.0);
    let mut failed_vertices = Vec::new();
    for (v, f) in factors.iter().enumerate() {
        linear *= term(f.value);
        log_value += log_term(f.value);
        a += log_term(f.lo);
        b += log_term(f.hi);
        if f.failed {
            failed_vertices.push(v);
        }
    }
    let (log_lo, log_hi) = (a.min(b), a.max(b));
    PartitionResult {
        model: params,
        // the direct product is exact on small instances; fall back to logs
        // when it leaves the normal range
        value: if linear.is_normal() { linear } else { log_value.exp() },
        log_value,
        lo: log_lo.exp(),
        hi: log_hi.exp(),
        log_lo,
        log_hi,
        eps,
        depth: factors.iter().map(|f| f.depth).max().unwrap_or(0),
        nodes: factors.iter().map(|f| f.nodes).sum(),
        budget,
        failed: !failed_vertices.is_empty(),
        failed_vertices,
        advisory,
    }
}

fn empty_result(params: ModelParams, eps: f64, budget: u64) -> PartitionResult {
    assemble(params, eps, budget, &[], |_| 1.0, None)
}

/// Monomer-dimer partition function `Z = Π 1/p_i`, where `p_i` is the
/// monomer probability of vertex `i` in the graph induced on `i..n`.
pub fn partition_md(g: &Graph, gamma: f64, eps: f64, budget: u64) -> Result<PartitionResult> {
    let params = ModelParams::monomer_dimer(gamma)?;
    check_eps(eps)?;
    let n = g.n();
    if n == 0 {
        return Ok(empty_result(params, eps, budget));
    }
    let floor = |v: usize| 1.0 / (1.0 + gamma * alive_degree(g, v) as f64);
    let tol = |v: usize| eps * floor(v) / (2.0 * n as f64);
    let factors = run_factors(g, params, budget, tol, |v| (floor(v), 1.0))?;
    let advisory = decay_factor_md(gamma, g.max_degree().max(1) as f64).ok();
    Ok(assemble(params, eps, budget, &factors, |p| 1.0 / p, advisory))
}

/// Hard-core partition function `Z = Π (1 + R_i)`, where `R_i` is the
/// occupation ratio of vertex `i` in the graph induced on `i..n`.
pub fn partition_hc(g: &Graph, lambda: f64, eps: f64, budget: u64) -> Result<PartitionResult> {
    let params = ModelParams::hard_core(lambda)?;
    check_eps(eps)?;
    let n = g.n();
    if n == 0 {
        return Ok(empty_result(params, eps, budget));
    }
    let mu = eps / (2.0 * n as f64 * (1.0 + lambda));
    let factors = run_factors(g, params, budget, |_| mu, |_| (0.0, lambda))?;
    // the connective constant is at most max degree − 1
    let advisory = match g.max_degree() {
        d if d >= 3 => decay_factor_hc(lambda, (d - 1) as f64).ok(),
        _ => None,
    };
    Ok(assemble(params, eps, budget, &factors, |r| 1.0 + r, advisory))
}

/// Largest graph the hard-core oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 28;
/// Largest edge count the matching oracle accepts.
pub const ORACLE_MAX_EDGES: usize = 40;

struct Masks {
    nbr: Vec<u64>,
}

impl Masks {
    fn new(g: &Graph) -> Self {
        let nbr = (0..g.n())
            .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
            .collect();
        Masks { nbr }
    }
}

fn guard(g: &Graph, params: &ModelParams) -> Result<()> {
    match params {
        ModelParams::HardCore { .. } if g.n() > ORACLE_MAX_VERTICES => Err(Error::TooLarge(
            format!("{} vertices, limit {ORACLE_MAX_VERTICES}", g.n()),
        )),
        ModelParams::MonomerDimer { .. }
            if g.edge_count() > ORACLE_MAX_EDGES || g.n() > 64 =>
        {
            Err(Error::TooLarge(format!(
                "{} edges, limit {ORACLE_MAX_EDGES}",
                g.edge_count()
            )))
        }
        _ => Ok(()),
    }
}

/// Weighted independent sets inside the vertex set `s`.
fn z_hc(m: &Masks, lambda: f64, s: u64, memo: &mut HashMap<u64, f64>) -> f64 {
    if s == 0 {
        return 1.0;
    }
    if let Some(&z) = memo.get(&s) {
        return z;
    }
    let v = s.trailing_zeros() as usize;
    let rest = s & !(1 << v);
    let z = if m.nbr[v] & s == 0 {
        (1.0 + lambda) * z_hc(m, lambda, rest, memo)
    } else {
        z_hc(m, lambda, rest, memo) + lambda * z_hc(m, lambda, rest & !m.nbr[v], memo)
    };
    memo.insert(s, z);
    z
}

/// Weighted matchings of the subgraph induced on `s`.
fn z_md(m: &Masks, gamma: f64, s: u64, memo: &mut HashMap<u64, f64>) -> f64 {
    if s == 0 {
        return 1.0;
    }
    if let Some(&z) = memo.get(&s) {
        return z;
    }
    let v = s.trailing_zeros() as usize;
    let rest = s & !(1 << v);
    let mut z = z_md(m, gamma, rest, memo);
    let mut nb = m.nbr[v] & rest;
    while nb != 0 {
        let u = nb.trailing_zeros() as usize;
        nb &= nb - 1;
        z += gamma * z_md(m, gamma, rest & !(1 << u), memo);
    }
    memo.insert(s, z);
    z
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exact partition function by exhaustive recursion.
pub fn oracle_z(g: &Graph, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    guard(g, params)?;
    let m = Masks::new(g);
    let s = full_mask(g.n());
    let mut memo = HashMap::new();
    Ok(match *params {
        ModelParams::HardCore { lambda } => z_hc(&m, lambda, s, &mut memo),
        ModelParams::MonomerDimer { gamma } => z_md(&m, gamma, s, &mut memo),
    })
}

/// Exact marginal at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMarginal {
    /// Occupation probability (hard-core) or monomer probability.
    pub probability: f64,
    /// Occupation ratio `p/(1−p)`; hard-core only.
    pub ratio: Option<f64>,
}

/// Exact marginal at `v`, conditioned on `boundary` (hard-core only).
pub fn oracle_marginal(
    g: &Graph,
    v: usize,
    params: &ModelParams,
    boundary: Option<&BoundaryCondition>,
) -> Result<OracleMarginal> {
    params.validate()?;
    guard(g, params)?;
    g.check_vertex(v)?;
    let m = Masks::new(g);
    let mut s = full_mask(g.n());
    let mut memo = HashMap::new();
    match *params {
        ModelParams::HardCore { lambda } => {
            if let Some(b) = boundary {
                if b.get(v).is_some() {
                    return Err(Error::RootPinned(v));
                }
                for (u, pin) in b.iter() {
                    s &= !(1 << u);
                    if pin == Pin::Occupied {
                        s &= !m.nbr[u];
                    }
                }
            }
            if s & (1 << v) == 0 {
                return Ok(OracleMarginal {
                    probability: 0.0,
                    ratio: Some(0.0),
                });
            }
            let out = z_hc(&m, lambda, s & !(1 << v), &mut memo);
            let inn = lambda * z_hc(&m, lambda, s & !(1 << v) & !m.nbr[v], &mut memo);
            Ok(OracleMarginal {
                probability: inn / (inn + out),
                ratio: Some(inn / out),
            })
        }
        ModelParams::MonomerDimer { gamma } => {
            if boundary.is_some_and(|b| !b.is_empty()) {
                return Err(invalid(
                    "boundary conditions are only supported for the hard-core model",
                ));
            }
            let without = z_md(&m, gamma, s & !(1 << v), &mut memo);
            let all = z_md(&m, gamma, s, &mut memo);
            Ok(OracleMarginal {
                probability: without / all,
                ratio: None,
            })
        }
    }
}
