//! Closed-form correlation-decay analysis.
//!
//! Hard-core messages use `φ(x) = asinh(√x)`, so `Φ(x) = 1/(2√(x(1+x)))`.
//! Monomer-dimer messages use `Φ(x) = 1/(x(2−x))`. With these, the one-step
//! decay at arity `d` is maximized on the symmetric point of the fixed-point
//! equations below, giving the functions `ν_λ` and `ν_γ`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::seeded_rng;
use crate::par;
use crate::recurrence::ModelParams;

const MAX_ITER: usize = 200;

fn check_pos(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Bisection for an increasing function with `f(lo) < 0 < f(hi)`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ln_lambda_c(t: f64) -> f64 {
    t * t.ln() - (t + 1.0) * (t - 1.0).ln()
}

/// Critical activity `Δ^Δ / (Δ−1)^(Δ+1)` of the `Δ`-ary tree.
pub fn lambda_c(delta: f64) -> Result<f64> {
    if !(delta > 1.0 && delta.is_finite()) {
        return Err(invalid(format!("delta must exceed 1, got {delta}")));
    }
    Ok(ln_lambda_c(delta).exp())
}

/// The `t > 1` with `λ_c(t) = λ`.
pub fn delta_c(lambda: f64) -> Result<f64> {
    check_pos("lambda", lambda)?;
    // λ_c is decreasing in t; search over u = ln(t − 1)
    let target = lambda.ln();
    let g = |u: f64| target - ln_lambda_c(1.0 + u.exp());
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) >= 0.0 {
        lo *= 2.0;
        if lo < -700.0 {
            return Err(invalid(format!("lambda {lambda} too large")));
        }
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return Err(invalid(format!("lambda {lambda} too small")));
        }
    }
    Ok(1.0 + bisect(lo, hi, g).exp())
}

/// Hölder-conjugate exponents for the hard-core analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HcExponents {
    pub q: f64,
    pub a: f64,
    pub delta_c: f64,
}

pub fn choose_exponents_hc(lambda: f64) -> Result<HcExponents> {
    let dc = delta_c(lambda)?;
    let inv_q = 1.0 - 0.5 * (dc - 1.0) * (1.0 / (dc - 1.0)).ln_1p();
    let q = 1.0 / inv_q;
    let a = 1.0 / (1.0 - inv_q);
    Ok(HcExponents { q, a, delta_c: dc })
}

/// Exponents for the monomer-dimer analysis; `big_d = max(Δ, 3/(4γ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdExponents {
    pub q: f64,
    pub r: f64,
    pub big_d: f64,
}

pub fn choose_exponents_md(gamma: f64, delta: f64) -> Result<MdExponents> {
    check_pos("gamma", gamma)?;
    check_pos("delta", delta)?;
    let big_d = delta.max(0.75 / gamma);
    let q = (1.0 + 4.0 * gamma * big_d).sqrt();
    let r = q / (q - 1.0);
    Ok(MdExponents { q, r, big_d })
}

/// Unique positive root of `d·x − 1 − λ(1+x)^(−d)`.
pub fn xtilde(d: f64, lambda: f64) -> Result<f64> {
    check_pos("d", d)?;
    check_pos("lambda", lambda)?;
    let g = |x: f64| d * x - 1.0 - lambda * (1.0 + x).powf(-d);
    Ok(bisect(0.0, (1.0 + lambda) / d, g))
}

/// `(√(1+4γd) − 1) / (2γd)`, the root in `[0, 1]` of `1 − x − γdx²`.
pub fn ptilde(d: f64, gamma: f64) -> Result<f64> {
    check_pos("d", d)?;
    check_pos("gamma", gamma)?;
    let s = (1.0 + 4.0 * gamma * d).sqrt();
    // rationalized form avoids cancellation for small γd
    Ok(2.0 / (1.0 + s))
}

/// Hard-core `Ξ_q(d, x)` with `f = λ(1+x)^(−d)`.
pub fn xi_hc(q: f64, d: f64, lambda: f64, x: f64) -> f64 {
    let f = lambda * (1.0 + x).powf(-d);
    d.powf(q - 1.0) * (x / (1.0 + x) * f / (1.0 + f)).powf(q / 2.0)
}

/// `ν_λ(d) = Ξ_q(d, x̃_λ(d))`.
pub fn nu_hc(q: f64, d: f64, lambda: f64) -> Result<f64> {
    Ok(xi_hc(q, d, lambda, xtilde(d, lambda)?))
}

/// Monomer-dimer `Ξ_q(d, x)`.
pub fn xi_md(q: f64, d: f64, gamma: f64, x: f64) -> f64 {
    d.powf(q - 1.0) * (gamma * x * (2.0 - x) / (1.0 + 2.0 * gamma * d * x)).powf(q)
}

/// `ν_γ(d) = Ξ_q(d, p̃_γ(d))`.
pub fn nu_md(q: f64, d: f64, gamma: f64) -> Result<f64> {
    Ok(xi_md(q, d, gamma, ptilde(d, gamma)?))
}

/// Maximize `f` over a log-spaced grid on `[lo, hi]`, then refine by
/// golden-section search between the neighbors of the best grid point.
/// Returns `(argmax, max)`.
pub fn maximize_log_grid(
    lo: f64,
    hi: f64,
    points: usize,
    f: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let points = points.max(2);
    let step = (hi / lo).ln() / (points - 1) as f64;
    let at = |i: usize| {
        if i == points - 1 {
            hi
        } else {
            lo * (step * i as f64).exp()
        }
    };
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..points {
        let v = f(at(i));
        if v > best {
            best_i = i;
            best = v;
        }
    }
    let (mut a, mut b) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(points - 1)));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..MAX_ITER {
        if b - a <= 1e-13 * b {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    let (x, v) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if v > best {
        (x, v)
    } else {
        (at(best_i), best)
    }
}

const GRID_POINTS: usize = 1000;

/// Analytic decay summary for one model and connective-constant bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub model: ModelParams,
    pub delta: f64,
    /// Hard-core only.
    pub delta_c: Option<f64>,
    pub q: f64,
    /// Conjugate exponent: `a` for hard-core, `r` for monomer-dimer.
    pub conjugate: f64,
    /// Monomer-dimer only.
    pub big_d: Option<f64>,
    pub alpha: f64,
    pub alpha_delta: f64,
    pub ssm_rate: f64,
    /// Numerical maximum of `ν` over arities and where it is attained.
    pub grid_max: f64,
    pub grid_argmax: f64,
    /// `α·Δ ≥ 1`: the decay precondition fails.
    pub supercritical: bool,
}

pub fn decay_factor_hc(lambda: f64, delta: f64) -> Result<DecayReport> {
    let lc = lambda_c(delta)?;
    let ex = choose_exponents_hc(lambda)?;
    let dc = ex.delta_c;
    let alpha = nu_hc(ex.q, dc, lambda)?;
    let (grid_argmax, grid_max) = maximize_log_grid(1.0, 4.0 * dc, GRID_POINTS, |d| {
        nu_hc(ex.q, d, lambda).unwrap_or(f64::NAN)
    });
    let alpha_delta = alpha * delta;
    Ok(DecayReport {
        model: ModelParams::HardCore { lambda },
        delta,
        delta_c: Some(dc),
        q: ex.q,
        conjugate: ex.a,
        big_d: None,
        alpha,
        alpha_delta,
        ssm_rate: alpha_delta.powf(1.0 / ex.q),
        grid_max,
        grid_argmax,
        supercritical: lambda >= lc || alpha_delta >= 1.0,
    })
}

pub fn decay_factor_md(gamma: f64, delta: f64) -> Result<DecayReport> {
    let ex = choose_exponents_md(gamma, delta)?;
    let s = (1.0 + 4.0 * gamma * ex.big_d).sqrt();
    let rate = 1.0 - 2.0 / (1.0 + s);
    let alpha = rate.powf(ex.q) / ex.big_d;
    let (grid_argmax, grid_max) =
        maximize_log_grid(ex.big_d / 100.0, ex.big_d * 100.0, GRID_POINTS, |d| {
            nu_md(ex.q, d, gamma).unwrap_or(f64::NAN)
        });
    let alpha_delta = alpha * delta;
    Ok(DecayReport {
        model: ModelParams::MonomerDimer { gamma },
        delta,
        delta_c: None,
        q: ex.q,
        conjugate: ex.r,
        big_d: Some(ex.big_d),
        alpha,
        alpha_delta,
        ssm_rate: rate,
        grid_max,
        grid_argmax,
        supercritical: alpha_delta >= 1.0,
    })
}

/// A-priori bound `(M/L)·(Σ_{v∈C} α^|v|)^(1/q)` on the root gap, given the
/// depths of the cutset nodes.
pub fn gap_bound(q: f64, alpha: f64, m: f64, l: f64, depths: &[usize]) -> Result<f64> {
    if !(q > 1.0) {
        return Err(invalid(format!("q must exceed 1, got {q}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    check_pos("L", l)?;
    if depths.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = depths.iter().map(|&k| alpha.powi(k as i32)).sum();
    Ok(m / l * sum.powf(1.0 / q))
}

/// `(M, L)`: the range of the message over the frontier and the lower
/// bound on `Φ` at the root. For monomer-dimer `max_degree` replaces the
/// vertex count; hard-core ignores it.
pub fn message_bounds(params: &ModelParams, max_degree: usize) -> (f64, f64) {
    match *params {
        ModelParams::HardCore { lambda } => (
            lambda.sqrt().asinh(),
            1.0 / (2.0 * (lambda * (1.0 + lambda)).sqrt()),
        ),
        ModelParams::MonomerDimer { gamma } => {
            (0.5 * (2.0 * gamma * max_degree as f64).ln_1p(), 1.0)
        }
    }
}

/// Outcome of the numerical symmetrizability test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizeReport {
    pub max_random: f64,
    pub max_symmetric: f64,
    /// Number of equal nonzero coordinates at the best symmetric point.
    pub best_k: usize,
    /// Random points actually evaluated (rejections excluded).
    pub evaluated: usize,
    pub pass: bool,
}

const SYMMETRIZE_SLACK: f64 = 1e-9;
const MAX_REJECTIONS: usize = 1000;

/// Compare the gradient-norm program at random feasible points with its
/// best symmetric point (all nonzero coordinates equal).
///
/// Hard-core: maximize `Σ (2B√(x_i/(1+x_i)))^a` subject to
/// `λ Π 1/(1+x_i) = B`, `x ≥ 0`. Monomer-dimer: maximize
/// `Σ (γB² p_i(2−p_i))^r` subject to `1/(1 + γ Σ p_i) = B`, `0 ≤ p ≤ 1`.
pub fn symmetrize_check(
    params: &ModelParams,
    d: usize,
    b: f64,
    exponent: f64,
    trials: usize,
    seed: u64,
) -> Result<SymmetrizeReport> {
    params.validate()?;
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    check_pos("B", b)?;
    let program = Program::new(params, d, b, exponent)?;
    let (best_k, max_symmetric) = program.best_symmetric();
    let samples: Vec<Option<f64>> = par::map_range(trials, |t| {
        let mut rng = seeded_rng(seed);
        rng.set_stream(t as u64);
        program.sample(&mut rng).map(|x| program.objective(&x))
    });
    let evaluated = samples.iter().flatten().count();
    let max_random = samples
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let max_random = if evaluated == 0 { 0.0 } else { max_random };
    Ok(SymmetrizeReport {
        max_random,
        max_symmetric,
        best_k,
        evaluated,
        pass: max_random <= max_symmetric + SYMMETRIZE_SLACK * max_symmetric.max(1.0),
    })
}

enum Program {
    /// `Π (1+x_i) = k_total`, `x ≥ 0`.
    HardCore {
        d: usize,
        b: f64,
        a: f64,
        ln_k: f64,
    },
    /// `Σ p_i = s`, `0 ≤ p ≤ 1`.
    MonomerDimer {
        d: usize,
        scale: f64,
        r: f64,
        s: f64,
    },
}

impl Program {
    fn new(params: &ModelParams, d: usize, b: f64, exponent: f64) -> Result<Self> {
        match *params {
            ModelParams::HardCore { lambda } => {
                if !(exponent >= 2.0 && exponent.is_finite()) {
                    return Err(invalid(format!(
                        "hard-core exponent must be at least 2, got {exponent}"
                    )));
                }
                if b > lambda {
                    return Err(Error::Infeasible(format!(
                        "B = {b} exceeds lambda = {lambda}"
                    )));
                }
                Ok(Program::HardCore {
                    d,
                    b,
                    a: exponent,
                    ln_k: (lambda / b).ln(),
                })
            }
            ModelParams::MonomerDimer { gamma } => {
                if !(exponent > 1.0 && exponent <= 2.0) {
                    return Err(invalid(format!(
                        "monomer-dimer exponent must lie in (1, 2], got {exponent}"
                    )));
                }
                let s = (1.0 - b) / (gamma * b);
                if !(0.0..=d as f64).contains(&s) {
                    return Err(Error::Infeasible(format!(
                        "B = {b} needs sum {s} outside [0, {d}]"
                    )));
                }
                Ok(Program::MonomerDimer {
                    d,
                    scale: gamma * b * b,
                    r: exponent,
                    s,
                })
            }
        }
    }

    fn d(&self) -> usize {
        match *self {
            Program::HardCore { d, .. } | Program::MonomerDimer { d, .. } => d,
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        match *self {
            Program::HardCore { b, a, .. } => x
                .iter()
                .map(|&xi| (2.0 * b * (xi / (1.0 + xi)).sqrt()).powf(a))
                .sum(),
            Program::MonomerDimer { scale, r, .. } => {
                x.iter().map(|&p| (scale * p * (2.0 - p)).powf(r)).sum()
            }
        }
    }

    /// Smallest number of nonzero coordinates a feasible point can have.
    fn min_support(&self) -> usize {
        match *self {
            Program::HardCore { ln_k, .. } => usize::from(ln_k > 0.0),
            Program::MonomerDimer { s, .. } => s.ceil() as usize,
        }
    }

    fn symmetric_point(&self, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.d()];
        if k == 0 {
            return x;
        }
        let v = match *self {
            Program::HardCore { ln_k, .. } => (ln_k / k as f64).exp_m1(),
            Program::MonomerDimer { s, .. } => (s / k as f64).min(1.0),
        };
        x[..k].fill(v);
        x
    }

    fn best_symmetric(&self) -> (usize, f64) {
        let lo = self.min_support();
        let hi = if lo == 0 { 0 } else { self.d() };
        let mut best = (lo, f64::NEG_INFINITY);
        for k in lo..=hi {
            let v = self.objective(&self.symmetric_point(k));
            if v > best.1 {
                best = (k, v);
            }
        }
        best
    }

    /// A random feasible point on a random support, or `None` after too
    /// many rejections.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        let d = self.d();
        let lo = self.min_support();
        if lo == 0 {
            return Some(vec![0.0; d]);
        }
        let k = rng.random_range(lo..=d);
        let mut idx: Vec<usize> = (0..d).collect();
        for i in 0..k {
            let j = rng.random_range(i..d);
            idx.swap(i, j);
        }
        for _ in 0..MAX_REJECTIONS {
            // uniform point on the k-simplex
            let w: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = w.iter().sum();
            if !(total > 0.0) {
                continue;
            }
            let mut x = vec![0.0; d];
            let ok = match *self {
                Program::HardCore { ln_k, .. } => {
                    for (i, wi) in idx[..k].iter().zip(&w) {
                        x[*i] = (ln_k * wi / total).exp_m1();
                    }
                    true
                }
                Program::MonomerDimer { s, .. } => {
                    let mut ok = true;
                    for (i, wi) in idx[..k].iter().zip(&w) {
                        let p = s * wi / total;
                        ok &= p <= 1.0;
                        x[*i] = p;
                    }
                    ok
                }
            };
            if ok {
                return Some(x);
            }
        }
        None
    }
}
