//! Tree recurrences for the hard-core and monomer-dimer models.
//!
//! Hard-core: the occupation ratio at a node with child ratios `R_i` is
//! `λ · Π 1/(1 + R_i)`. Monomer-dimer: the monomer probability at a node
//! with child probabilities `p_i` is `1 / (1 + γ Σ p_i)`. Both maps are
//! decreasing in every argument, so pinning a depth-`ℓ` frontier to the two
//! extreme values brackets the true root value.

mod adaptive;
mod fused;
pub mod regular;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sawtree::{Fix, Mode, SawTree};

pub use adaptive::{
    marginal_adaptive, marginal_interval, ApproxResult, Bracket, DepthSchedule,
};
pub(crate) use adaptive::marginal_adaptive_alive;

/// Model and activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    HardCore { lambda: f64 },
    MonomerDimer { gamma: f64 },
}

impl ModelParams {
    pub fn hard_core(lambda: f64) -> Result<Self> {
        let p = ModelParams::HardCore { lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn monomer_dimer(gamma: f64) -> Result<Self> {
        let p = ModelParams::MonomerDimer { gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let (name, x) = match *self {
            ModelParams::HardCore { lambda } => ("lambda", lambda),
            ModelParams::MonomerDimer { gamma } => ("gamma", gamma),
        };
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("{name} must be positive and finite, got {x}")))
        }
    }

    /// Activity `λ` or `γ`.
    pub fn activity(&self) -> f64 {
        match *self {
            ModelParams::HardCore { lambda } => lambda,
            ModelParams::MonomerDimer { gamma } => gamma,
        }
    }

    /// Tree flavor the model's recurrence runs on.
    pub fn mode(&self) -> Mode {
        match self {
            ModelParams::HardCore { .. } => Mode::Weitz,
            ModelParams::MonomerDimer { .. } => Mode::Plain,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::HardCore { .. } => "hardcore",
            ModelParams::MonomerDimer { .. } => "monomerdimer",
        }
    }

    /// Largest value a node can take: `λ`, or `1` for monomer probabilities.
    pub fn max_value(&self) -> f64 {
        match *self {
            ModelParams::HardCore { lambda } => lambda,
            ModelParams::MonomerDimer { .. } => 1.0,
        }
    }

    /// Neutral element of the child fold.
    #[inline]
    pub(crate) fn identity(&self) -> f64 {
        match self {
            ModelParams::HardCore { .. } => 1.0,
            ModelParams::MonomerDimer { .. } => 0.0,
        }
    }

    /// Fold one child's value into the accumulator. An occupied child of a
    /// hard-core node carries `+∞`, which zeroes the product.
    #[inline]
    pub(crate) fn fold(&self, acc: f64, child: f64) -> f64 {
        match self {
            ModelParams::HardCore { .. } => acc * (1.0 / (1.0 + child)),
            ModelParams::MonomerDimer { .. } => acc + child,
        }
    }

    #[inline]
    pub(crate) fn finish(&self, acc: f64) -> f64 {
        match *self {
            ModelParams::HardCore { lambda } => lambda * acc,
            ModelParams::MonomerDimer { gamma } => 1.0 / (1.0 + gamma * acc),
        }
    }

    /// Value of a leaf that is neither pinned nor truncated.
    pub fn leaf_value(&self) -> f64 {
        self.finish(self.identity())
    }
}

/// Value pinned on every truncated-frontier node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    AllZero,
    /// `λ` for hard-core, `1` for monomer-dimer.
    AllMax,
}

impl InitialCondition {
    pub fn value(self, params: &ModelParams) -> f64 {
        match self {
            InitialCondition::AllZero => 0.0,
            InitialCondition::AllMax => params.max_value(),
        }
    }
}

#[inline]
pub(crate) fn fixed_value(fix: Fix) -> Option<f64> {
    match fix {
        Fix::Free => None,
        Fix::Occupied => Some(f64::INFINITY),
        Fix::Unoccupied => Some(0.0),
    }
}

fn eval_tree(tree: &SawTree, params: &ModelParams, init: InitialCondition) -> f64 {
    // children always have larger ids than their parent
    let mut value = vec![0.0f64; tree.len()];
    let init = init.value(params);
    for id in (0..tree.len() as u32).rev() {
        let node = tree.node(id);
        value[id as usize] = if let Some(v) = fixed_value(node.fix) {
            v
        } else if tree.is_frontier(id) {
            init
        } else {
            let acc = tree
                .children(id)
                .fold(params.identity(), |acc, c| params.fold(acc, value[c as usize]));
            params.finish(acc)
        };
    }
    value[0]
}

fn check_mode(tree: &SawTree, expected: Mode) -> Result<()> {
    if tree.mode() == expected {
        Ok(())
    } else {
        Err(Error::ModeMismatch {
            expected: expected.name(),
            found: tree.mode().name(),
        })
    }
}

/// Occupation ratio at the root of a Weitz tree.
pub fn eval_hc(tree: &SawTree, lambda: f64, init: InitialCondition) -> Result<f64> {
    let params = ModelParams::hard_core(lambda)?;
    check_mode(tree, Mode::Weitz)?;
    Ok(eval_tree(tree, &params, init))
}

/// Monomer probability at the root of a plain SAW tree.
pub fn eval_md(tree: &SawTree, gamma: f64, init: InitialCondition) -> Result<f64> {
    let params = ModelParams::monomer_dimer(gamma)?;
    check_mode(tree, Mode::Plain)?;
    Ok(eval_tree(tree, &params, init))
}
