use serde::{Deserialize, Serialize};

use crate::decay::lambda_c;

/// Published connective-constant upper bounds, with the maximum degree of
/// each lattice.
pub const LATTICES: [(&str, usize, f64); 7] = [
    ("T", 6, 4.251419),
    ("H", 3, 1.847760),
    ("Z2", 4, 2.679193),
    ("Z3", 6, 4.7387),
    ("Z4", 8, 6.8040),
    ("Z5", 10, 8.8602),
    ("Z6", 12, 10.8886),
];

/// Weitz-SAW-tree bounds for Z² from the branching-matrix method, for
/// memory 30 and 26 respectively.
pub const Z2_WEITZ_TREE: [(usize, f64); 2] = [(30, 2.429), (26, 2.433)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRow {
    pub lattice: String,
    pub max_degree: usize,
    pub connective_constant: f64,
    /// `λ_c` at the connective constant: strong spatial mixing holds below.
    pub lambda_bound: f64,
    /// `lambda_bound` rounded down to three decimals, as tabulated.
    pub lambda_bound_3dp: f64,
    /// Bound derived from the Weitz-SAW-tree connective constant instead.
    pub weitz_tree: bool,
}

/// Round down to three decimals; a threshold is only safe rounded down.
pub fn floor3(x: f64) -> f64 {
    (x * 1000.0).floor() / 1000.0
}

/// Strong-spatial-mixing bounds for the standard lattices.
pub fn lattice_bounds_table() -> Vec<LatticeRow> {
    let mut rows: Vec<LatticeRow> = LATTICES
        .iter()
        .map(|&(name, deg, delta)| LatticeRow {
            lattice: name.to_string(),
            max_degree: deg,
            connective_constant: delta,
            lambda_bound: lambda_c(delta).expect("constants exceed 1"),
            lambda_bound_3dp: floor3(lambda_c(delta).expect("constants exceed 1")),
            weitz_tree: false,
        })
        .collect();
    for (memory, delta) in Z2_WEITZ_TREE {
        rows.push(LatticeRow {
            lattice: format!("Z2 (Weitz tree, L={memory})"),
            max_degree: 4,
            connective_constant: delta,
            lambda_bound: lambda_c(delta).expect("constants exceed 1"),
            lambda_bound_3dp: floor3(lambda_c(delta).expect("constants exceed 1")),
            weitz_tree: true,
        });
    }
    rows
}
