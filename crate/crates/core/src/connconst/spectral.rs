use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::par;

/// Nonnegative sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    pub k: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` triples; duplicates are summed.
    pub fn from_triples(k: usize, mut triples: Vec<(u32, u32, f64)>) -> Result<Self> {
        triples.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; k + 1];
        let mut cols = Vec::with_capacity(triples.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triples.len());
        let mut last = None;
        for (r, c, v) in triples {
            if r as usize >= k || c as usize >= k {
                return Err(invalid(format!("entry ({r}, {c}) outside {k}x{k} matrix")));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("entry ({r}, {c}) = {v} is not nonnegative")));
            }
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r as usize + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..k {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(CsrMatrix {
            k,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(invalid("matrix must be square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    t.push((i as u32, j as u32, v));
                }
            }
        }
        Self::from_triples(k, t)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).map(|(_, v)| v).sum()
    }

    /// `y = M x`, rows computed in parallel.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        par::fill(y, |i| self.row(i).map(|(j, v)| v * x[j]).sum());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    /// Perron root estimate from the power method.
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖M^ℓ‖_∞^(1/ℓ)` for a few `ℓ`; each is an upper bound on the Perron root.
    pub gelfand: Vec<(usize, f64)>,
}

const MAX_ITER: usize = 1_000_000;
const GELFAND_POWERS: [usize; 3] = [64, 256, 1024];

/// Largest real eigenvalue of a nonnegative matrix.
///
/// Runs the power method on `M + I` (the shift breaks periodicity without
/// moving the Perron vector), estimating `1ᵀ M x` with `‖x‖₁ = 1`, and stops
/// when successive estimates differ by less than `tol`.
pub fn spectral_bound(m: &CsrMatrix, tol: f64) -> Result<SpectralResult> {
    if m.k == 0 {
        return Err(invalid("matrix is empty"));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let k = m.k;
    let mut x = vec![1.0 / k as f64; k];
    let mut y = vec![0.0; k];
    let mut est = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        m.mul_vec(&x, &mut y);
        let next: f64 = y.iter().sum();
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi;
        }
        let norm = 1.0 + next;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if (next - est).abs() < tol {
            est = next;
            converged = true;
            break;
        }
        est = next;
    }
    let gelfand = GELFAND_POWERS
        .iter()
        .map(|&l| (l, gelfand_bound(m, l)))
        .collect();
    Ok(SpectralResult {
        eigenvalue: est,
        iterations,
        converged,
        gelfand,
    })
}

/// `‖M^ℓ‖_∞^(1/ℓ)`, computed as the max entry of `M^ℓ 1` with rescaling.
pub fn gelfand_bound(m: &CsrMatrix, l: usize) -> f64 {
    let mut v = vec![1.0; m.k];
    let mut w = vec![0.0; m.k];
    let mut log_scale = 0.0;
    for _ in 0..l {
        m.mul_vec(&v, &mut w);
        let top = w.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        log_scale += top.ln();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / top;
        }
    }
    (log_scale / l.max(1) as f64).exp()
}
