//! Dense real matrices and power-iteration estimates of the operator norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(usage(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Fills entries in parallel over rows.
    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let mut data = vec![0.0; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `A v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .into_par_iter()
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ v`.
    pub fn matvec_t(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .into_par_iter()
            .map(|j| (0..self.rows).map(|i| self.get(i, j) * v[i]).sum())
            .collect()
    }

    /// Entrywise (Schur) product.
    pub fn schur(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(usage("Schur product needs equal shapes"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Result of power iteration on `AᵀA`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    /// Best norm value found; converged estimates are accurate to the tolerance.
    pub estimate: f64,
    /// Largest `‖Av‖ / ‖v‖` seen; always `≤ ‖A‖`.
    pub lower_bound: f64,
    pub iterations: u32,
    pub converged: bool,
}

pub const DEFAULT_MAX_ITER: u32 = 20_000;

/// Deterministic start vector with no special structure.
pub fn generic_start(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + ((i as u64 * 7919) % 104_729) as f64 / 104_729.0)
        .collect()
}

/// Estimates `‖A‖_op` by power iteration on `AᵀA`, stopping once the Rayleigh
/// quotient changes by at most `rel_tol` relative.
pub fn operator_norm(a: &DenseMatrix, start: &[f64], rel_tol: f64, max_iter: u32) -> PowerIteration {
    let mut v = start.to_vec();
    let n0 = norm2(&v);
    if a.rows == 0 || a.cols == 0 || n0 == 0.0 {
        return PowerIteration {
            estimate: 0.0,
            lower_bound: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    v.iter_mut().for_each(|x| *x /= n0);

    let mut prev = f64::NAN;
    let mut lower: f64 = 0.0;
    for it in 1..=max_iter {
        let w = a.matvec(&v);
        let rayleigh = w.iter().map(|x| x * x).sum::<f64>();
        lower = lower.max(rayleigh.sqrt());
        let u = a.matvec_t(&w);
        let nu = norm2(&u);
        if nu == 0.0 {
            // v is in the kernel; A vanishes on it and the estimate is exact
            return PowerIteration {
                estimate: lower,
                lower_bound: lower,
                iterations: it,
                converged: lower == 0.0,
            };
        }
        // ‖Aᵀw‖ / ‖w‖ with w = Av is at least ‖Av‖
        lower = lower.max(nu / rayleigh.sqrt());
        if (rayleigh - prev).abs() <= rel_tol * rayleigh {
            return PowerIteration {
                estimate: lower,
                lower_bound: lower,
                iterations: it,
                converged: true,
            };
        }
        prev = rayleigh;
        v = u.into_iter().map(|x| x / nu).collect();
    }
    PowerIteration {
        estimate: lower,
        lower_bound: lower,
        iterations: max_iter,
        converged: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `‖A‖ ≤ bound`
    AtMost,
    /// `‖A‖ ≥ bound`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub matrix: String,
    pub rows: usize,
    pub cols: usize,
    pub norm: f64,
    pub norm_lower_bound: f64,
    pub bound: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub iterations: u32,
    pub converged: bool,
    pub pass: bool,
    /// Power iteration did not settle and the lower bound alone is not enough.
    pub inconclusive: bool,
    pub note: Option<String>,
}

impl SpectralCertificate {
    /// `AtLeast` passes on the rigorous lower bound alone, so it never needs
    /// convergence; `AtMost` needs a converged estimate.
    pub fn from_iteration(
        matrix: impl Into<String>,
        a: &DenseMatrix,
        it: PowerIteration,
        bound: f64,
        relation: Relation,
        tolerance: f64,
    ) -> Self {
        let (pass, inconclusive) = match relation {
            Relation::AtLeast => {
                let pass = it.lower_bound >= bound * (1.0 - 1e-12);
                (pass, !pass && !it.converged)
            }
            Relation::AtMost => {
                let pass = it.converged && it.estimate <= bound * (1.0 + tolerance);
                (pass, !it.converged)
            }
        };
        SpectralCertificate {
            matrix: matrix.into(),
            rows: a.rows(),
            cols: a.cols(),
            norm: it.estimate,
            norm_lower_bound: it.lower_bound,
            bound,
            relation,
            tolerance,
            iterations: it.iterations,
            converged: it.converged,
            pass,
            inconclusive,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
