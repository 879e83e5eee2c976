//! Linear programs in equality standard form.
//!
//! The convex-roof programs have a handful of equality rows and up to
//! several hundred thousand columns, so the solver keeps a dense inverse of
//! the basis and spends its time in pricing. See [`solve`].

mod dump;
mod simplex;

pub use dump::{read_dump, write_dump};
pub use simplex::{solve, SolveOptions};

use crate::error::{Error, Result};

/// `maximize c·q subject to A q = b, q ≥ 0`.
///
/// The constraint matrix is stored column-major, so one column is a
/// contiguous slice of length `n_rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLp {
    n_rows: usize,
    objective: Vec<f64>,
    columns: Vec<f64>,
    rhs: Vec<f64>,
}

impl StandardFormLp {
    pub fn new(objective: Vec<f64>, columns: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n_rows = rhs.len();
        let n_cols = objective.len();
        if n_rows == 0 {
            return Err(Error::InvalidArgument("LP needs at least one row".into()));
        }
        if n_rows > n_cols {
            return Err(Error::InvalidArgument(format!(
                "LP has {n_rows} rows but only {n_cols} columns"
            )));
        }
        if columns.len() != n_rows * n_cols {
            return Err(Error::InvalidArgument(format!(
                "constraint matrix has {} entries, expected {}",
                columns.len(),
                n_rows * n_cols
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&objective) || !finite(&columns) || !finite(&rhs) {
            return Err(Error::InvalidArgument("LP data must be finite".into()));
        }
        Ok(Self {
            n_rows,
            objective,
            columns,
            rhs,
        })
    }

    /// Builds from row-major dense rows, convenient for small problems.
    pub fn from_rows(objective: Vec<f64>, rows: &[Vec<f64>], rhs: Vec<f64>) -> Result<Self> {
        let n_cols = objective.len();
        if rows.len() != rhs.len() || rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidArgument("ragged constraint rows".into()));
        }
        let mut columns = Vec::with_capacity(rows.len() * n_cols);
        for j in 0..n_cols {
            columns.extend(rows.iter().map(|r| r[j]));
        }
        Self::new(objective, columns, rhs)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.columns[col * self.n_rows + row]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: f64,
    /// Nonzero entries of the primal vector as `(column, value)`, sorted by
    /// column.
    pub primal: Vec<(usize, f64)>,
    /// Basic variable per row. Indices `≥ n_cols` are the phase-1
    /// artificial of row `index - n_cols`, left in the basis on a redundant
    /// row or when the solve stopped early.
    pub basis: Vec<usize>,
    pub iterations: usize,
    /// Sum of artificial values at the end of phase 1.
    pub phase1_residual: f64,
}

impl LpSolution {
    /// Converts a non-optimal status into the matching error.
    pub fn into_optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::Infeasible {
                residual: self.phase1_residual,
            }),
            LpStatus::Unbounded => Err(Error::Unbounded),
            LpStatus::IterationLimit => Err(Error::IterationLimit {
                iterations: self.iterations,
            }),
        }
    }

    /// Dense primal vector of length `n_cols`.
    pub fn dense_primal(&self, n_cols: usize) -> Vec<f64> {
        let mut x = vec![0.0; n_cols];
        for &(j, v) in &self.primal {
            x[j] = v;
        }
        x
    }
}

/// `(‖A·q − b‖∞, most negative primal entry or 0)` for a primal vector.
pub fn residuals(lp: &StandardFormLp, sol: &LpSolution) -> (f64, f64) {
    let mut ax = vec![0.0; lp.n_rows()];
    let mut most_negative = 0.0f64;
    for &(j, v) in &sol.primal {
        most_negative = most_negative.min(v);
        for (acc, a) in ax.iter_mut().zip(lp.column(j)) {
            *acc += a * v;
        }
    }
    let eq = ax
        .iter()
        .zip(lp.rhs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (eq, most_negative)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed() {
        assert!(StandardFormLp::new(vec![1.0], vec![1.0], vec![]).is_err());
        assert!(StandardFormLp::new(vec![1.0], vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StandardFormLp::new(vec![1.0, 2.0], vec![1.0], vec![1.0]).is_err());
        assert!(StandardFormLp::new(vec![f64::NAN], vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn from_rows_is_column_major() {
        let lp = StandardFormLp::from_rows(
            vec![0.0; 3],
            &[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(lp.column(1), &[2.0, 5.0]);
        assert_eq!(lp.entry(1, 2), 6.0);
    }

    #[test]
    fn residuals_of_trivial_lp() {
        let lp = StandardFormLp::from_rows(vec![1.0], &[vec![1.0]], vec![1.0]).unwrap();
        let sol = solve(&lp, &SolveOptions::default());
        assert_eq!(residuals(&lp, &sol), (0.0, 0.0));
    }

    #[test]
    fn residuals_detect_perturbation() {
        let lp = StandardFormLp::from_rows(
            vec![1.0, 2.0, 0.5],
            &[vec![1.0, 1.0, 1.0], vec![0.5, 2.0, 3.0]],
            vec![1.0, 1.5],
        )
        .unwrap();
        let mut sol = solve(&lp, &SolveOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        let (eq, neg) = residuals(&lp, &sol);
        assert!(eq <= 1e-9 && neg >= -1e-9);
        sol.primal[0].1 += 1e-3;
        let col = lp.column(sol.primal[0].0);
        let min_norm = col.iter().fold(f64::INFINITY, |m, a| m.min(a.abs()));
        let (eq, _) = residuals(&lp, &sol);
        assert!(eq >= 1e-3 * min_norm - 1e-15);
    }
}
