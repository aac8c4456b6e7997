use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Systems up to this size are factored densely.
pub const DENSE_LIMIT: usize = 2000;

/// Cached Cholesky factor of an SPD matrix.
#[derive(Clone, Debug)]
pub enum DirectSolver {
    Dense(Cholesky<f64, Dyn>),
    Skyline(SkylineCholesky),
}

impl DirectSolver {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Dimension(format!(
                "direct solve needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.nrows() <= DENSE_LIMIT {
            Self::dense(a)
        } else {
            SkylineCholesky::factor(a).map(DirectSolver::Skyline)
        }
    }

    pub fn dense(a: &SparseMatrix) -> Result<Self> {
        let d: DMatrix<f64> = a.to_dense();
        match Cholesky::new(d.clone()) {
            Some(c) => Ok(DirectSolver::Dense(c)),
            None => {
                // locate the failing pivot for the error message
                let sky = SkylineCholesky::factor(a);
                Err(sky.err().unwrap_or(Error::NotPositiveDefinite {
                    row: 0,
                    pivot: d[(0, 0)],
                }))
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            DirectSolver::Dense(c) => c.l_dirty().nrows(),
            DirectSolver::Skyline(s) => s.first.len(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            DirectSolver::Dense(c) => c.solve(&DVector::from_column_slice(b)).as_slice().to_vec(),
            DirectSolver::Skyline(s) => s.solve(b),
        }
    }
}

/// Envelope (profile) Cholesky factor stored row by row.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    // row i holds L[i][first[i]..=i]
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows();
        let mut first = vec![0; n];
        let mut start = vec![0; n + 1];
        for i in 0..n {
            let (cols, _) = a.row(i);
            first[i] = cols.iter().copied().filter(|&j| j <= i).min().unwrap_or(i);
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    data[start[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                for k in k0..j {
                    s -= data[start[i] + k - fi] * data[start[j] + k - fj];
                }
                if j < i {
                    data[start[i] + j - fi] = s / data[start[j] + j - fj];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: s });
                    }
                    data[start[i] + i - fi] = s.sqrt();
                }
            }
        }
        Ok(SkylineCholesky { first, start, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.first.len();
        let mut y = b.to_vec();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi] * yi;
            }
        }
        y
    }
}
