use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepDirection {
    /// Ascending rows; the smoother `R`.
    Forward,
    /// Descending rows; the adjoint smoother `Rᵀ`.
    Backward,
}

impl SweepDirection {
    /// Direction of smoothing step `l` out of `nu`: forward when `l + nu` is
    /// odd, backward when even. Pre- and post-smoothing are then adjoint to
    /// each other in reverse order.
    pub fn for_step(l: usize, nu: usize) -> Self {
        if (l + nu) % 2 == 1 {
            SweepDirection::Forward
        } else {
            SweepDirection::Backward
        }
    }
}

/// One in-place Gauss-Seidel sweep for `A x = b`.
pub fn gauss_seidel_sweep(
    a: &SparseMatrix,
    b: &[f64],
    x: &mut [f64],
    direction: SweepDirection,
) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n || x.len() != n {
        return Err(Error::Dimension(format!(
            "sweep on {}x{} with |b| = {}, |x| = {}",
            a.nrows(),
            a.ncols(),
            b.len(),
            x.len()
        )));
    }
    let mut relax = |i: usize| -> Result<()> {
        let (cols, vals) = a.row(i);
        let mut diag = 0.0;
        let mut s = b[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                diag = v;
            } else {
                s -= v * x[j];
            }
        }
        if diag == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
        x[i] = s / diag;
        Ok(())
    };
    match direction {
        SweepDirection::Forward => (0..n).try_for_each(&mut relax),
        SweepDirection::Backward => (0..n).rev().try_for_each(&mut relax),
    }
}
