use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::report::SolveReport;
use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, SparseMatrix};

/// Default ICT drop tolerance.
pub const DROP_TOL: f64 = 1e-2;
/// Default ICT fill cap: off-diagonal entries kept per row of `L`.
pub const MAX_FILL: usize = 10;

/// Conjugate gradients from `x = 0`, stopping at `‖r‖ ≤ tol ‖b‖`.
pub fn cg_solve(a: &SparseMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<SolveReport> {
    pcg_impl(a, b, tol, max_iter, |r| r.to_vec())
}

/// Conjugate gradients preconditioned by an incomplete Cholesky factor.
pub fn pcg_solve(
    a: &SparseMatrix,
    b: &[f64],
    factor: &IcFactor,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    if factor.size() != a.nrows() {
        return Err(Error::Dimension(format!(
            "factor of size {} for a {}x{} system",
            factor.size(),
            a.nrows(),
            a.ncols()
        )));
    }
    pcg_impl(a, b, tol, max_iter, |r| factor.apply(r))
}

fn pcg_impl<M: Fn(&[f64]) -> Vec<f64>>(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    precond: M,
) -> Result<SolveReport> {
    if a.nrows() != a.ncols() || b.len() != a.nrows() {
        return Err(Error::Dimension(format!(
            "{}x{} system with rhs of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let t0 = Instant::now();
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let r0 = norm2(&r);
    let mut history = vec![r0];
    let mut converged = r0 == 0.0;
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    while !converged && history.len() <= max_iter {
        a.mul_vec_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rk = norm2(&r);
        history.push(rk);
        converged = rk <= tol * r0;
        if converged {
            break;
        }
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok(SolveReport::finish(history, x, converged, t0.elapsed()))
}

/// Incomplete Cholesky factor `L` with `A ≈ L Lᵀ`.
#[derive(Clone, Debug)]
pub struct IcFactor {
    /// Lower triangle by rows; the diagonal is the last entry of each row.
    l: SparseMatrix,
    /// Diagonal shift that was needed for a positive factorization.
    pub shift: f64,
}

impl IcFactor {
    pub fn size(&self) -> usize {
        self.l.nrows()
    }

    pub fn lower(&self) -> &SparseMatrix {
        &self.l
    }

    /// `(L Lᵀ)⁻¹ r`.
    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        let n = self.size();
        let mut y = r.to_vec();
        for i in 0..n {
            let (cols, vals) = self.l.row(i);
            let k = cols.len() - 1;
            let mut s = y[i];
            for (&j, &v) in cols[..k].iter().zip(&vals[..k]) {
                s -= v * y[j];
            }
            y[i] = s / vals[k];
        }
        for i in (0..n).rev() {
            let (cols, vals) = self.l.row(i);
            let k = cols.len() - 1;
            y[i] /= vals[k];
            let yi = y[i];
            for (&j, &v) in cols[..k].iter().zip(&vals[..k]) {
                y[j] -= v * yi;
            }
        }
        y
    }
}

/// Threshold incomplete Cholesky with a per-row fill cap.
///
/// Entries of row `i` of `L` below `drop_tol · ‖a_i‖` are dropped, then only
/// the `max_fill` largest off-diagonal entries are kept. A non-positive pivot
/// restarts the factorization on `A + αI` with `α = 1e-3 · max diag`, doubled
/// on each further failure, at most three shifts.
pub fn ic_factorize(a: &SparseMatrix, drop_tol: f64, max_fill: usize) -> Result<IcFactor> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "incomplete Cholesky of a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let max_diag = a.diagonal().into_iter().fold(0.0f64, f64::max);
    let mut shift = 0.0;
    let mut shifts = 0;
    loop {
        match ict_attempt(a, drop_tol, max_fill, shift) {
            Ok(l) => return Ok(IcFactor { l, shift }),
            Err(row) => {
                if shifts == 3 {
                    return Err(Error::IcBreakdown { row, shifts });
                }
                shift = if shift == 0.0 {
                    1e-3 * max_diag
                } else {
                    2.0 * shift
                };
                shifts += 1;
            }
        }
    }
}

fn ict_attempt(
    a: &SparseMatrix,
    drop_tol: f64,
    max_fill: usize,
    shift: f64,
) -> std::result::Result<SparseMatrix, usize> {
    let n = a.nrows();
    // column lists of the computed rows: cols[k] = [(i, l_ik), i > k]
    let mut lcols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut diag = vec![0.0; n];
    let mut work = vec![0.0; n];
    let mut in_work = vec![false; n];
    let mut triplets = Vec::new();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let row_norm = norm2(vals);
        let mut a_ii = shift;
        let mut heap = BinaryHeap::new();
        for (&j, &v) in cols.iter().zip(vals) {
            if j < i {
                work[j] = v;
                in_work[j] = true;
                heap.push(Reverse(j));
            } else if j == i {
                a_ii += v;
            }
        }
        let mut kept: Vec<(usize, f64)> = Vec::new();
        while let Some(Reverse(k)) = heap.pop() {
            if !in_work[k] {
                continue;
            }
            in_work[k] = false;
            let l_ik = work[k] / diag[k];
            work[k] = 0.0;
            if l_ik.abs() < drop_tol * row_norm {
                continue;
            }
            for &(m, l_mk) in &lcols[k] {
                if m >= i {
                    break;
                }
                if !in_work[m] {
                    in_work[m] = true;
                    work[m] = 0.0;
                    heap.push(Reverse(m));
                }
                work[m] -= l_ik * l_mk;
            }
            kept.push((k, l_ik));
        }
        if kept.len() > max_fill {
            kept.sort_by(|p, q| q.1.abs().total_cmp(&p.1.abs()).then(p.0.cmp(&q.0)));
            kept.truncate(max_fill);
            kept.sort_by_key(|e| e.0);
        }
        let d = a_ii - kept.iter().map(|e| e.1 * e.1).sum::<f64>();
        if !(d > 0.0) {
            return Err(i);
        }
        diag[i] = d.sqrt();
        for &(k, v) in &kept {
            lcols[k].push((i, v));
            triplets.push((i, k, v));
        }
        triplets.push((i, i, diag[i]));
    }
    Ok(SparseMatrix::from_triplets(n, n, &triplets))
}
