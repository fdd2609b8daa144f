//! Positive-semidefinite repair and factorization of correlation matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::params::CorrelationMatrix;

/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOLERANCE: f64 = -1e-10;
pub const MAX_REPAIR_ITERATIONS: usize = 100;
pub const MAX_COMPLETION_ITERATIONS: usize = 20_000;
/// Eigenvalue margin a completed matrix must clear, so that it factors
/// without near-zero pivots.
pub const COMPLETION_MARGIN: f64 = 1e-6;
const COMPLETION_CLIP_FLOOR: f64 = 1e-4;

/// Outcome of a repair.
#[derive(Debug, Clone)]
pub struct Repaired {
    pub matrix: CorrelationMatrix,
    /// Largest absolute entry change against the input.
    pub max_change: f64,
    pub iterations: usize,
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn is_psd(m: &CorrelationMatrix) -> bool {
    min_eigenvalue(m.values()) >= PSD_TOLERANCE
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn clip_to_psd(m: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let clipped = eig.eigenvalues.map(|v| v.max(floor));
    let mut out = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    symmetrize(&mut out);
    out
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn finish(input: &CorrelationMatrix, mut values: DMatrix<f64>, iterations: usize) -> Result<Repaired> {
    let n = values.nrows();
    for i in 0..n {
        values[(i, i)] = 1.0;
        for j in 0..n {
            values[(i, j)] = values[(i, j)].clamp(-1.0, 1.0);
        }
    }
    symmetrize(&mut values);
    let max_change = max_abs_diff(&values, input.values());
    let matrix = CorrelationMatrix::new(input.labels().to_vec(), values)?;
    Ok(Repaired { matrix, max_change, iterations })
}

/// Clips negative eigenvalues to zero and renormalizes the diagonal until
/// the smallest eigenvalue is at least -1e-10. PSD inputs come back
/// unchanged.
pub fn nearest_correlation(matrix: &CorrelationMatrix) -> Result<Repaired> {
    if is_psd(matrix) {
        return Ok(Repaired { matrix: matrix.clone(), max_change: 0.0, iterations: 0 });
    }
    let mut current = matrix.values().clone();
    for iter in 1..=MAX_REPAIR_ITERATIONS {
        let clipped = clip_to_psd(&current, 0.0);
        let d: Vec<f64> = (0..clipped.nrows()).map(|i| clipped[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
        current = DMatrix::from_fn(clipped.nrows(), clipped.ncols(), |i, j| clipped[(i, j)] / (d[i] * d[j]));
        symmetrize(&mut current);
        if min_eigenvalue(&current) >= PSD_TOLERANCE {
            return finish(matrix, current, iter);
        }
    }
    Err(Error::Numeric(format!(
        "correlation repair did not converge in {MAX_REPAIR_ITERATIONS} iterations"
    )))
}

/// Finds a PSD matrix that keeps every entry flagged in `fixed` at its input
/// value and chooses the remaining off-diagonal entries freely, by
/// alternating projections with Dykstra's correction. The diagonal is always
/// held at one. The result is positive definite with smallest eigenvalue at
/// least `COMPLETION_MARGIN`.
pub fn complete_correlation(matrix: &CorrelationMatrix, fixed: &DMatrix<bool>) -> Result<Repaired> {
    let n = matrix.dim();
    if fixed.nrows() != n || fixed.ncols() != n {
        return Err(Error::domain("fixed-entry mask does not match matrix size"));
    }
    if is_psd(matrix) {
        return Ok(Repaired { matrix: matrix.clone(), max_change: 0.0, iterations: 0 });
    }
    let target = matrix.values();
    let project_fixed = |m: &mut DMatrix<f64>| {
        for i in 0..n {
            for j in 0..n {
                if i == j || fixed[(i, j)] {
                    m[(i, j)] = target[(i, j)];
                }
            }
        }
    };
    let mut y = target.clone();
    let mut correction = DMatrix::zeros(n, n);
    for iter in 1..=MAX_COMPLETION_ITERATIONS {
        let r = &y - &correction;
        let x = clip_to_psd(&r, COMPLETION_CLIP_FLOOR);
        correction = &x - &r;
        y = x;
        project_fixed(&mut y);
        if min_eigenvalue(&y) >= COMPLETION_MARGIN {
            return finish(matrix, y, iter);
        }
    }
    Err(Error::Numeric(format!(
        "no PSD completion found in {MAX_COMPLETION_ITERATIONS} iterations"
    )))
}

/// Lower-triangular `L` with `L L^T = m` for a positive semidefinite `m`.
/// Pivots within `tol` of zero are treated as exact zeros so rank-deficient
/// matrices factor cleanly.
pub fn lower_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    const TOL: f64 = 1e-9;
    let n = m.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if pivot < -TOL {
            return Err(Error::domain(format!(
                "matrix is not positive semidefinite (pivot {pivot:e} at {j})"
            )));
        }
        if pivot <= TOL {
            continue;
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}
