//! Small dense helpers over `nalgebra` for the p×p systems estimation needs.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let p = rows.len();
    DMatrix::from_fn(p, p, |r, c| rows[r][c])
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Inverse of a symmetric positive definite matrix, `None` if it is not
/// numerically positive definite.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let scale = m.diagonal().iter().cloned().fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    // Reject near-singular systems relative to the largest diagonal entry.
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= scale * 1e-12 {
        return None;
    }
    let inv = m.clone().cholesky()?.inverse();
    Some((&inv + inv.transpose()) * 0.5)
}

pub fn spd_solve(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    spd_inverse(m).map(|inv| inv * b)
}

/// Index of the coordinate carrying most weight in the eigenvector of the
/// smallest eigenvalue, after scaling to unit diagonal. Points at the term
/// responsible for a singular information matrix.
pub fn weakest_direction(m: &DMatrix<f64>) -> usize {
    let p = m.nrows();
    let d: Vec<f64> = (0..p)
        .map(|i| {
            let v = m[(i, i)];
            if v > 0.0 {
                1.0 / v.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    if let Some(k) = d.iter().position(|&x| x == 0.0) {
        return k;
    }
    let scaled = DMatrix::from_fn(p, p, |r, c| m[(r, c)] * d[r] * d[c]);
    let eig = SymmetricEigen::new(scaled);
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let vec = eig.eigenvectors.column(imin);
    // Last index wins ties so the earliest terms (usually edges) are kept.
    let mut best = 0;
    for k in 0..p {
        if vec[k].abs() >= vec[best].abs() - 1e-9 {
            best = k;
        }
    }
    best
}
