//! Small dense linear-algebra helpers.

use nalgebra::DMatrix;

/// Smallest and largest eigenvalue of the symmetric `n × n` matrix stored
/// row-major in `values`. The matrix is symmetrized first.
pub fn eigen_extremes(n: usize, values: &[f64]) -> (f64, f64) {
    assert_eq!(values.len(), n * n, "matrix must be n × n");
    if n == 0 {
        return (0.0, 0.0);
    }
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (values[i * n + j] + values[j * n + i]));
    let eig = m.symmetric_eigenvalues();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// True when the smallest eigenvalue is at least `-rel_tol` times the
/// largest one.
pub fn is_psd(n: usize, values: &[f64], rel_tol: f64) -> bool {
    let (min, max) = eigen_extremes(n, values);
    min >= -rel_tol * max.abs()
}
