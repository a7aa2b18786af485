#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Dense matrix from a circulant first row.
pub fn dense_circulant(row: &[f64]) -> DMatrix<f64> {
    let n = row.len();
    DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n])
}

pub fn dense_solve(matrix: &DMatrix<f64>, rhs: &[f64]) -> Vec<f64> {
    let x = matrix.clone().lu().solve(&DVector::from_column_slice(rhs)).expect("singular dense matrix");
    x.iter().copied().collect()
}

/// Zero-mean Gaussian log-density with a dense covariance, through LU.
pub fn dense_log_density(cov: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lu = cov.clone().lu();
    let log_det = lu.determinant().ln();
    let v = DVector::from_column_slice(x);
    let quad = v.dot(&lu.solve(&v).unwrap());
    -0.5 * (n * (2.0 * std::f64::consts::PI).ln() + log_det + quad)
}

/// Brute-force `sum_{|k| <= terms} (kappa^2 + (2 pi k)^2)^-alpha cos(2 pi k theta)`.
pub fn brute_psi(theta: f64, kappa: f64, alpha: f64, terms: usize) -> f64 {
    let tp = 2.0 * std::f64::consts::PI;
    let mut s = 0.0;
    for k in (1..=terms).rev() {
        let w = tp * k as f64;
        s += 2.0 * (w * theta).cos() / (kappa * kappa + w * w).powf(alpha);
    }
    s + kappa.powf(-2.0 * alpha)
}
