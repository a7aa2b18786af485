use std::f64::consts::PI;

use super::GridField;
use crate::error::{Error, Result};
use crate::spectral::{circulant_solve, LagCovariance};

/// Zero-mean Gaussian log-density of `field` under `circulant(curve)`.
///
/// `log det` is the sum of the logged DFT eigenvalues; the quadratic form goes
/// through a circulant solve.
pub fn log_likelihood(curve: &LagCovariance, field: &GridField) -> Result<f64> {
    let n = curve.n();
    if field.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: field.n() });
    }
    let eigenvalues = curve.eigenvalues();
    let largest = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(*v));
    if eigenvalues.iter().any(|&v| v.is_nan() || v <= 1e-14 * largest) {
        return Err(Error::Singular);
    }
    let log_det: f64 = eigenvalues.iter().map(|v| v.ln()).sum();
    let solved = circulant_solve(&curve.to_circulant(), field.values())?;
    let quadratic: f64 = solved.iter().zip(field.values()).map(|(a, b)| a * b).sum();
    Ok(-0.5 * (n as f64 * (2.0 * PI).ln() + log_det + quadratic))
}
