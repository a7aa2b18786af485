//! Circular Matérn covariance on the unit-circumference circle,
//!
//! ```text
//! psi(theta) = sum_k cos(2 pi k theta) / (kappa^2 + (2 pi k)^2)^alpha
//! ```
//!
//! evaluated either as a spectral series (any `alpha > 1/2`) or through the
//! hyperbolic closed forms for `alpha = 1, 2, 3`. The closed forms are tied
//! together by `psi_{m+1} = -1/(2 m kappa) d psi_m / d kappa`.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::hyperbolic::{centered, coth, cosh_over_sinh_half, sinh_over_sinh_half};
use crate::spectral::{check_lattice, spectral_coefficients, LagCovariance, DEFAULT_SERIES_TOL, MIN_LATTICE};

/// Parameters of a circular Matérn field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternParams {
    kappa: f64,
    alpha: f64,
    variance_scale: f64,
}

impl MaternParams {
    pub fn new(kappa: f64, alpha: f64) -> Result<Self> {
        Self::with_variance_scale(kappa, alpha, 1.0)
    }

    pub fn with_variance_scale(kappa: f64, alpha: f64, variance_scale: f64) -> Result<Self> {
        check_positive("kappa", kappa)?;
        if !(alpha.is_finite() && alpha > 0.5) {
            return Err(Error::InvalidSmoothness(alpha));
        }
        check_positive("variance_scale", variance_scale)?;
        Ok(Self { kappa, alpha, variance_scale })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn variance_scale(&self) -> f64 {
        self.variance_scale
    }

    /// Integer order if `alpha` is 1, 2 or 3.
    pub fn closed_form_order(&self) -> Option<u32> {
        [1.0, 2.0, 3.0].iter().position(|&a| a == self.alpha).map(|i| i as u32 + 1)
    }

    /// Zero-frequency spectral coefficient `kappa^(-2 alpha)` times the
    /// variance scale: the variance of the circle average.
    pub fn zero_frequency_coefficient(&self) -> f64 {
        self.variance_scale * self.kappa.powf(-2.0 * self.alpha)
    }
}

/// Spectral series. `tol` bounds the truncation error relative to the
/// zero-frequency coefficient `kappa^(-2 alpha)`.
pub fn psi_series(theta: f64, params: &MaternParams, tol: f64) -> Result<f64> {
    let coefficients = spectral_coefficients(params.kappa, params.alpha, tol)?;
    Ok(params.variance_scale * coefficients.evaluate(theta))
}

fn check_kappa(kappa: f64) -> Result<()> {
    check_positive("kappa", kappa)
}

/// `alpha = 1`: `cosh(kappa (theta - 1/2)) / (2 kappa sinh(kappa / 2))`.
pub fn psi1_closed(theta: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let u = centered(theta);
    Ok(cosh_over_sinh_half(kappa, u) / (2.0 * kappa))
}

/// `alpha = 2`, with `u = theta - 1/2`:
///
/// ```text
/// (sinh(kappa/2) + (kappa/2) cosh(kappa/2)) / (4 kappa^3 sinh^2(kappa/2)) cosh(kappa u)
///     - u sinh(kappa u) / (4 kappa^2 sinh(kappa/2))
/// ```
pub fn psi2_closed(theta: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let u = centered(theta);
    let ch = coth(kappa / 2.0);
    let k2 = kappa * kappa;
    let even = 1.0 / (4.0 * k2 * kappa) + ch / (8.0 * k2);
    Ok(even * cosh_over_sinh_half(kappa, u) - u * sinh_over_sinh_half(kappa, u) / (4.0 * k2))
}

/// `alpha = 3`, obtained as `-1/(4 kappa) d psi2 / d kappa`.
///
/// Writing `s = sinh(kappa/2)`, `c = cosh(kappa/2)`, `q = c / s` and
/// `u = theta - 1/2`, differentiating the `alpha = 2` form gives
///
/// ```text
/// psi3 = [3/(16 k^5) + 3q/(32 k^4) + (2q^2 - 1 + 4u^2)/(64 k^3)] cosh(k u) / s
///      - [3/(16 k^4) + q/(16 k^3)] u sinh(k u) / s
/// ```
pub fn psi3_closed(theta: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let u = centered(theta);
    let q = coth(kappa / 2.0);
    let k3 = kappa.powi(3);
    let k4 = k3 * kappa;
    let k5 = k4 * kappa;
    let even = 3.0 / (16.0 * k5) + 3.0 * q / (32.0 * k4) + (2.0 * q * q - 1.0 + 4.0 * u * u) / (64.0 * k3);
    let odd = 3.0 / (16.0 * k4) + q / (16.0 * k3);
    Ok(even * cosh_over_sinh_half(kappa, u) - odd * u * sinh_over_sinh_half(kappa, u))
}

/// Closed form of order `order` in `{1, 2, 3}`.
pub fn psi_closed(order: u32, theta: f64, kappa: f64) -> Result<f64> {
    match order {
        1 => psi1_closed(theta, kappa),
        2 => psi2_closed(theta, kappa),
        3 => psi3_closed(theta, kappa),
        _ => Err(Error::InvalidInput(format!("no closed form for order {order}"))),
    }
}

/// Covariance at lag fraction `theta`: closed form when one exists, series otherwise.
pub fn matern_covariance(theta: f64, params: &MaternParams) -> Result<f64> {
    match params.closed_form_order() {
        Some(order) => Ok(params.variance_scale * psi_closed(order, theta, params.kappa)?),
        None => psi_series(theta, params, DEFAULT_SERIES_TOL),
    }
}

/// Covariance at every lattice lag `k / n`.
pub fn matern_curve(params: &MaternParams, n: usize) -> Result<LagCovariance> {
    check_lattice(n, MIN_LATTICE)?;
    match params.closed_form_order() {
        Some(order) => LagCovariance::from_lag_fn(n, |lag| {
            Ok(params.variance_scale * psi_closed(order, lag as f64 / n as f64, params.kappa)?)
        }),
        None => matern_curve_series(params, n, DEFAULT_SERIES_TOL),
    }
}

/// Lattice curve from the spectral series regardless of `alpha`.
pub fn matern_curve_series(params: &MaternParams, n: usize, tol: f64) -> Result<LagCovariance> {
    check_lattice(n, MIN_LATTICE)?;
    let coefficients = spectral_coefficients(params.kappa, params.alpha, tol)?;
    let values = coefficients.evaluate_lattice(n);
    LagCovariance::from_lag_fn(n, |lag| Ok(params.variance_scale * values[lag]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(MaternParams::new(1.0, 1.0).is_ok());
        assert_eq!(MaternParams::new(1.0, 0.5), Err(Error::InvalidSmoothness(0.5)));
        assert!(MaternParams::new(0.0, 1.0).is_err());
        assert!(MaternParams::with_variance_scale(1.0, 1.0, -1.0).is_err());
        assert_eq!(MaternParams::new(2.0, 2.5).unwrap().closed_form_order(), None);
    }

    #[test]
    fn series_examples() {
        let p = MaternParams::new(1.0, 1.0).unwrap();
        let v0 = psi_series(0.0, &p, 1e-10).unwrap();
        assert!((v0 - 1.081977).abs() < 1e-6);
        assert_relative_eq!(v0, coth(0.5) / 2.0, max_relative = 1e-10);
        let vh = psi_series(0.5, &p, 1e-10).unwrap();
        assert!((vh - 0.959517).abs() < 1e-6);
        assert_relative_eq!(vh, 1.0 / (2.0 * 0.5_f64.sinh()), max_relative = 1e-10);
        let p2 = MaternParams::new(1.0, 2.0).unwrap();
        assert!((psi_series(0.0, &p2, 1e-10).unwrap() - 1.001326).abs() < 1e-6);
        let bad = MaternParams { kappa: 1.0, alpha: 0.4, variance_scale: 1.0 };
        assert_eq!(psi_series(0.0, &bad, 1e-6), Err(Error::InvalidSmoothness(0.4)));
    }

    #[test]
    fn series_is_reflection_symmetric() {
        let p = MaternParams::new(3.0, 1.7).unwrap();
        let a = psi_series(0.2, &p, 1e-8).unwrap();
        let b = psi_series(0.8, &p, 1e-8).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn closed_form_examples() {
        assert!((psi1_closed(0.5, 1.0).unwrap() - 0.959517).abs() < 1e-6);
        assert!((psi1_closed(0.0, 1.0).unwrap() - 1.081977).abs() < 1e-6);
        assert_eq!(psi1_closed(0.25, 3.0).unwrap(), psi1_closed(0.75, 3.0).unwrap());
        assert!((psi2_closed(0.0, 1.0).unwrap() - 1.001326).abs() < 1e-6);
        let s = 0.5_f64.sinh();
        let first_term = (s + 0.5 * 0.5_f64.cosh()) / (4.0 * s * s);
        assert_relative_eq!(psi2_closed(0.5, 1.0).unwrap(), first_term, max_relative = 1e-14);
        assert_relative_eq!(psi3_closed(0.1, 2.0).unwrap(), psi3_closed(0.9, 2.0).unwrap(), max_relative = 1e-12);
        for f in [psi1_closed, psi2_closed, psi3_closed] {
            assert!(f(0.3, 0.0).is_err());
        }
    }

    #[test]
    fn psi3_matches_series() {
        let p = MaternParams::new(1.0, 3.0).unwrap();
        let series = psi_series(0.0, &p, 1e-12).unwrap();
        assert!((psi3_closed(0.0, 1.0).unwrap() - series).abs() < 1e-10);
    }

    #[test]
    fn finite_difference_ladder() {
        let h = 1e-5;
        let (theta, kappa) = (0.3, 2.0);
        let d1 = (psi1_closed(theta, kappa + h).unwrap() - psi1_closed(theta, kappa - h).unwrap()) / (2.0 * h);
        assert!((-d1 / (2.0 * kappa) - psi2_closed(theta, kappa).unwrap()).abs() < 1e-6);
        let (theta, kappa) = (0.2, 1.5);
        let d2 = (psi2_closed(theta, kappa + h).unwrap() - psi2_closed(theta, kappa - h).unwrap()) / (2.0 * h);
        assert!((-d2 / (4.0 * kappa) - psi3_closed(theta, kappa).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn curve_examples() {
        let p = MaternParams::new(10.0, 1.0).unwrap();
        let c = matern_curve(&p, 50).unwrap();
        assert_eq!(c.values()[0], psi1_closed(0.0, 10.0).unwrap());

        let c = matern_curve(&MaternParams::new(10.0, 2.0).unwrap(), 10).unwrap();
        assert!(c.eigenvalues().iter().all(|&v| v >= 0.0));

        let c = matern_curve(&MaternParams::new(5.0, 3.0).unwrap(), 17).unwrap();
        for k in 1..17 {
            assert_eq!(c.values()[k], c.values()[17 - k]);
        }
        assert!(matern_curve(&p, 2).is_err());
    }

    #[test]
    fn non_integer_curve_uses_series() {
        let p = MaternParams::new(4.0, 2.5).unwrap();
        let c = matern_curve(&p, 12).unwrap();
        for lag in 0..12 {
            let direct = psi_series(lag as f64 / 12.0, &p, 1e-12).unwrap();
            assert!((c.values()[lag] - direct).abs() < 1e-12 * c.values()[0]);
        }
        assert!(c.is_psd());
    }

    #[test]
    fn theta_outside_unit_interval_wraps() {
        assert_relative_eq!(psi2_closed(1.3, 4.0).unwrap(), psi2_closed(0.3, 4.0).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(psi1_closed(-0.2, 4.0).unwrap(), psi1_closed(0.2, 4.0).unwrap(), max_relative = 1e-12);
    }
}
