//! Parameter maps between circular Matérn fields and CAR models.
//!
//! For `alpha = 1` the map is exact: with `a = 1 / (2 cosh(kappa/n))` and
//! `sigma2 = tanh(kappa/n) / (2 kappa)` the CAR(1) covariance at lag `k`
//! equals the Matérn covariance at `theta = k/n`. For `alpha = 2` the matched
//! CAR(2) model differs from the Matérn closed form by the factor
//! `(kappa/n) coth(kappa/n)` on the `sinh(kappa/2)` term.

use serde::{Deserialize, Serialize};

use crate::car::{car_covariance_curve, CarOrder, CarSpec};
use crate::error::{check_positive, Error, Result};
use crate::matern::{matern_curve, psi2_closed, MaternParams};
use crate::spectral::check_lattice;

/// Discrepancy factors above this are reported as a poor approximation.
pub const DISCREPANCY_WARNING: f64 = 1.05;

/// `a = 1 / (2 cosh(kappa / n))`.
pub fn matched_a(kappa: f64, n: usize) -> f64 {
    0.5 / (kappa / n as f64).cosh()
}

/// CAR(1) model whose covariance equals the `alpha = 1` Matérn covariance on the lattice.
pub fn match_car_to_matern_alpha1(kappa: f64, n: usize) -> Result<CarSpec> {
    check_positive("kappa", kappa)?;
    check_lattice(n, CarOrder::First.min_lattice())?;
    let x = kappa / n as f64;
    CarSpec::from_log_beta(n, CarOrder::First, x, x.tanh() / (2.0 * kappa))
}

/// Matérn (`alpha = 1`) field with the same lattice covariance as an order-1 CAR model.
pub fn match_matern_to_car(spec: &CarSpec) -> Result<MaternParams> {
    if spec.order() != CarOrder::First {
        return Err(Error::InvalidSpec("exact matching needs an order-1 spec".into()));
    }
    let n = spec.n() as f64;
    let kappa = n * spec.log_beta();
    let variance = 2.0 * n * spec.sigma2() * spec.log_beta() / spec.root();
    MaternParams::with_variance_scale(kappa, 1.0, variance)
}

/// CAR(2) model approximating the `alpha = 2` Matérn covariance.
pub fn match_car_to_matern_alpha2(kappa: f64, n: usize) -> Result<CarSpec> {
    check_positive("kappa", kappa)?;
    check_lattice(n, CarOrder::Second.min_lattice())?;
    let x = kappa / n as f64;
    let sinh = x.sinh();
    let cosh = x.cosh();
    let sigma2 = sinh * sinh / (2.0 * n as f64 * kappa * kappa * (1.0 + 2.0 * cosh * cosh));
    CarSpec::from_log_beta(n, CarOrder::Second, x, sigma2)
}

/// Reverse map for order-2 models: `kappa = n log(beta)`, `alpha = 2`, and the
/// variance scale chosen so both covariances agree at lag 0.
pub fn match_matern_to_car2(spec: &CarSpec) -> Result<MaternParams> {
    if spec.order() != CarOrder::Second {
        return Err(Error::InvalidSpec("order-2 matching needs an order-2 spec".into()));
    }
    let kappa = spec.n() as f64 * spec.log_beta();
    let car0 = car_covariance_curve(spec)?.variance();
    MaternParams::with_variance_scale(kappa, 2.0, car0 / psi2_closed(0.0, kappa)?)
}

/// `(kappa/n) coth(kappa/n)`.
pub fn alpha2_discrepancy_factor(kappa: f64, n: usize) -> f64 {
    let x = kappa / n as f64;
    if x < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    }
}

/// Second-order Taylor match `a = n^2 / (kappa^2 + 2 n^2)`.
pub fn besag_approx_a(kappa: f64, n: usize) -> f64 {
    let n2 = (n * n) as f64;
    n2 / (kappa * kappa + 2.0 * n2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub lag: usize,
    pub theta: f64,
    pub matern_cov: f64,
    pub car_cov: f64,
    pub matern_corr: f64,
    pub car_corr: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

/// Lag-by-lag comparison of a Matérn curve with its matched CAR curve.
/// Differences are between correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComparison {
    pub kappa: f64,
    pub alpha: u32,
    pub n: usize,
    pub car: CarSpec,
    pub discrepancy_factor: f64,
    pub max_corr_diff: f64,
    pub rows: Vec<ComparisonRow>,
}

impl CurveComparison {
    pub fn exceeds_warning(&self) -> bool {
        self.discrepancy_factor > DISCREPANCY_WARNING
    }
}

/// Compares the Matérn correlation for `alpha` in `{1, 2}` with that of the matched CAR model.
pub fn compare_curves(kappa: f64, alpha: u32, n: usize) -> Result<CurveComparison> {
    let (car, discrepancy_factor) = match alpha {
        1 => (match_car_to_matern_alpha1(kappa, n)?, 1.0),
        2 => (match_car_to_matern_alpha2(kappa, n)?, alpha2_discrepancy_factor(kappa, n)),
        other => {
            return Err(Error::InvalidInput(format!("matching is available for alpha 1 or 2, got {other}")))
        }
    };
    let matern = matern_curve(&MaternParams::new(kappa, alpha as f64)?, n)?;
    let car_curve = car_covariance_curve(&car)?;
    let matern_corr = matern.correlation();
    let car_corr = car_curve.correlation();
    let rows: Vec<ComparisonRow> = (0..n)
        .map(|lag| {
            let abs_diff = (matern_corr[lag] - car_corr[lag]).abs();
            ComparisonRow {
                lag,
                theta: lag as f64 / n as f64,
                matern_cov: matern.values()[lag],
                car_cov: car_curve.values()[lag],
                matern_corr: matern_corr[lag],
                car_corr: car_corr[lag],
                abs_diff,
                rel_diff: abs_diff / matern_corr[lag].abs(),
            }
        })
        .collect();
    let max_corr_diff = rows.iter().fold(0.0_f64, |m, r| m.max(r.abs_diff));
    Ok(CurveComparison { kappa, alpha, n, car, discrepancy_factor, max_corr_diff, rows })
}
