//! Conditional autoregressive (CAR) models on the `n`-point circular lattice.
//!
//! Order 1: `Z_k | rest ~ N(a Z_{k-1} + a Z_{k+1}, sigma2)`, precision
//! `(I - M1) / sigma2`. Order 2 is the self-convolution of order 1, with
//! weights `a1 = 2a / (2a^2 + 1)` on the first neighbours and
//! `a2 = -a^2 / (2a^2 + 1)` on the second.
//!
//! Both covariances have closed forms in `log(beta)` with
//! `beta = (1 + sqrt(1 - 4a^2)) / (2a)`, equivalently `a = 1 / (2 cosh(log beta))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{centered, coth, cosh_over_sinh_half, sinh_over_sinh_half};
use crate::spectral::{check_lattice, CirculantMatrix, LagCovariance, MIN_LATTICE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u32", try_from = "u32")]
pub enum CarOrder {
    First,
    Second,
}

impl CarOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            CarOrder::First => 1,
            CarOrder::Second => 2,
        }
    }

    /// Smallest lattice with distinct neighbours.
    pub fn min_lattice(self) -> usize {
        match self {
            CarOrder::First => 3,
            CarOrder::Second => 5,
        }
    }
}

impl From<CarOrder> for u32 {
    fn from(order: CarOrder) -> u32 {
        order.as_u32()
    }
}

impl TryFrom<u32> for CarOrder {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        match value {
            1 => Ok(CarOrder::First),
            2 => Ok(CarOrder::Second),
            other => Err(Error::InvalidSpec(format!("order must be 1 or 2, got {other}"))),
        }
    }
}

/// A CAR model on the circle.
///
/// `log_beta` is kept alongside `a` because near `a = 1/2` it cannot be
/// recovered from `a` to full relative precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarSpec {
    n: usize,
    order: CarOrder,
    a: f64,
    sigma2: f64,
    log_beta: f64,
}

fn log_beta_of(a: f64) -> f64 {
    let root = ((1.0 - 2.0 * a) * (1.0 + 2.0 * a)).sqrt();
    ((1.0 + root) / (2.0 * a)).ln()
}

impl CarSpec {
    pub fn new(n: usize, order: CarOrder, a: f64, sigma2: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && a < 0.5) {
            return Err(Error::InvalidSpec(format!("a = {a} must lie strictly inside (0, 1/2)")));
        }
        Self::validated(n, order, a, sigma2, log_beta_of(a))
    }

    /// Builds the spec from `log(beta) > 0` directly, with `a = 1 / (2 cosh(log beta))`.
    pub fn from_log_beta(n: usize, order: CarOrder, log_beta: f64, sigma2: f64) -> Result<Self> {
        if !(log_beta.is_finite() && log_beta > 0.0) {
            return Err(Error::InvalidSpec(format!("log(beta) = {log_beta} must be positive")));
        }
        let a = 0.5 / log_beta.cosh();
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::InvalidSpec(format!("log(beta) = {log_beta} gives a = {a} outside (0, 1/2)")));
        }
        Self::validated(n, order, a, sigma2, log_beta)
    }

    fn validated(n: usize, order: CarOrder, a: f64, sigma2: f64, log_beta: f64) -> Result<Self> {
        if n < order.min_lattice() {
            return Err(Error::InvalidSpec(format!(
                "order {} needs n >= {}, got {n}",
                order.as_u32(),
                order.min_lattice()
            )));
        }
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(Error::InvalidSpec(format!("sigma2 = {sigma2} must be positive")));
        }
        Ok(Self { n, order, a, sigma2, log_beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> CarOrder {
        self.order
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn beta(&self) -> f64 {
        self.log_beta.exp()
    }

    pub fn log_beta(&self) -> f64 {
        self.log_beta
    }

    /// `sqrt(1 - 4 a^2)`, computed as `tanh(log beta)`.
    pub fn root(&self) -> f64 {
        self.log_beta.tanh()
    }

    /// First-neighbour weight of the order-2 model.
    pub fn a1(&self) -> f64 {
        2.0 * self.a / (2.0 * self.a * self.a + 1.0)
    }

    /// Second-neighbour weight of the order-2 model.
    pub fn a2(&self) -> f64 {
        -self.a * self.a / (2.0 * self.a * self.a + 1.0)
    }

    /// Neighbour weights `(first, second)` of the conditional mean.
    pub fn neighbor_weights(&self) -> (f64, f64) {
        match self.order {
            CarOrder::First => (self.a, 0.0),
            CarOrder::Second => (self.a1(), self.a2()),
        }
    }

    /// Front factor relating the covariance to the unit sum `phi_m`.
    fn scale(&self) -> f64 {
        match self.order {
            CarOrder::First => self.sigma2,
            CarOrder::Second => self.sigma2 * (2.0 * self.a * self.a + 1.0),
        }
    }

    fn power(&self) -> u32 {
        self.order.as_u32()
    }
}

/// Precision matrix `(I - M) / sigma2`.
pub fn build_precision(spec: &CarSpec) -> CirculantMatrix {
    let n = spec.n;
    let (w1, w2) = spec.neighbor_weights();
    let mut row = vec![0.0; n];
    row[0] = 1.0;
    row[1] -= w1;
    row[n - 1] -= w1;
    if spec.order == CarOrder::Second {
        row[2] -= w2;
        row[n - 2] -= w2;
    }
    for v in &mut row {
        *v /= spec.sigma2;
    }
    CirculantMatrix::new(row).expect("CAR precision rows are symmetric by construction")
}

fn check_unit_params(n: usize, a: f64) -> Result<()> {
    check_lattice(n, MIN_LATTICE)?;
    if !(a.is_finite() && a > 0.0 && a < 0.5) {
        return Err(Error::InvalidSpec(format!("a = {a} must lie strictly inside (0, 1/2)")));
    }
    Ok(())
}

/// `phi_m(lag / n) = (1/n) sum_k cos(2 pi lag k / n) / (1 - 2a cos(2 pi k / n))^m`.
///
/// The error is absolute, of order `eps * phi_m(0)`, so values at lags where
/// the covariance is tiny carry little relative accuracy.
pub fn phi_m_spectral(m: u32, n: usize, a: f64, lag: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput("phi_m needs m >= 1".into()));
    }
    check_unit_params(n, a)?;
    if lag >= n {
        return Err(Error::LagOutOfRange { lag, n });
    }
    let step = 2.0 * PI / n as f64;
    let total: f64 = (0..n)
        .map(|k| {
            let w = step * k as f64;
            // reduce lag * k modulo n so the cosine argument stays in [0, 2 pi)
            let phase = step * ((lag * k) % n) as f64;
            phase.cos() / (1.0 - 2.0 * a * w.cos()).powi(m as i32)
        })
        .sum();
    Ok(total / n as f64)
}

/// Covariance at integer lag by the exact finite spectral sum.
pub fn car_covariance_spectral(spec: &CarSpec, lag: usize) -> Result<f64> {
    Ok(spec.scale() * phi_m_spectral(spec.power(), spec.n, spec.a, lag)?)
}

fn phi1_from_log_beta(theta: f64, n: usize, log_beta: f64) -> f64 {
    let u = centered(theta);
    cosh_over_sinh_half(n as f64 * log_beta, u) / log_beta.tanh()
}

fn phi2_from_log_beta(theta: f64, n: usize, log_beta: f64) -> f64 {
    let u = centered(theta);
    let nf = n as f64;
    let x = nf * log_beta;
    let t = log_beta.tanh();
    let even = 0.5 * coth(x / 2.0) + coth(log_beta) / nf;
    nf / (t * t) * (even * cosh_over_sinh_half(x, u) - u * sinh_over_sinh_half(x, u))
}

/// Unit-scale order-1 covariance
/// `cosh(n log(beta) (theta - 1/2)) / (tanh(log beta) sinh(n log(beta) / 2))`.
pub fn phi1(theta: f64, n: usize, a: f64) -> Result<f64> {
    check_unit_params(n, a)?;
    Ok(phi1_from_log_beta(theta, n, log_beta_of(a)))
}

/// Unit-scale order-2 covariance, `phi1 + a d phi1 / da` in closed form:
///
/// ```text
/// n / tanh^2(l) * [ (coth(n l / 2) / 2 + coth(l) / n) cosh(n l u) / sinh(n l / 2)
///                   - u sinh(n l u) / sinh(n l / 2) ]
/// ```
///
/// with `l = log(beta)` and `u = theta - 1/2`.
pub fn phi2(theta: f64, n: usize, a: f64) -> Result<f64> {
    check_unit_params(n, a)?;
    Ok(phi2_from_log_beta(theta, n, log_beta_of(a)))
}

/// Order-1 covariance `sigma2 * phi1(theta)`.
pub fn phi1_closed(theta: f64, spec: &CarSpec) -> Result<f64> {
    if spec.order != CarOrder::First {
        return Err(Error::InvalidSpec("phi1_closed needs an order-1 spec".into()));
    }
    Ok(spec.sigma2 * phi1_from_log_beta(theta, spec.n, spec.log_beta))
}

/// Order-2 covariance `sigma2 (2a^2 + 1) phi2(theta)`.
pub fn phi2_closed(theta: f64, spec: &CarSpec) -> Result<f64> {
    if spec.order != CarOrder::Second {
        return Err(Error::InvalidSpec("phi2_closed needs an order-2 spec".into()));
    }
    Ok(spec.scale() * phi2_from_log_beta(theta, spec.n, spec.log_beta))
}

/// Covariance at all lags from the closed forms.
pub fn car_covariance_curve(spec: &CarSpec) -> Result<LagCovariance> {
    let n = spec.n;
    LagCovariance::from_lag_fn(n, |lag| {
        let theta = lag as f64 / n as f64;
        match spec.order {
            CarOrder::First => phi1_closed(theta, spec),
            CarOrder::Second => phi2_closed(theta, spec),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn first(n: usize, a: f64) -> CarSpec {
        CarSpec::new(n, CarOrder::First, a, 1.0).unwrap()
    }

    #[test]
    fn precision_rows() {
        let p = build_precision(&first(3, 0.3));
        assert_eq!(p.first_row(), &[1.0, -0.3, -0.3]);
        let spec = CarSpec::new(7, CarOrder::Second, 0.2, 2.0).unwrap();
        let row = build_precision(&spec).first_row().to_vec();
        assert_relative_eq!(row[0], 0.5);
        assert_relative_eq!(row[1], -spec.a1() / 2.0);
        assert_relative_eq!(row[2], -spec.a2() / 2.0);
        assert_eq!(row[3], 0.0);
        assert_eq!(row[5], row[2]);
        assert_eq!(row[6], row[1]);
    }

    #[test]
    fn order_two_weights() {
        let spec = CarSpec::new(50, CarOrder::Second, 0.490164, 1.0).unwrap();
        assert!((spec.a1() - 0.662151).abs() < 1e-6);
        assert!((spec.a2() + 0.162281).abs() < 1e-6);
    }

    #[test]
    fn car_spec_validation() {
        assert!(CarSpec::new(3, CarOrder::First, 0.5, 1.0).is_err());
        assert!(CarSpec::new(3, CarOrder::First, 0.0, 1.0).is_err());
        assert!(CarSpec::new(3, CarOrder::First, -0.2, 1.0).is_err());
        assert!(CarSpec::new(2, CarOrder::First, 0.2, 1.0).is_err());
        assert!(CarSpec::new(4, CarOrder::Second, 0.2, 1.0).is_err());
        assert!(CarSpec::new(5, CarOrder::Second, 0.2, 1.0).is_ok());
        assert!(CarSpec::new(5, CarOrder::First, 0.2, 0.0).is_err());
        assert!(CarSpec::from_log_beta(5, CarOrder::First, 0.0, 1.0).is_err());
        assert_eq!(CarOrder::try_from(3).map(|_| ()), Err(Error::InvalidSpec("order must be 1 or 2, got 3".into())));
    }

    #[test]
    fn beta_is_three_for_a_point_three() {
        let spec = first(3, 0.3);
        assert_relative_eq!(spec.beta(), 3.0, max_relative = 1e-15);
        assert_relative_eq!(spec.root(), 0.8, max_relative = 1e-15);
    }

    #[test]
    fn small_lattice_values() {
        let spec = first(3, 0.3);
        assert!((car_covariance_spectral(&spec, 0).unwrap() - 1.346154).abs() < 1e-6);
        assert!((car_covariance_spectral(&spec, 1).unwrap() - 0.576923).abs() < 1e-6);
        assert!((phi1_closed(0.0, &spec).unwrap() - 1.346154).abs() < 1e-6);
        assert!((phi1_closed(1.0 / 3.0, &spec).unwrap() - 0.576923).abs() < 1e-6);
        assert_relative_eq!(phi1_closed(0.2, &spec).unwrap(), phi1_closed(0.8, &spec).unwrap(), max_relative = 1e-14);
        assert!(car_covariance_spectral(&spec, 3).is_err());
    }

    #[test]
    fn order_two_matches_spectral_sum() {
        let spec = CarSpec::new(5, CarOrder::Second, 0.3, 1.0).unwrap();
        for lag in 0..5 {
            let closed = phi2_closed(lag as f64 / 5.0, &spec).unwrap();
            let sum = car_covariance_spectral(&spec, lag).unwrap();
            assert_relative_eq!(closed, sum, max_relative = 1e-12);
        }
        assert_eq!(
            phi2_closed(0.4, &spec).unwrap(),
            phi2_closed(0.6, &spec).unwrap(),
        );
        assert!(phi2_closed(0.0, &first(5, 0.3)).is_err());
        assert!(phi1_closed(0.0, &spec).is_err());
    }

    #[test]
    fn phi2_is_a_derivative_of_phi1() {
        let (n, a, h) = (5, 0.3, 1e-6);
        for lag in 0..5 {
            let theta = lag as f64 / n as f64;
            let d = (phi1(theta, n, a + h).unwrap() - phi1(theta, n, a - h).unwrap()) / (2.0 * h);
            let ladder = phi1(theta, n, a).unwrap() + a * d;
            assert_relative_eq!(phi2(theta, n, a).unwrap(), ladder, max_relative = 1e-5);
        }
    }

    #[test]
    fn phi3_ladder_at_zero_lag() {
        let (n, a, h) = (7, 0.2, 1e-6);
        let d = (phi2(0.0, n, a + h).unwrap() - phi2(0.0, n, a - h).unwrap()) / (2.0 * h);
        let ladder = phi2(0.0, n, a).unwrap() + 0.5 * a * d;
        assert_relative_eq!(phi_m_spectral(3, n, a, 0).unwrap(), ladder, max_relative = 1e-5);
    }

    #[test]
    fn phi_m_peaks_at_zero_lag() {
        for m in 1..=4 {
            let v0 = phi_m_spectral(m, 9, 0.4, 0).unwrap();
            for lag in 1..9 {
                assert!(v0 >= phi_m_spectral(m, 9, 0.4, lag).unwrap());
            }
        }
        assert!(phi_m_spectral(0, 9, 0.4, 0).is_err());
        for lag in 0..3 {
            assert_relative_eq!(
                phi_m_spectral(1, 3, 0.3, lag).unwrap(),
                phi1_closed(lag as f64 / 3.0, &first(3, 0.3)).unwrap(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn curve_inverts_precision() {
        let spec = CarSpec::new(9, CarOrder::Second, 0.35, 0.7).unwrap();
        let curve = car_covariance_curve(&spec).unwrap();
        let precision = build_precision(&spec);
        let mut e0 = vec![0.0; 9];
        e0[0] = 1.0;
        let column = precision.solve(&e0).unwrap();
        for (c, v) in column.iter().zip(curve.values()) {
            assert!((c - v).abs() < 1e-9 * curve.values()[0]);
        }
        for (lc, lp) in curve.eigenvalues().iter().zip(precision.eigenvalues()) {
            assert_relative_eq!(*lc, 1.0 / lp, max_relative = 1e-10);
        }
    }
}
