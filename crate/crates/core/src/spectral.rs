//! Circular lattice plumbing: lags, DFTs of even sequences, symmetric
//! circulant operators, lag-indexed covariances and the spectral coefficient
//! sequence `(kappa^2 + (2 pi k)^2)^(-alpha)` of the circular Matérn operator.
//!
//! Eigenvalues are always returned in natural frequency order `k = 0..n-1`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::hyperbolic::reduce_lag;

/// Smallest lattice on which the circulant structure is meaningful.
pub const MIN_LATTICE: usize = 3;

/// Default tolerance for spectral series, relative to the zero-frequency
/// coefficient.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// Hard cap on the number of explicitly summed spectral terms.
pub const MAX_TRUNCATION: usize = 10_000_000;

/// Truncations above this make the accelerated series worth switching on.
const PREFERRED_TRUNCATION: f64 = 1e5;

/// Highest Bernoulli polynomial order available to the tail correction.
const MAX_BERNOULLI_HALF_ORDER: usize = 10;

/// Relative tolerance for evenness checks of first rows and lag curves.
const SYMMETRY_TOL: f64 = 1e-12;

/// Relative tolerance (to the zero lag) for negative eigenvalues of a covariance.
pub const PSD_TOL: f64 = 1e-9;

pub(crate) fn check_lattice(n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidLattice { n, min })
    } else {
        Ok(())
    }
}

/// Normalized lag `((k1 - k2) mod n) / n` in `[0, 1)`.
///
/// Covariances are even, so `theta` and `1 - theta` are interchangeable.
pub fn angular_lag(k1: usize, k2: usize, n: usize) -> Result<f64> {
    check_lattice(n, MIN_LATTICE)?;
    for k in [k1, k2] {
        if k >= n {
            return Err(Error::LagOutOfRange { lag: k, n });
        }
    }
    Ok(lag_index(k1, k2, n) as f64 / n as f64)
}

/// Integer lag `(k1 - k2) mod n`.
pub(crate) fn lag_index(k1: usize, k2: usize, n: usize) -> usize {
    (k1 + n - k2) % n
}

fn forward_fft(buffer: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buffer.len()).process(buffer);
}

fn inverse_fft(buffer: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buffer.len()).process(buffer);
}

/// Real part of the DFT `sum_j x[j] cos(2 pi j k / n)`, exact for even sequences.
pub fn even_dft(values: &[f64]) -> Vec<f64> {
    let mut buffer: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_fft(&mut buffer);
    buffer.into_iter().map(|z| z.re).collect()
}

fn check_even(values: &[f64]) -> Result<()> {
    let n = values.len();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for k in 1..n {
        if (values[k] - values[n - k]).abs() > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { index: k });
        }
    }
    Ok(())
}

/// Symmetric circulant matrix stored by its first row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantMatrix {
    first_row: Vec<f64>,
}

impl CirculantMatrix {
    pub fn new(first_row: Vec<f64>) -> Result<Self> {
        check_lattice(first_row.len(), MIN_LATTICE)?;
        if first_row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("first row has non-finite entries".into()));
        }
        check_even(&first_row)?;
        Ok(Self { first_row })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut row = vec![0.0; n];
        if let Some(first) = row.first_mut() {
            *first = 1.0;
        }
        Self::new(row)
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    /// Entry `(i, j)`, which only depends on `(j - i) mod n`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.first_row[lag_index(j, i, self.n())]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        dft_eigenvalues(self)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        circulant_solve(self, rhs)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j) * x[j]).sum())
            .collect())
    }
}

/// Eigenvalues `lambda_k = sum_j row[j] cos(2 pi j k / n)`, `k = 0..n-1`.
pub fn dft_eigenvalues(m: &CirculantMatrix) -> Vec<f64> {
    even_dft(m.first_row())
}

/// Solves `m x = rhs` in the frequency domain.
pub fn circulant_solve(m: &CirculantMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.n();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    let eigenvalues = m.eigenvalues();
    let largest = eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if largest == 0.0 || eigenvalues.iter().any(|v| v.abs() < 1e-14 * largest) {
        return Err(Error::Singular);
    }
    let mut buffer: Vec<Complex64> = rhs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_fft(&mut buffer);
    for (z, lambda) in buffer.iter_mut().zip(&eigenvalues) {
        *z /= *lambda;
    }
    inverse_fft(&mut buffer);
    let scale = 1.0 / n as f64;
    Ok(buffer.into_iter().map(|z| z.re * scale).collect())
}

/// Covariance as a function of integer lattice lag `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagCovariance {
    values: Vec<f64>,
}

impl LagCovariance {
    /// Builds a curve from lag values; checks lattice size and evenness.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_lattice(values.len(), MIN_LATTICE)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("covariance has non-finite entries".into()));
        }
        check_even(&values)?;
        Ok(Self { values })
    }

    /// Evaluates `f` at lags `0..=n/2` and mirrors, so evenness is exact.
    pub fn from_lag_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Result<f64>,
    {
        check_lattice(n, MIN_LATTICE)?;
        let mut values = vec![0.0; n];
        for lag in 0..=n / 2 {
            let v = f(lag)?;
            values[lag] = v;
            values[(n - lag) % n] = v;
        }
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn variance(&self) -> f64 {
        self.values[0]
    }

    /// Covariance normalized by its zero-lag value.
    pub fn correlation(&self) -> Vec<f64> {
        let v0 = self.values[0];
        self.values.iter().map(|v| v / v0).collect()
    }

    /// DFT of the curve: the eigenvalues of its circulant covariance matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        even_dft(&self.values)
    }

    /// Returns the eigenvalues if none is below `-PSD_TOL * values[0]`.
    pub fn check_psd(&self) -> Result<Vec<f64>> {
        let eigenvalues = self.eigenvalues();
        let floor = -PSD_TOL * self.values[0].abs();
        match eigenvalues.iter().position(|&v| v < floor) {
            Some(index) => Err(Error::NotPositiveSemidefinite { index, value: eigenvalues[index] }),
            None => Ok(eigenvalues),
        }
    }

    pub fn is_psd(&self) -> bool {
        self.check_psd().is_ok()
    }

    pub fn to_circulant(&self) -> CirculantMatrix {
        CirculantMatrix { first_row: self.values.clone() }
    }
}

/// Spectral coefficients `c_k = (kappa^2 + (2 pi k)^2)^(-alpha)`, `k = 0..=K`.
///
/// For integer `alpha` the first `correction_order` terms of the large-`k`
/// expansion `c_k = sum_m binom(-alpha, m) kappa^(2m) (2 pi k)^(-2(alpha+m))`
/// are summed over all `k` in closed form through Bernoulli polynomials, and
/// only the remainder is summed explicitly. With `correction_order = 0` this
/// is the plain truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    kappa: f64,
    alpha: f64,
    correction_order: usize,
    coefficients: Vec<f64>,
}

/// `binom(-alpha, m)`.
fn negative_binomial(alpha: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| -acc * (alpha + j as f64) / (j as f64 + 1.0))
}

/// Bound on `sum_{|k| > K}` of the explicitly summed terms.
fn tail_bound(kappa: f64, alpha: f64, order: usize, truncation: f64) -> f64 {
    log_tail_prefactor(kappa, alpha, order).exp() * truncation.powf(1.0 - 2.0 * (alpha + order as f64))
}

fn log_tail_prefactor(kappa: f64, alpha: f64, order: usize) -> f64 {
    let s = alpha + order as f64;
    let b = negative_binomial(alpha, order).abs();
    (2.0 * b).ln() + 2.0 * order as f64 * kappa.ln() - 2.0 * s * (2.0 * PI).ln() - (2.0 * s - 1.0).ln()
}

/// Smallest `K >= 1` with the tail bound below `target`.
fn required_truncation(kappa: f64, alpha: f64, order: usize, target: f64) -> f64 {
    let s = alpha + order as f64;
    let log_k = (log_tail_prefactor(kappa, alpha, order) - target.ln()) / (2.0 * s - 1.0);
    let k = log_k.exp().ceil().max(1.0);
    // guard the ceil against rounding in the logarithms
    if tail_bound(kappa, alpha, order, k) > target {
        k + 1.0
    } else {
        k
    }
}

/// Builds the coefficient table for a series accurate to `tol * c_0`.
pub fn spectral_coefficients(kappa: f64, alpha: f64, tol: f64) -> Result<SpectralCoefficients> {
    check_positive("kappa", kappa)?;
    if !(alpha.is_finite() && alpha > 0.5) {
        return Err(Error::InvalidSmoothness(alpha));
    }
    check_positive("tol", tol)?;
    let c0 = kappa.powf(-2.0 * alpha);
    let target = tol * c0;

    let max_order = if alpha.fract() == 0.0 && alpha <= MAX_BERNOULLI_HALF_ORDER as f64 {
        MAX_BERNOULLI_HALF_ORDER - alpha as usize
    } else {
        0
    };
    let candidates: Vec<(usize, f64)> = (0..=max_order)
        .map(|order| (order, required_truncation(kappa, alpha, order, target)))
        .collect();
    let (order, truncation) = candidates
        .iter()
        .copied()
        .find(|&(_, k)| k <= PREFERRED_TRUNCATION)
        .unwrap_or_else(|| {
            candidates
                .iter()
                .copied()
                .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
        });
    if truncation.is_nan() || truncation > MAX_TRUNCATION as f64 {
        return Err(Error::TruncationCap { needed: truncation, cap: MAX_TRUNCATION });
    }
    let truncation = truncation as usize;
    let kappa2 = kappa * kappa;
    let coefficients = (0..=truncation)
        .map(|k| {
            let w = 2.0 * PI * k as f64;
            (kappa2 + w * w).powf(-alpha)
        })
        .collect();
    Ok(SpectralCoefficients { kappa, alpha, correction_order: order, coefficients })
}

impl SpectralCoefficients {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number `K` of explicitly summed frequencies on each side.
    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Number of asymptotic terms summed in closed form.
    pub fn correction_order(&self) -> usize {
        self.correction_order
    }

    /// `c_0, ..., c_K`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Analytic bound on the neglected part of the series.
    pub fn tail_bound(&self) -> f64 {
        tail_bound(self.kappa, self.alpha, self.correction_order, self.truncation() as f64)
    }

    /// The explicitly summed term for frequency `k >= 1`: `c_k` minus the
    /// asymptotic terms handled in closed form.
    pub fn remainder(&self, k: usize) -> f64 {
        let w = 2.0 * PI * k as f64;
        let c = if k < self.coefficients.len() {
            self.coefficients[k]
        } else {
            (self.kappa * self.kappa + w * w).powf(-self.alpha)
        };
        if self.correction_order == 0 {
            return c;
        }
        let inv_w2 = 1.0 / (w * w);
        let kappa2 = self.kappa * self.kappa;
        let mut term = inv_w2.powf(self.alpha);
        let mut asymptotic = 0.0;
        for m in 0..self.correction_order {
            asymptotic += negative_binomial(self.alpha, m) * term;
            term *= kappa2 * inv_w2;
        }
        c - asymptotic
    }

    /// Closed-form part: `2 sum_{m < M} binom(-alpha, m) kappa^(2m) sum_{k>=1} cos(2 pi k theta) / (2 pi k)^(2(alpha+m))`.
    fn closed_tail(&self, theta: f64) -> f64 {
        let kappa2 = self.kappa * self.kappa;
        let base = self.alpha as usize;
        let mut total = 0.0;
        let mut kappa_power = 1.0;
        for m in 0..self.correction_order {
            total += negative_binomial(self.alpha, m) * kappa_power * even_periodic_zeta(base + m, theta);
            kappa_power *= kappa2;
        }
        2.0 * total
    }

    /// `sum_k c_k cos(2 pi k theta)` over all integers `k`.
    pub fn evaluate(&self, theta: f64) -> f64 {
        let theta = reduce_lag(theta);
        let explicit: f64 = (1..=self.truncation())
            .rev()
            .map(|k| self.remainder(k) * (2.0 * PI * k as f64 * theta).cos())
            .sum();
        self.coefficients[0] + 2.0 * explicit + self.closed_tail(theta)
    }

    /// The series at every lattice lag `m / n`, by folding frequencies modulo `n`.
    pub fn evaluate_lattice(&self, n: usize) -> Vec<f64> {
        let mut folded = vec![0.0; n];
        folded[0] += self.coefficients[0];
        for k in (1..=self.truncation()).rev() {
            let r = self.remainder(k);
            folded[k % n] += r;
            folded[(n - k % n) % n] += r;
        }
        let mut values = even_dft(&folded);
        if self.correction_order > 0 {
            for (m, v) in values.iter_mut().enumerate() {
                *v += self.closed_tail(m as f64 / n as f64);
            }
        }
        values
    }
}

/// Bernoulli numbers `B_0..=B_max`.
fn bernoulli_numbers(max: usize) -> Vec<f64> {
    let mut b = vec![0.0; max + 1];
    b[0] = 1.0;
    for m in 1..=max {
        let mut acc = 0.0;
        let mut binom = 1.0; // C(m + 1, k)
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += binom * bk;
            binom = binom * (m + 1 - k) as f64 / (k + 1) as f64;
        }
        b[m] = -acc / (m + 1) as f64;
    }
    b
}

/// Bernoulli polynomial `B_p(x)`.
fn bernoulli_polynomial(p: usize, x: f64) -> f64 {
    let b = bernoulli_numbers(p);
    // Horner over x^(p - j) with coefficients C(p, j) B_j
    let mut binom = 1.0;
    let mut coefficients = Vec::with_capacity(p + 1);
    for (j, bj) in b.iter().enumerate() {
        coefficients.push(binom * bj);
        binom = binom * (p - j) as f64 / (j + 1) as f64;
    }
    coefficients.iter().fold(0.0, |acc, c| acc * x + c)
}

/// `sum_{k>=1} cos(2 pi k theta) / (2 pi k)^(2s)` for `theta` in `[0, 1]`.
fn even_periodic_zeta(s: usize, theta: f64) -> f64 {
    let p = 2 * s;
    let factorial: f64 = (1..=p).map(|i| i as f64).product();
    let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
    sign * bernoulli_polynomial(p, theta) / (2.0 * factorial)
}
