use serde::{Deserialize, Serialize};

use super::{log_likelihood, GridField};
use crate::error::{check_positive, Error, Result};
use crate::matern::{matern_curve, MaternParams};

const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub lower: f64,
    pub upper: f64,
    /// Points of the initial log-spaced scan.
    pub grid_points: usize,
    /// Final bracket width in `log(kappa)`.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { lower: 1e-3, upper: 1e3, grid_points: 49, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaFit {
    pub kappa: f64,
    pub alpha: u32,
    pub log_likelihood: f64,
    /// Set when the maximum sits on an end of the search bracket.
    pub boundary: Option<Boundary>,
    pub evaluations: usize,
}

/// Maximum-likelihood `kappa` for fields sharing one lattice, by a log-spaced
/// scan followed by golden-section refinement around the best scan point.
pub fn fit_kappa(fields: &[GridField], alpha: u32, options: &FitOptions) -> Result<KappaFit> {
    if !(1..=3).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha must be 1, 2 or 3, got {alpha}")));
    }
    let first = fields.first().ok_or_else(|| Error::InvalidInput("no fields to fit".into()))?;
    let n = first.n();
    if let Some(f) = fields.iter().find(|f| f.n() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: f.n() });
    }
    check_positive("lower", options.lower)?;
    check_positive("upper", options.upper)?;
    if options.lower >= options.upper || options.grid_points < 3 || options.tolerance.is_nan() || options.tolerance <= 0.0 {
        return Err(Error::InvalidInput("invalid search bracket".into()));
    }

    let mut evaluations = 0;
    let mut objective = |log_kappa: f64| -> f64 {
        evaluations += 1;
        total_log_likelihood(fields, log_kappa.exp(), alpha, n).unwrap_or(f64::NEG_INFINITY)
    };

    let (lo, hi) = (options.lower.ln(), options.upper.ln());
    let step = (hi - lo) / (options.grid_points - 1) as f64;
    let scan: Vec<f64> = (0..options.grid_points).map(|i| objective(lo + step * i as f64)).collect();
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > scan[b] { i } else { b });
    if scan[best] == f64::NEG_INFINITY {
        return Err(Error::Singular);
    }

    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(options.grid_points - 1) as f64;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while b - a > options.tolerance {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = objective(x2);
        }
    }
    let log_kappa = 0.5 * (a + b);
    let value = objective(log_kappa);

    let boundary = if log_kappa - lo <= options.tolerance {
        Some(Boundary::Lower)
    } else if hi - log_kappa <= options.tolerance {
        Some(Boundary::Upper)
    } else {
        None
    };
    Ok(KappaFit { kappa: log_kappa.exp(), alpha, log_likelihood: value, boundary, evaluations })
}

fn total_log_likelihood(fields: &[GridField], kappa: f64, alpha: u32, n: usize) -> Result<f64> {
    let curve = matern_curve(&MaternParams::new(kappa, alpha as f64)?, n)?;
    fields.iter().map(|f| log_likelihood(&curve, f)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FieldSampler, Provenance};

    #[test]
    fn zero_field_hits_the_upper_end() {
        let zero = GridField::new(vec![0.0; 16], Provenance { model: "zero".into(), seed: 0, replicate: 0 }).unwrap();
        let fit = fit_kappa(&[zero], 1, &FitOptions::default()).unwrap();
        assert_eq!(fit.boundary, Some(Boundary::Upper));
        assert!(fit.log_likelihood.is_finite());
    }

    #[test]
    fn argument_errors() {
        assert!(fit_kappa(&[], 1, &FitOptions::default()).is_err());
        let f = GridField::new(vec![0.1; 8], Provenance { model: "x".into(), seed: 0, replicate: 0 }).unwrap();
        let g = GridField::new(vec![0.1; 9], Provenance { model: "x".into(), seed: 0, replicate: 0 }).unwrap();
        assert!(matches!(fit_kappa(&[f.clone(), g], 1, &FitOptions::default()), Err(Error::DimensionMismatch { .. })));
        assert!(fit_kappa(std::slice::from_ref(&f), 4, &FitOptions::default()).is_err());
        let bad = FitOptions { lower: 2.0, upper: 1.0, ..FitOptions::default() };
        assert!(fit_kappa(&[f], 1, &bad).is_err());
    }

    #[test]
    fn recovers_kappa_from_small_sample() {
        let curve = matern_curve(&MaternParams::new(4.0, 2.0).unwrap(), 64).unwrap();
        let fields = FieldSampler::new(&curve, "m").unwrap().sample_many(5, 100);
        let fit = fit_kappa(&fields, 2, &FitOptions::default()).unwrap();
        assert!(fit.boundary.is_none());
        assert!((fit.kappa - 4.0).abs() < 0.6, "kappa {}", fit.kappa);
    }
}
