use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{lag_index, LagCovariance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub index: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Simple kriging on the lattice: conditional mean and variance of each target
/// given the observed values, for a zero-mean field with covariance `curve`.
pub fn conditional_predict(
    curve: &LagCovariance,
    observed: &BTreeMap<usize, f64>,
    targets: &[usize],
) -> Result<Vec<Prediction>> {
    let n = curve.n();
    let cov = |i: usize, j: usize| curve.values()[lag_index(i, j, n)];
    for &i in observed.keys().chain(targets) {
        if i >= n {
            return Err(Error::LagOutOfRange { lag: i, n });
        }
    }
    let sites: Vec<usize> = observed.keys().copied().collect();
    let m = sites.len();
    let solver = if m > 0 {
        let sigma = DMatrix::from_fn(m, m, |r, c| cov(sites[r], sites[c]));
        Some(sigma.cholesky().ok_or(Error::Singular)?)
    } else {
        None
    };
    let weights = solver
        .as_ref()
        .map(|chol| chol.solve(&DVector::from_iterator(m, observed.values().copied())));

    targets
        .iter()
        .map(|&t| {
            if let Some(&value) = observed.get(&t) {
                return Ok(Prediction { index: t, mean: value, variance: 0.0 });
            }
            let prior = curve.variance();
            let (Some(chol), Some(w)) = (&solver, &weights) else {
                return Ok(Prediction { index: t, mean: 0.0, variance: prior });
            };
            let k = DVector::from_iterator(m, sites.iter().map(|&s| cov(t, s)));
            let mean = k.dot(w);
            let reduction = k.dot(&chol.solve(&k));
            Ok(Prediction { index: t, mean, variance: (prior - reduction).max(0.0) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matern::{matern_curve, MaternParams};

    fn curve() -> LagCovariance {
        matern_curve(&MaternParams::new(2.0, 1.0).unwrap(), 8).unwrap()
    }

    #[test]
    fn observed_target_is_interpolated() {
        let obs = BTreeMap::from([(2, 0.7), (5, -0.1)]);
        let p = conditional_predict(&curve(), &obs, &[2]).unwrap();
        assert_eq!(p[0], Prediction { index: 2, mean: 0.7, variance: 0.0 });
    }

    #[test]
    fn no_observations_gives_prior() {
        let c = curve();
        let p = conditional_predict(&c, &BTreeMap::new(), &[0, 3, 7]).unwrap();
        for q in p {
            assert_eq!(q.mean, 0.0);
            assert_eq!(q.variance, c.variance());
        }
    }

    #[test]
    fn conditioning_reduces_variance() {
        let c = curve();
        let obs = BTreeMap::from([(0, 1.0), (4, -0.5)]);
        let targets: Vec<usize> = (0..8).collect();
        for p in conditional_predict(&c, &obs, &targets).unwrap() {
            assert!(p.variance <= c.variance());
        }
    }

    #[test]
    fn out_of_range_and_singular() {
        let c = curve();
        assert!(conditional_predict(&c, &BTreeMap::from([(9, 1.0)]), &[0]).is_err());
        let flat = LagCovariance::new(vec![1.0; 4]).unwrap();
        assert_eq!(
            conditional_predict(&flat, &BTreeMap::from([(0, 1.0), (1, 1.0)]), &[2]),
            Err(Error::Singular)
        );
    }
}
