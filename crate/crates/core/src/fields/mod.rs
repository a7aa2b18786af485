//! Random fields on the circular lattice: spectral sampling, the circle
//! average, Gaussian likelihood, one-dimensional fitting of `kappa`, kriging
//! and the non-ergodicity experiment.

mod ergodicity;
mod fit;
mod likelihood;
mod predict;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ergodicity::{run_ergodicity_experiment, ErgodicityReport, ErgodicityRow};
pub use fit::{fit_kappa, Boundary, FitOptions, KappaFit};
pub use likelihood::log_likelihood;
pub use predict::{conditional_predict, Prediction};
pub use sampling::{replicate_rng, sample_field, sample_fields, FieldSampler};

/// Where a field came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    pub seed: u64,
    pub replicate: u64,
}

/// One realization on the `n`-point lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    values: Vec<f64>,
    provenance: Provenance,
}

impl GridField {
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("field has no values".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("field value {i} is not finite")));
        }
        Ok(Self { values, provenance })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Lattice version of the circle average: the arithmetic mean.
pub fn circle_average(field: &GridField) -> f64 {
    field.values.iter().sum::<f64>() / field.n() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn provenance() -> Provenance {
        Provenance { model: "test".into(), seed: 0, replicate: 0 }
    }

    #[test]
    fn constant_field_average() {
        let f = GridField::new(vec![2.5; 9], provenance()).unwrap();
        assert_eq!(circle_average(&f), 2.5);
    }

    #[test]
    fn rejects_non_finite_values() {
        assert!(GridField::new(vec![1.0, f64::NAN, 0.0], provenance()).is_err());
        assert!(GridField::new(vec![], provenance()).is_err());
    }
}
