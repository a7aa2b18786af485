use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{circle_average, replicate_rng, FieldSampler, GridField, Provenance};
use crate::error::{Error, Result};
use crate::matern::{matern_curve, MaternParams};
use crate::spectral::{check_lattice, MIN_LATTICE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityRow {
    pub n: usize,
    /// Sample mean of the circle average over replicates.
    pub mean: f64,
    /// Sample variance of the circle average over replicates.
    pub variance: f64,
    /// Standard error of `variance` under Gaussianity, `variance * sqrt(2 / (R - 1))`.
    pub standard_error: f64,
    /// Exact variance of the lattice average: the zero-frequency aliased
    /// spectrum `(1/n) sum_k C(k/n)`, plus the extra variance.
    pub lattice_variance: f64,
    /// `(variance - expected_variance) / standard_error`.
    pub z_score: f64,
}

/// Variance of the circle average under grid refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub model: MaternParams,
    pub replicates: u64,
    pub seed: u64,
    /// Variance of the additive constant `X0`.
    pub extra_variance: f64,
    /// `variance_scale * kappa^(-2 alpha)`.
    pub theoretical_floor: f64,
    /// `theoretical_floor + extra_variance`.
    pub expected_variance: f64,
    pub rows: Vec<ErgodicityRow>,
}

impl ErgodicityReport {
    /// Whether every grid size lies within `k` standard errors of the floor.
    pub fn within(&self, k: f64) -> bool {
        self.rows.iter().all(|r| r.z_score.abs() <= k)
    }
}

/// Samples `replicates` fields `Y = X + X0` per grid size, with `X` the
/// circular Matérn field on the lattice and `X0 ~ N(0, extra_variance)`
/// independent of it, and records the spread of the circle average.
///
/// Replicate `r` at the `i`-th grid size uses stream `(i << 40) | r` of `seed`.
pub fn run_ergodicity_experiment(
    params: &MaternParams,
    grid_sizes: &[usize],
    replicates: u64,
    seed: u64,
    extra_variance: f64,
) -> Result<ErgodicityReport> {
    if replicates < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 replicates, got {replicates}")));
    }
    if grid_sizes.is_empty() {
        return Err(Error::InvalidInput("no grid sizes".into()));
    }
    if !(extra_variance.is_finite() && extra_variance >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "extra_variance",
            value: extra_variance,
            reason: "must be nonnegative",
        });
    }
    for &n in grid_sizes {
        check_lattice(n, MIN_LATTICE)?;
    }
    let floor = params.zero_frequency_coefficient();
    let expected = floor + extra_variance;
    let shift_sd = extra_variance.sqrt();

    let rows = grid_sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let curve = matern_curve(params, n)?;
            let sampler = FieldSampler::new(&curve, "matern")?;
            let averages: Vec<f64> = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let stream = ((i as u64) << 40) | r;
                    let mut rng = replicate_rng(seed, stream);
                    let mut values = sampler.draw(&mut rng);
                    let shift: f64 = shift_sd * rng.sample::<f64, _>(StandardNormal);
                    for v in &mut values {
                        *v += shift;
                    }
                    let field = GridField {
                        values,
                        provenance: Provenance { model: "matern".into(), seed, replicate: stream },
                    };
                    circle_average(&field)
                })
                .collect();
            let count = averages.len() as f64;
            let mean = averages.iter().sum::<f64>() / count;
            let variance = averages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (count - 1.0);
            let standard_error = variance * (2.0 / (count - 1.0)).sqrt();
            let lattice_variance = curve.values().iter().sum::<f64>() / n as f64 + extra_variance;
            Ok(ErgodicityRow {
                n,
                mean,
                variance,
                standard_error,
                lattice_variance,
                z_score: (variance - expected) / standard_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ErgodicityReport {
        model: *params,
        replicates,
        seed,
        extra_variance,
        theoretical_floor: floor,
        expected_variance: expected,
        rows,
    })
}
