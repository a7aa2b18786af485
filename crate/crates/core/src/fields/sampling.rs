use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{GridField, Provenance};
use crate::error::Result;
use crate::spectral::LagCovariance;

/// Generator for replicate `replicate` under `seed`: ChaCha8 keyed by the
/// seed, one stream per replicate index.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Spectral synthesis for a fixed covariance curve.
///
/// A draw is the real part of `F (sqrt(lambda / n) * (z1 + i z2))` with
/// independent standard normals `z1`, `z2` per frequency, where `lambda` are
/// the curve's DFT eigenvalues.
#[derive(Clone)]
pub struct FieldSampler {
    amplitudes: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    model: String,
}

impl std::fmt::Debug for FieldSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSampler")
            .field("n", &self.amplitudes.len())
            .field("model", &self.model)
            .finish()
    }
}

impl FieldSampler {
    pub fn new(curve: &LagCovariance, model: impl Into<String>) -> Result<Self> {
        let eigenvalues = curve.check_psd()?;
        let n = curve.n();
        let amplitudes = eigenvalues.iter().map(|&v| (v.max(0.0) / n as f64).sqrt()).collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        Ok(Self { amplitudes, fft, model: model.into() })
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    /// Draws lattice values using `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buffer: Vec<Complex64> = self
            .amplitudes
            .iter()
            .map(|&amp| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(amp * re, amp * im)
            })
            .collect();
        self.fft.process(&mut buffer);
        buffer.into_iter().map(|z| z.re).collect()
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> GridField {
        let values = self.draw(&mut replicate_rng(seed, replicate));
        GridField {
            values,
            provenance: Provenance { model: self.model.clone(), seed, replicate },
        }
    }

    /// Replicates `0..count`, generated in parallel.
    pub fn sample_many(&self, seed: u64, count: u64) -> Vec<GridField> {
        (0..count).into_par_iter().map(|r| self.sample(seed, r)).collect()
    }
}

/// One zero-mean Gaussian draw with covariance `circulant(curve)`.
pub fn sample_field(curve: &LagCovariance, seed: u64) -> Result<GridField> {
    Ok(FieldSampler::new(curve, "custom")?.sample(seed, 0))
}

pub fn sample_fields(curve: &LagCovariance, seed: u64, count: u64) -> Result<Vec<GridField>> {
    Ok(FieldSampler::new(curve, "custom")?.sample_many(seed, count))
}
