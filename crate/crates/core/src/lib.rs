//! Circular Matérn Gaussian random fields and conditional autoregressive
//! (CAR) Markov random fields on the unit circle.
//!
//! * [`spectral`]: lags, circulant algebra, spectral coefficients.
//! * [`matern`]: circular Matérn covariance, series and closed forms.
//! * [`car`]: CAR(1)/CAR(2) precision matrices and covariances.
//! * [`linkage`]: parameter maps between the two model classes.
//! * [`fields`]: sampling, likelihood, fitting, kriging and the
//!   circle-average experiment.

pub mod car;
pub mod error;
pub mod fields;
mod hyperbolic;
pub mod linkage;
pub mod matern;
pub mod spectral;

pub use car::{CarOrder, CarSpec};
pub use error::{Error, Result};
pub use fields::GridField;
pub use matern::MaternParams;
pub use spectral::{CirculantMatrix, LagCovariance, SpectralCoefficients};
