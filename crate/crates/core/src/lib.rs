//! Blockwise-SVD estimation for linear inverse problems where both the
//! operator and the signal are observed with Gaussian noise.
//!
//! The operator is block diagonal in a known basis: Fourier modes on the
//! torus grouped by `1 + Σ|k_j|`, or spherical harmonics grouped by degree.
//! Given `K_δ = K + δ Ḃ` and `z = K f + n^{-1/2} η`, [`estimator::estimate`]
//! inverts each block up to a cut-off level and keeps it only when the
//! inverse is not too large and the data carry enough energy.
//!
//! ```
//! use blocksvd::{estimate, power_law_operator, power_law_signal, EstimatorConfig};
//!
//! let k = power_law_operator(1.0, 100).unwrap();
//! let f = power_law_signal(5.0, 100).unwrap().into_coeffs();
//! let z = k.apply(&f).unwrap();
//! let cfg = EstimatorConfig::new(0.0, f64::INFINITY, 1.0, 1.0).unwrap().with_override(Some(101)).unwrap();
//! let report = estimate(&z, &k, &cfg).unwrap();
//! assert!(blocksvd::squared_error(&report.f_hat, &f).unwrap() < 1e-20);
//! ```
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

// NaN-rejecting checks are written as `!(x > 0)`; index loops mirror the
// matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod estimator;
pub mod io;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod scalar;
pub mod sim;
pub mod sphere;
pub mod torus;

pub use error::{Error, Result};
pub use estimator::{
    cutoff_kappa, estimate, level_errors, max_level, squared_error, tail_energy, threshold_tau, EstimateReport,
    EstimatorConfig, LevelRecord,
};
pub use linalg::{DenseMatrix, Lu};
pub use model::{BlockCoefficients, BlockOperator, BlockStructure, IllPosedness, SmoothnessClass, StructureKind};
pub use scalar::Real;
pub use sphere::{
    gaussian_bump_coeffs, laplace_operator, GaussianBump, RotationZYZ, So3BlockOperator, SpherePoint, SphericalCoeffs,
};
pub use torus::{power_law_operator, power_law_signal, TorusCoeffs};

pub type Coeffs = BlockCoefficients<f64>;
pub type Operator = BlockOperator<f64>;
pub type Matrix = DenseMatrix<f64>;
pub type Config = EstimatorConfig<f64>;
pub type Report = EstimateReport<f64>;
pub type Sphere = SphericalCoeffs<f64>;
pub type Torus = TorusCoeffs<f64>;
