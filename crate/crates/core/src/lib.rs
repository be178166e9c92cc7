//! Computations for the matrix-valued Anderson-Bernoulli operator
//! `-d²/dx² ⊗ I_N + V + Σ_n diag(c_i ω_i^(n)) 1_[0,ℓ](x - ℓn)` on `L²(ℝ) ⊗ ℝ^N`.
//!
//! - [`model`]: parameters, cell matrices, transfer matrices, the energy interval.
//! - [`furstenberg`]: Lie-bracket closure, density certificates, critical energies.
//! - [`lyapunov`]: QR estimation of the Lyapunov spectrum and exterior-power oracles.
//! - [`spectrum`]: finite-volume restrictions, eigenvalue counting, IDS, decay fits.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar for callers that do not need the generality.

pub mod error;
pub mod furstenberg;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod scalar;
pub mod seed;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

pub type MatrixF64 = linalg::Matrix<f64>;
pub type MatrixF32 = linalg::Matrix<f32>;
pub type SymmetricMatrixF64 = linalg::SymmetricMatrix<f64>;
pub type SymmetricMatrixF32 = linalg::SymmetricMatrix<f32>;
pub type SymplecticMatrixF64 = linalg::SymplecticMatrix<f64>;
pub type SymplecticMatrixF32 = linalg::SymplecticMatrix<f32>;
pub type SpElementF64 = linalg::SpElement<f64>;
pub type SpElementF32 = linalg::SpElement<f32>;
pub type ModelParamsF64 = model::ModelParams<f64>;
pub type ModelParamsF32 = model::ModelParams<f32>;
pub type DisorderSpecF64 = model::DisorderSpec<f64>;
pub type DisorderSpecF32 = model::DisorderSpec<f32>;
pub type LyapunovSpectrumF64 = lyapunov::LyapunovSpectrum<f64>;
pub type LyapunovSpectrumF32 = lyapunov::LyapunovSpectrum<f32>;
pub type IdsCurveF64 = spectrum::IdsCurve<f64>;
pub type IdsCurveF32 = spectrum::IdsCurve<f32>;
