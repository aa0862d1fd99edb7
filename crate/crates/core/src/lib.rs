//! Continuation of wave fields from Cauchy data on the boundary of a
//! half-plane, for `∂²_t u - Δu + q(x) u = 0` with a laterally varying,
//! compactly supported potential `q`.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral1d`]: the line operator `-∂²_x + q`, its Jost solutions,
//!   scattering basis, bound states, eigenfunction transforms and Green's
//!   function.
//! * [`kernels`]: the fundamental solution `r(k, y, t)` of the per-mode
//!   Cauchy problem and the regularized space-time kernels `K_h`.
//! * [`reconstruct`]: the spectral and localized reconstruction pipelines and
//!   the choice of the regularization level.
//! * [`simulate`]: a finite-difference forward solver producing synthetic
//!   Cauchy data and ground truth.
//!
//! Numerical code is generic over [`Real`]; the aliases below fix `f64`,
//! which is what the inverse pipelines need in practice.

// `!(x > 0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod grid;
pub mod interp;
pub mod io;
pub mod kernels;
pub mod quadrature;
pub mod reconstruct;
pub mod scalar;
pub mod simulate;
pub mod spectral1d;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Real;

pub type Potential = spectral1d::Potential<f64>;
pub type SpectralBasis = spectral1d::SpectralBasis<f64>;
pub type KernelEvaluator = kernels::KernelEvaluator<f64>;
pub type CauchyData = reconstruct::CauchyData<f64>;
pub type TargetPoint = reconstruct::TargetPoint<f64>;
pub type ReconstructionResult = reconstruct::ReconstructionResult<f64>;
pub type SimConfig = simulate::SimConfig<f64>;
pub type WaveField = simulate::WaveField<f64>;
