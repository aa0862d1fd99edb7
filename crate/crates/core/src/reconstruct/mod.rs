//! Reconstruction of `u(x0, y0, t0)` from Cauchy data on `y = 0`.
//!
//! Two pipelines evaluate the regularized field for a schedule of
//! regularization levels `h`:
//!
//! * [`spectral_reconstruct`]: transform the data in `x`, solve every
//!   per-mode problem in `y`, damp by `e^{-hk²}` and transform back;
//! * [`localized_reconstruct`]: integrate the data against the space-time
//!   kernels `K_h` over the light disk around the target.
//!
//! [`extrapolate_h`] then picks a level by the quasi-optimality rule.

mod data;
mod localized;
mod mode;
mod schedule;
mod spectral;

pub use data::{CauchyData, HSchedule, Pipeline, ReconstructionResult, TargetPoint};
pub use localized::{default_epsilon, localized_reconstruct, LocalizedPlan};
pub use mode::{mode_solution, TimeRule};
pub use schedule::extrapolate_h;
pub use spectral::{spectral_kmax, spectral_reconstruct, SpectralPlan};
