//! Fundamental solution of the per-mode Cauchy problem and the regularized
//! space-time kernels `K_h = (K_h^D, K_h^N)`.

pub mod bessel;
pub mod contour;
pub mod grid;

pub use bessel::{dr_dy, r_fun};
pub use contour::{default_contour_height, kernel_kh, KernelEvaluator, KernelParams, KernelValue};
pub use grid::KernelGrid;
