//! The Schrödinger operator `L = -∂²_x + q(x)` on the line.

pub mod bound;
pub mod green;
pub mod jost;
pub mod potential;
pub mod scattering;
pub mod transform;

pub use bound::{bound_states_with, find_bound_states, BoundState};
pub use green::{green_function, resolvent_solution};
pub use jost::{jost_m, JostOptions, JostSolution, JostSolver, Side};
pub use potential::{Potential, Term};
pub use scattering::{scattering_basis, ScatteringPair};
pub use transform::{
    forward_transform, inverse_transform, ModeSampler, SpectralBasis, SpectralCoefficients,
};
