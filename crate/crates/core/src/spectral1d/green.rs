use num_complex::Complex;

use super::jost::{JostOptions, JostSolution, JostSolver};
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest accepted `|W| / (2|k|)`; the free value is one.
const WRONSKIAN_FLOOR: f64 = 1e-10;

/// Jost solution pair accepted for resolvent evaluation at `k`.
pub fn resolvent_solution<T: Real>(
    solver: &JostSolver<T>,
    k: Complex<T>,
) -> Result<JostSolution<T>> {
    if !(k.im > T::zero()) {
        return Err(Error::invalid(format!(
            "Green's function needs Im k > 0, got k = {k}"
        )));
    }
    let sol = solver.solve(k)?;
    let w = sol.wronskian().norm();
    if w < T::lit(WRONSKIAN_FLOOR) * T::lit(2.0) * k.norm() {
        return Err(Error::NearSpectrum {
            w: w.to_f64_lossy(),
        });
    }
    Ok(sol)
}

/// `G_{k²}(x0, x)`, the kernel of `(-∂²_x + q - k²)^{-1}`.
pub fn green_function<T: Real>(q: &Potential<T>, k: Complex<T>, x0: T, x: T) -> Result<Complex<T>> {
    let solver = JostSolver::new(q, JostOptions::default())?;
    Ok(resolvent_solution(&solver, k)?.green(x0, x))
}
