use num_complex::Complex;

use super::jost::{JostOptions, JostSolution, JostSolver, Side};
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::scalar::{cplx, grid_phase, phase, Real};

/// Generalized eigenfunctions `φ₁, φ₂` of the continuous spectrum at a real
/// wavenumber `k > 0`.
///
/// ```text
/// φ₁ = α₊(φ₁) e^{ikx} + e^{-ikx}/√(2π)   (x > A),   φ₁ = β₋(φ₁) e^{-ikx}          (x < -A)
/// φ₂ = α₊(φ₂) e^{ikx}                    (x > A),   φ₂ = e^{ikx}/√(2π) + β₋(φ₂) e^{-ikx} (x < -A)
/// ```
#[derive(Debug, Clone)]
pub struct ScatteringPair<T> {
    k: T,
    jost: JostSolution<T>,
    /// `√(2π) c₂`, the divisor turning `f₋` into `φ₁`.
    norm1: Complex<T>,
    /// `√(2π) d₁`, the divisor turning `f₊` into `φ₂`.
    norm2: Complex<T>,
    pub alpha1: Complex<T>,
    pub beta1: Complex<T>,
    pub alpha2: Complex<T>,
    pub beta2: Complex<T>,
}

impl<T: Real> ScatteringPair<T> {
    pub fn from_solver(solver: &JostSolver<T>, k: T) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::invalid(format!(
                "scattering basis needs real k > 0, got {k}"
            )));
        }
        let jost = solver.solve(cplx(k, T::zero()))?;
        let a = solver.support();
        // Exterior coefficients referenced to x = ±A, converted to the origin.
        let [d1, d2_tilde] = jost.plus_exterior();
        let [c2, c1_tilde] = jost.minus_exterior();
        let shift = cplx(T::zero(), -T::lit(2.0) * k * a).exp();
        let (c1, d2) = (c1_tilde * shift, d2_tilde * shift);
        let tiny = T::epsilon() * T::lit(16.0);
        if c2.norm() <= tiny || d1.norm() <= tiny {
            return Err(Error::InconsistentScattering {
                k: k.to_f64_lossy(),
            });
        }
        let root = T::TAU().sqrt();
        let norm1 = c2 * root;
        let norm2 = d1 * root;
        Ok(Self {
            k,
            jost,
            norm1,
            norm2,
            alpha1: c1 / norm1,
            beta1: Complex::new(T::one(), T::zero()) / norm1,
            alpha2: Complex::new(T::one(), T::zero()) / norm2,
            beta2: d2 / norm2,
        })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn phi1(&self, x: T) -> Complex<T> {
        phase(-self.k, x) * self.jost.m(Side::Minus, x) / self.norm1
    }

    pub fn phi2(&self, x: T) -> Complex<T> {
        phase(self.k, x) * self.jost.m(Side::Plus, x) / self.norm2
    }

    /// `(φ₁, φ₂)` at grid point `j`, with the oscillating factor evaluated at
    /// the exact abscissa `start + j step`.
    pub fn on_grid(&self, grid: &UniformGrid<T>, j: usize) -> (Complex<T>, Complex<T>) {
        let x = grid.point(j);
        let e = grid_phase(self.k, grid.start, grid.step, j);
        (
            e.conj() * self.jost.m(Side::Minus, x) / self.norm1,
            e * self.jost.m(Side::Plus, x) / self.norm2,
        )
    }

    /// `(φ₁, φ₁')` at `x`.
    pub fn phi1_with_derivative(&self, x: T) -> [Complex<T>; 2] {
        let e = phase(-self.k, x) / self.norm1;
        let [m, mt] = self.jost.minus_state(x);
        [e * m, e * mt]
    }

    /// `(φ₂, φ₂')` at `x`.
    pub fn phi2_with_derivative(&self, x: T) -> [Complex<T>; 2] {
        let e = phase(self.k, x) / self.norm2;
        let [m, mt] = self.jost.plus_state(x);
        [e * m, e * mt]
    }

    /// `|√(2π) α₊(φ₂)|² + |√(2π) β₋(φ₂)|²`, equal to one by flux conservation.
    pub fn flux(&self) -> T {
        let root = T::TAU().sqrt();
        (self.alpha2 * root).norm_sqr() + (self.beta2 * root).norm_sqr()
    }

    /// `φ₁ φ₂' - φ₁' φ₂` at `x`.
    pub fn wronskian_at(&self, x: T) -> Complex<T> {
        let [a, da] = self.phi1_with_derivative(x);
        let [b, db] = self.phi2_with_derivative(x);
        a * db - da * b
    }
}

/// Scattering pair at wavenumber `k` with default Jost options.
pub fn scattering_basis<T: Real>(q: &Potential<T>, k: T) -> Result<ScatteringPair<T>> {
    let solver = JostSolver::new(q, JostOptions::default())?;
    ScatteringPair::from_solver(&solver, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_space_exponentials() {
        let q = Potential::<f64>::zero();
        let s = scattering_basis(&q, 1.0).unwrap();
        let root = std::f64::consts::TAU.sqrt();
        for x in [-3.0f64, 0.0, 0.4, 7.0] {
            let e = Complex::new(x.cos(), x.sin()) / root;
            assert!((s.phi2(x) - e).norm() < 1e-15);
            assert!((s.phi1(x) - e.conj()).norm() < 1e-15);
        }
        assert!(s.alpha1.norm() < 1e-15 && s.beta2.norm() < 1e-15);
    }

    #[test]
    fn exterior_representation_holds() {
        let q = Potential::<f64>::gaussian(-2.0, 1.0, 4.0).unwrap();
        let s = scattering_basis(&q, 1.3).unwrap();
        let root = std::f64::consts::TAU.sqrt();
        let e = |p: f64| Complex::new(0.0, p).exp();
        for x in [4.5f64, 6.0] {
            let k = 1.3;
            let want1 = s.alpha1 * e(k * x) + e(-k * x) / root;
            let want2 = s.alpha2 * e(k * x);
            assert!((s.phi1(x) - want1).norm() < 1e-12);
            assert!((s.phi2(x) - want2).norm() < 1e-12);
            let want1m = s.beta1 * e(k * x);
            let want2m = e(-k * x) / root + s.beta2 * e(k * x);
            assert!((s.phi1(-x) - want1m).norm() < 1e-12);
            assert!((s.phi2(-x) - want2m).norm() < 1e-12);
        }
        assert!((s.flux() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reflectionless_well_has_unit_transmission() {
        let q = Potential::<f64>::poschl_teller(1.0, 12.0).unwrap();
        let s = scattering_basis(&q, 1.0).unwrap();
        let root = std::f64::consts::TAU.sqrt();
        // |t| = 1 and ρ = 0 for -2 sech² x.
        assert!(((s.alpha2 * root).norm() - 1.0).abs() < 1e-8);
        assert!((s.beta2 * root).norm() < 1e-8);
    }

    #[test]
    fn wronskian_is_constant() {
        let q = Potential::<f64>::gaussian(-3.0, 0.6, 3.0)
            .unwrap()
            .with_term(super::super::Term::Gaussian {
                amplitude: 1.0,
                center: 1.0,
                width: 0.3,
            })
            .unwrap();
        let s = scattering_basis(&q, 1.0).unwrap();
        let w0 = s.wronskian_at(-5.0);
        for x in [-2.9f64, -1.234, 0.0, 0.5, 1.001, 2.7, 5.0] {
            let w = s.wronskian_at(x);
            assert!((w - w0).norm() <= 1e-10 * w0.norm(), "x={x}: {w} vs {w0}");
        }
    }

    #[test]
    fn rejects_nonpositive_k() {
        let q = Potential::<f64>::zero();
        assert!(scattering_basis(&q, 0.0).is_err());
        assert!(scattering_basis(&q, -1.0).is_err());
    }
}
