//! Generalized eigenfunction transform `ψ ↦ (ψ̂₀, ψ̂₁, ψ̂₂)` and its inverse.
//!
//! The continuous part uses composite Gauss–Legendre panels on `(0, k_max]`,
//! so `k = 0` is never a node. Integrals in `x` use the trapezoid rule on
//! the working grid, which is spectrally accurate for smooth functions that
//! vanish at the grid edges.

use num_complex::Complex;
use rayon::prelude::*;

use super::bound::{bound_states_with, BoundState};
use super::jost::{JostOptions, JostSolver};
use super::potential::Potential;
use super::scattering::ScatteringPair;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quadrature::{composite_gauss_legendre, trapezoid_weights};
use crate::scalar::Real;

/// Gauss–Legendre order of each `k` panel.
const PANEL_ORDER: usize = 8;

/// Halvings of the first `k` panel.
const GRADED_PANELS: usize = 12;

/// Nodes and weights of the `k` quadrature on `(0, k_max]`.
///
/// Panels are `π / (x_extent + A)` wide: the fastest phase in `k` of a
/// product `φ(x, k) φ(x', k)*` over the working grid, including waves
/// reflected anywhere in the support of `q`, then advances by at most `2π`
/// per panel.
pub fn k_nodes<T: Real>(kmax: T, x_extent: T, support: T) -> Result<(Vec<T>, Vec<T>)> {
    if !(kmax > T::zero()) || !kmax.is_finite() {
        return Err(Error::invalid(format!(
            "k_max must be positive, got {kmax}"
        )));
    }
    let width = T::PI() / (x_extent + support).max(T::lit(1e-3));
    let panels = (kmax / width).ceil().to_usize().unwrap_or(1).max(1);
    let (mut nodes, mut weights) = composite_gauss_legendre(T::zero(), kmax, panels, PANEL_ORDER);
    // Near a zero-energy resonance the scattering data vary on the scale of
    // the resonance's κ, so the first panel is split geometrically toward 0.
    let first = kmax / T::of(panels);
    let mut graded = (Vec::new(), Vec::new());
    let mut hi = first;
    for _ in 0..GRADED_PANELS {
        let lo = hi / T::lit(2.0);
        let (n, w) = composite_gauss_legendre(lo, hi, 1, PANEL_ORDER);
        graded.0.splice(0..0, n);
        graded.1.splice(0..0, w);
        hi = lo;
    }
    let (n, w) = composite_gauss_legendre(T::zero(), hi, 1, PANEL_ORDER);
    graded.0.splice(0..0, n);
    graded.1.splice(0..0, w);
    nodes.splice(0..PANEL_ORDER, graded.0);
    weights.splice(0..PANEL_ORDER, graded.1);
    Ok((nodes, weights))
}

/// Samples `φ₁(x, k)`, `φ₂(x, k)` at fixed points for any `k`: the points
/// of an optional uniform grid followed by a list of extra points.
#[derive(Debug, Clone)]
pub struct ModeSampler<T> {
    solver: JostSolver<T>,
    grid: Option<UniformGrid<T>>,
    points: Vec<T>,
}

impl<T: Real> ModeSampler<T> {
    pub fn new(solver: JostSolver<T>, points: Vec<T>) -> Self {
        Self {
            solver,
            grid: None,
            points,
        }
    }

    pub fn on_grid(solver: JostSolver<T>, grid: UniformGrid<T>, extra: Vec<T>) -> Self {
        Self {
            solver,
            grid: Some(grid),
            points: extra,
        }
    }

    pub fn solver(&self) -> &JostSolver<T> {
        &self.solver
    }

    /// `(φ₁(xᵢ, k), φ₂(xᵢ, k))` at every point.
    pub fn sample(&self, k: T) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        let pair = ScatteringPair::from_solver(&self.solver, k)?;
        let n = self.grid.map_or(0, |g| g.len) + self.points.len();
        let (mut phi1, mut phi2) = (Vec::with_capacity(n), Vec::with_capacity(n));
        if let Some(grid) = &self.grid {
            for j in 0..grid.len {
                let (a, b) = pair.on_grid(grid, j);
                phi1.push(a);
                phi2.push(b);
            }
        }
        for &x in &self.points {
            phi1.push(pair.phi1(x));
            phi2.push(pair.phi2(x));
        }
        Ok((phi1, phi2))
    }
}

/// Scattering basis and bound states sampled on a working grid (and on
/// optional extra probe points where inverse transforms are evaluated).
#[derive(Debug, Clone)]
pub struct SpectralBasis<T> {
    grid: UniformGrid<T>,
    probes: Vec<T>,
    k: Vec<T>,
    k_weights: Vec<T>,
    x_weights: Vec<T>,
    /// `φ_j` at grid points then probes, row-major by `k` node.
    phi1: Vec<Complex<T>>,
    phi2: Vec<Complex<T>>,
    bound: Vec<BoundState<T>>,
    bound_samples: Vec<Vec<T>>,
}

/// Spectral representation `(ψ̂₀(iκ_l), ψ̂₁(k), ψ̂₂(k))` on a basis' nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients<T> {
    pub discrete: Vec<Complex<T>>,
    pub continuous1: Vec<Complex<T>>,
    pub continuous2: Vec<Complex<T>>,
}

impl<T: Real> SpectralCoefficients<T> {
    pub fn zeros(basis: &SpectralBasis<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self {
            discrete: vec![z; basis.bound.len()],
            continuous1: vec![z; basis.k.len()],
            continuous2: vec![z; basis.k.len()],
        }
    }

    /// Squared norm in `𝓗₀ ⊕ 𝓗₁ ⊕ 𝓗₂`.
    pub fn norm_sqr(&self, basis: &SpectralBasis<T>) -> T {
        let d = self
            .discrete
            .iter()
            .fold(T::zero(), |s, c| s + c.norm_sqr());
        let c = basis
            .k_weights
            .iter()
            .enumerate()
            .fold(T::zero(), |s, (i, w)| {
                s + *w * (self.continuous1[i].norm_sqr() + self.continuous2[i].norm_sqr())
            });
        d + c
    }

    /// Multiplies each component by `Φ(λ)` at its eigenvalue (`k²` or `-κ²`).
    pub fn apply(&mut self, basis: &SpectralBasis<T>, phi: impl Fn(T) -> T) {
        for (c, s) in self.discrete.iter_mut().zip(&basis.bound) {
            *c *= phi(s.eigenvalue());
        }
        for (i, k) in basis.k.iter().enumerate() {
            let f = phi(*k * *k);
            self.continuous1[i] *= f;
            self.continuous2[i] *= f;
        }
    }
}

impl<T: Real> SpectralBasis<T> {
    /// Builds the basis for `q` on `grid` with continuous spectrum truncated
    /// at `kmax`. `kmax` above the grid's Nyquist limit `π/dx` is reduced to
    /// it, with a warning.
    pub fn new(q: &Potential<T>, grid: UniformGrid<T>, kmax: T, probes: &[T]) -> Result<Self> {
        let solver = JostSolver::new(q, JostOptions::default())?;
        Self::with_solver(&solver, grid, kmax, probes)
    }

    pub fn with_solver(
        solver: &JostSolver<T>,
        grid: UniformGrid<T>,
        kmax: T,
        probes: &[T],
    ) -> Result<Self> {
        let kmax = nyquist_cap(kmax, grid.step);
        let x_extent = grid.start.abs().max(grid.end().abs());
        let (k, k_weights) = k_nodes(kmax, x_extent, solver.support())?;
        let mut points = grid.points();
        points.extend_from_slice(probes);
        let sampler = ModeSampler::on_grid(solver.clone(), grid, probes.to_vec());
        let rows = k
            .par_iter()
            .map(|&k| sampler.sample(k))
            .collect::<Result<Vec<_>>>()?;
        let np = points.len();
        let mut phi1 = Vec::with_capacity(rows.len() * np);
        let mut phi2 = Vec::with_capacity(rows.len() * np);
        for (a, b) in rows {
            phi1.extend(a);
            phi2.extend(b);
        }
        let bound = bound_states_with(solver)?;
        let bound_samples = bound.iter().map(|s| s.sample(&points)).collect();
        Ok(Self {
            x_weights: trapezoid_weights(grid.len, grid.step),
            grid,
            probes: probes.to_vec(),
            k,
            k_weights,
            phi1,
            phi2,
            bound,
            bound_samples,
        })
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    pub fn k_nodes(&self) -> &[T] {
        &self.k
    }

    pub fn k_weights(&self) -> &[T] {
        &self.k_weights
    }

    pub fn bound_states(&self) -> &[BoundState<T>] {
        &self.bound
    }

    pub fn probes(&self) -> &[T] {
        &self.probes
    }

    fn stride(&self) -> usize {
        self.grid.len + self.probes.len()
    }

    /// `φ_j(x, k_i)` at grid point or probe `p` (probes follow grid points).
    pub fn phi(&self, j: usize, i: usize, p: usize) -> Complex<T> {
        let idx = i * self.stride() + p;
        if j == 1 {
            self.phi1[idx]
        } else {
            self.phi2[idx]
        }
    }

    /// Replaces every bound state by its negative (the sign is a free choice).
    pub fn with_negated_bound_states(&self) -> Self {
        let mut b = self.clone();
        b.bound = b.bound.iter().map(BoundState::negated).collect();
        for s in &mut b.bound_samples {
            for v in s.iter_mut() {
                *v = -*v;
            }
        }
        b
    }
}

pub(crate) fn nyquist_cap<T: Real>(kmax: T, dx: T) -> T {
    let nyquist = T::PI() / dx;
    if kmax > nyquist {
        log::warn!("k_max = {kmax:.4} exceeds the grid Nyquist limit {nyquist:.4}; truncating to avoid aliasing");
        nyquist
    } else {
        kmax
    }
}

/// Rejects samples that do not vanish at the grid edges.
pub(crate) fn check_support<T: Real>(psi: &[T]) -> Result<()> {
    let max = psi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let edge = psi[0].abs().max(psi[psi.len() - 1].abs());
    if edge > T::lit(1e-8) * max {
        return Err(Error::Truncation {
            edge: edge.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `ψ̂_j(k) = ∫ ψ φ_j(x, k)* dx`, `ψ̂₀ = ∫ ψ φ₀ dx`.
pub fn forward_transform<T: Real>(
    psi: &[T],
    basis: &SpectralBasis<T>,
) -> Result<SpectralCoefficients<T>> {
    let n = basis.grid.len;
    if psi.len() != n {
        return Err(Error::invalid(format!(
            "function has {} samples, grid has {n}",
            psi.len()
        )));
    }
    check_support(psi)?;
    let weighted: Vec<T> = psi
        .iter()
        .zip(&basis.x_weights)
        .map(|(p, w)| *p * *w)
        .collect();
    let stride = basis.stride();
    let project = |row: &[Complex<T>]| {
        row[..n]
            .iter()
            .zip(&weighted)
            .fold(Complex::new(T::zero(), T::zero()), |s, (f, w)| {
                s + f.conj() * *w
            })
    };
    let continuous1 = basis.phi1.chunks(stride).map(project).collect();
    let continuous2 = basis.phi2.chunks(stride).map(project).collect();
    let discrete = basis
        .bound_samples
        .iter()
        .map(|s| {
            Complex::new(
                s[..n]
                    .iter()
                    .zip(&weighted)
                    .fold(T::zero(), |a, (f, w)| a + *f * *w),
                T::zero(),
            )
        })
        .collect();
    Ok(SpectralCoefficients {
        discrete,
        continuous1,
        continuous2,
    })
}

/// `ψ(x) = Σ_j ∫ ψ̂_j(k) φ_j(x, k) dk + Σ_l ψ̂₀(iκ_l) φ₀(x, iκ_l)` at every
/// grid point followed by every probe.
pub fn inverse_transform<T: Real>(
    coeffs: &SpectralCoefficients<T>,
    basis: &SpectralBasis<T>,
) -> Vec<Complex<T>> {
    let stride = basis.stride();
    let mut out = vec![Complex::new(T::zero(), T::zero()); stride];
    for (i, w) in basis.k_weights.iter().enumerate() {
        let a = coeffs.continuous1[i] * *w;
        let b = coeffs.continuous2[i] * *w;
        let r1 = &basis.phi1[i * stride..(i + 1) * stride];
        let r2 = &basis.phi2[i * stride..(i + 1) * stride];
        for p in 0..stride {
            out[p] += a * r1[p] + b * r2[p];
        }
    }
    for (c, s) in coeffs.discrete.iter().zip(&basis.bound_samples) {
        for p in 0..stride {
            out[p] += *c * s[p];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_on(grid: &UniformGrid<f64>) -> Vec<f64> {
        grid.points().iter().map(|x| (-x * x / 2.0).exp()).collect()
    }

    #[test]
    fn free_gaussian_transform_pair() {
        let grid = UniformGrid::new(-12.0, 0.05, 481).unwrap();
        let basis = SpectralBasis::new(&Potential::zero(), grid, 10.0, &[]).unwrap();
        let c = forward_transform(&gaussian_on(&grid), &basis).unwrap();
        for (i, k) in basis.k_nodes().iter().enumerate() {
            let want = (-k * k / 2.0).exp();
            assert!((c.continuous1[i] - want).norm() < 1e-12);
            assert!((c.continuous2[i] - want).norm() < 1e-12);
        }
        assert!((c.norm_sqr(&basis) - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn round_trip_free() {
        let grid = UniformGrid::new(-12.0, 0.05, 481).unwrap();
        let basis = SpectralBasis::new(&Potential::zero(), grid, 12.0, &[0.123]).unwrap();
        let psi = gaussian_on(&grid);
        let back = inverse_transform(&forward_transform(&psi, &basis).unwrap(), &basis);
        let err: f64 = psi
            .iter()
            .zip(&back)
            .map(|(a, b)| (b - a).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let norm: f64 = psi.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(err / norm < 1e-10, "relative error {}", err / norm);
        assert!((back[481].re - (-0.123f64 * 0.123 / 2.0).exp()).abs() < 1e-10);
    }

    #[test]
    fn zero_in_zero_out() {
        let grid = UniformGrid::new(-5.0, 0.1, 101).unwrap();
        let q = Potential::poschl_teller(1.0, 5.0).unwrap();
        let basis = SpectralBasis::new(&q, grid, 5.0, &[]).unwrap();
        let c = forward_transform(&vec![0.0; 101], &basis).unwrap();
        assert_eq!(c, SpectralCoefficients::zeros(&basis));
        assert!(inverse_transform(&c, &basis)
            .iter()
            .all(|v| v.norm() == 0.0));
    }

    #[test]
    fn bound_state_is_orthogonal_to_continuum() {
        let grid = UniformGrid::new(-24.0, 0.05, 961).unwrap();
        let q = Potential::<f64>::poschl_teller(1.0, 12.0).unwrap();
        let basis = SpectralBasis::new(&q, grid, 8.0, &[]).unwrap();
        let phi0 = basis.bound_states()[0].sample(&grid.points());
        let c = forward_transform(&phi0, &basis).unwrap();
        assert!((c.discrete[0].re - 1.0).abs() < 1e-6);
        let cont = c
            .continuous1
            .iter()
            .chain(&c.continuous2)
            .fold(0.0f64, |m, v| m.max(v.norm()));
        assert!(cont < 1e-6, "continuous leakage {cont}");
    }

    #[test]
    fn rejects_truncated_function() {
        let grid = UniformGrid::new(-1.0, 0.1, 21).unwrap();
        let basis = SpectralBasis::new(&Potential::zero(), grid, 3.0, &[]).unwrap();
        assert!(matches!(
            forward_transform(&gaussian_on(&grid), &basis),
            Err(Error::Truncation { .. })
        ));
    }
}
