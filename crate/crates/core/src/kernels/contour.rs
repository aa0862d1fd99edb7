//! `K_h` at a single point as a contour integral over `Im k = c/h`:
//!
//! ```text
//! K_h^N(x0, x; y0, t) = (1/πi) ∫ e^{-hk²} r(k, y0, t) G_{k²}(x0, x) k dk
//! K_h^D(x0, x; y0, t) = (1/πi) ∫ e^{-hk²} ∂_y r(k, y0, t) G_{k²}(x0, x) k dk
//! ```

use num_complex::Complex;

use super::bessel::{light_cone_depth, r_pair_scaled};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_kronrod, AdaptiveOptions};
use crate::scalar::{cplx, Real};
use crate::spectral1d::{
    bound::bound_states_with, resolvent_solution, JostOptions, JostSolver, Potential,
};

#[derive(Debug, Clone, Copy)]
pub struct KernelParams<T> {
    pub h: T,
    pub y0: T,
    pub t: T,
    pub x0: T,
    pub x: T,
    /// Contour height parameter; the contour is `Im k = c/h`. Defaults to
    /// [`default_contour_height`].
    pub c: Option<T>,
    /// Relative truncation and quadrature tolerance.
    pub tol: T,
}

impl<T: Real> KernelParams<T> {
    pub fn new(h: T, y0: T, t: T, x0: T, x: T) -> Self {
        Self {
            h,
            y0,
            t,
            x0,
            x,
            c: None,
            tol: T::lit(1e-12),
        }
    }

    pub fn with_c(self, c: T) -> Self {
        Self { c: Some(c), ..self }
    }

    fn validate(&self) -> Result<T> {
        if !(self.h > T::zero()) || !(self.y0 > T::zero()) {
            return Err(Error::invalid(format!(
                "kernel needs h > 0 and y0 > 0 (h = {}, y0 = {})",
                self.h, self.y0
            )));
        }
        if !(self.tol > T::zero() && self.tol < T::one()) {
            return Err(Error::invalid(format!(
                "kernel tolerance must lie in (0, 1), got {}",
                self.tol
            )));
        }
        light_cone_depth(self.y0, self.t)
    }
}

/// `(K^D, K^N)`. For real potentials both are real: the integrand is odd
/// under `k ↦ -k̄` up to conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue<T> {
    pub dirichlet: Complex<T>,
    pub neumann: Complex<T>,
}

/// `c = max(|x - x0|/2, h (2 + κ_max))`: the saddle-point height away from
/// the diagonal, kept a unit above the discrete spectrum near it.
pub fn default_contour_height<T: Real>(h: T, dx: T, kappa_max: T) -> T {
    (dx.abs() / T::lit(2.0)).max(h * (T::lit(2.0) + kappa_max))
}

/// Upper end of the `|Re k|` range: the envelope `e^{-h k'² + k' y0}` has
/// dropped below `tol` (with a margin for algebraic factors) relative to
/// its peak at `y0 / 2h`.
pub fn truncation_point<T: Real>(h: T, y0: T, tol: T) -> T {
    let depth = -tol.ln() + T::lit(6.0);
    y0 / (T::lit(2.0) * h) + (depth / h).sqrt()
}

/// Evaluates kernels for one potential, caching its Jost mesh and the top
/// of its discrete spectrum.
#[derive(Debug, Clone)]
pub struct KernelEvaluator<T> {
    solver: JostSolver<T>,
    kappa_max: T,
    max_panels: usize,
}

impl<T: Real> KernelEvaluator<T> {
    pub fn new(q: &Potential<T>) -> Result<Self> {
        let solver = JostSolver::new(q, JostOptions::default())?;
        let kappa_max = bound_states_with(&solver)?
            .first()
            .map_or(T::zero(), |s| s.kappa);
        Ok(Self {
            solver,
            kappa_max,
            max_panels: 4000,
        })
    }

    pub fn with_max_panels(self, max_panels: usize) -> Self {
        Self { max_panels, ..self }
    }

    pub fn solver(&self) -> &JostSolver<T> {
        &self.solver
    }

    pub fn kappa_max(&self) -> T {
        self.kappa_max
    }

    pub fn contour_height(&self, h: T, dx: T) -> T {
        default_contour_height(h, dx, self.kappa_max)
    }

    /// `(K^D, K^N)` by adaptive Gauss–Kronrod quadrature over the whole
    /// horizontal contour.
    pub fn kernel(&self, p: &KernelParams<T>) -> Result<KernelValue<T>> {
        let z = p.validate()?;
        let c = p.c.unwrap_or_else(|| self.contour_height(p.h, p.x - p.x0));
        let sigma = c / p.h;
        if !(sigma > self.kappa_max) {
            return Err(Error::ContourTooLow {
                height: sigma.to_f64_lossy(),
                kappa: self.kappa_max.to_f64_lossy(),
            });
        }
        let kmax = truncation_point(p.h, p.y0, p.tol);
        let integrand = |kr: T| -> Result<Vec<T>> {
            let k = cplx(kr, sigma);
            let g = resolvent_solution(&self.solver, k)?.green(p.x0, p.x);
            let v = integrand_factor(k, p.h, z) * g * k;
            let (rs, drs) = r_pair_scaled(k, p.y0, z);
            let n = v * rs;
            let d = v * drs;
            Ok(vec![n.re, n.im, d.re, d.im])
        };
        // Start with panels about as wide as the slowest phase allows.
        let rate = (p.x - p.x0).abs() + T::lit(2.0) * c + T::one();
        let initial = ((T::lit(2.0) * kmax * rate / T::lit(6.0))
            .ceil()
            .to_usize()
            .unwrap_or(8))
        .clamp(8, 512);
        let opts = AdaptiveOptions {
            rel_tol: p.tol.max(T::lit(1e-13)),
            group: 2,
            abs_tol: Vec::new(),
            initial_panels: initial,
            max_panels: self.max_panels,
        };
        let r = adaptive_kronrod(-kmax, kmax, 4, integrand, &opts)?;
        let scale = cplx(T::zero(), -T::FRAC_1_PI());
        Ok(KernelValue {
            neumann: cplx(r.integral[0], r.integral[1]) * scale,
            dirichlet: cplx(r.integral[2], r.integral[3]) * scale,
        })
    }
}

/// `e^{-hk²} e^{|Re k| z}`, the damping times the growth removed from the
/// scaled Bessel functions, combined in one exponential.
#[inline]
pub(crate) fn integrand_factor<T: Real>(k: Complex<T>, h: T, z: T) -> Complex<T> {
    let e = -(k * k) * h;
    cplx(e.re + k.re.abs() * z, e.im).exp()
}

/// `(K^D, K^N)` at one point for potential `q`.
pub fn kernel_kh<T: Real>(q: &Potential<T>, params: &KernelParams<T>) -> Result<KernelValue<T>> {
    KernelEvaluator::new(q)?.kernel(params)
}
