//! The fundamental solution `r(k, y, t) = ½ I₀(k √(y² - t²))` of the
//! per-mode Cauchy problem and its depth derivative
//! `∂_y r = (k² y / 2) · I₁(w) / w`, `w = k √(y² - t²)`.
//!
//! [`r_fun`] and [`dr_dy`] evaluate the integral representations directly.
//! The hot loops use [`i0_scaled`] and [`i1_over_w_scaled`], which return
//! the Bessel functions multiplied by `e^{-|Re w|}` so that callers can fold
//! the exponential growth into their own damping factors.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn light_cone_depth<T: Real>(y: T, t: T) -> Result<T> {
    let slack = T::lit(1e-12) * y.abs().max(T::one());
    if !(y >= T::zero()) || t.abs() > y + slack {
        return Err(Error::OutsideLightCone {
            y: y.to_f64_lossy(),
            t: t.to_f64_lossy(),
        });
    }
    Ok((y * y - t * t).max(T::zero()).sqrt())
}

/// Nodes of the periodic trapezoid rule that resolves `e^{w sin s}`.
fn periodic_nodes<T: Real>(w: Complex<T>) -> usize {
    let n = (T::lit(1.2) * w.norm()).to_usize().unwrap_or(0) + 40;
    n + n % 2
}

/// `sinh(u)/u`, by series near the origin.
fn sinhc<T: Real>(u: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    if u.norm() < T::lit(1e-2) {
        let u2 = u * u;
        one + u2 / T::lit(6.0) * (one + u2 / T::lit(20.0))
    } else {
        u.sinh() / u
    }
}

/// `r(k, y, t) = (1/2π) ∫_{-π/2}^{π/2} cosh(k √(y² - t²) sin s) ds`.
pub fn r_fun<T: Real>(k: Complex<T>, y: T, t: T) -> Result<Complex<T>> {
    let z = light_cone_depth(y, t)?;
    let w = k * z;
    // The integrand is π-periodic and even, so the integral over half a
    // period is half the mean over a full period.
    let n = periodic_nodes(w);
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        let s = T::TAU() * T::of(j) / T::of(n);
        acc += (w * s.sin()).cosh();
    }
    Ok(acc / (T::lit(2.0) * T::of(n)))
}

/// `∂_y r = (k² y / 2π) ∫_{-π/2}^{π/2} sin² s · sinh(w sin s)/(w sin s) ds`,
/// regular at the light cone `|t| = y`.
pub fn dr_dy<T: Real>(k: Complex<T>, y: T, t: T) -> Result<Complex<T>> {
    if !(y > T::zero()) {
        return Err(Error::invalid(format!("depth must be positive, got {y}")));
    }
    let z = light_cone_depth(y, t)?;
    let w = k * z;
    let n = periodic_nodes(w);
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        let s = T::TAU() * T::of(j) / T::of(n);
        let sn = s.sin();
        acc += sinhc(w * sn) * (sn * sn);
    }
    Ok(k * k * y * acc / (T::lit(2.0) * T::of(n)))
}

const SERIES_RADIUS: f64 = 10.0;
const ASYMPTOTIC_RADIUS: f64 = 30.0;
const TRAPEZOID_NODES: usize = 72;

/// `e^{-|Re w|} I₀(w)`.
pub fn i0_scaled<T: Real>(w: Complex<T>) -> Complex<T> {
    let w = if w.re < T::zero() { -w } else { w };
    let r = w.norm();
    if r <= T::lit(SERIES_RADIUS) {
        series(w, 0) * (-w.re).exp()
    } else if r <= T::lit(ASYMPTOTIC_RADIUS) {
        trapezoid(w, 0)
    } else {
        asymptotic(w, 0)
    }
}

/// `e^{-|Re w|} I₁(w) / w`, equal to `e^{-|Re w|}/2` at `w = 0`.
pub fn i1_over_w_scaled<T: Real>(w: Complex<T>) -> Complex<T> {
    let w = if w.re < T::zero() { -w } else { w };
    let r = w.norm();
    if r <= T::lit(SERIES_RADIUS) {
        series(w, 1) * (-w.re).exp()
    } else if r <= T::lit(ASYMPTOTIC_RADIUS) {
        trapezoid(w, 1) / w
    } else {
        asymptotic(w, 1) / w
    }
}

/// `Σ (w²/4)^m / (m! (m+ν)!)`, scaled by `1/2` for `ν = 1` (that is, `I₀`
/// or `I₁(w)/w`).
fn series<T: Real>(w: Complex<T>, nu: usize) -> Complex<T> {
    let x = w * w / T::lit(4.0);
    let mut term = Complex::new(if nu == 0 { T::one() } else { T::lit(0.5) }, T::zero());
    let mut sum = term;
    for m in 1..200 {
        term = term * x / (T::of(m) * T::of(m + nu));
        sum += term;
        if term.norm() <= T::epsilon() * T::lit(0.1) * sum.norm() {
            break;
        }
    }
    sum
}

/// `e^{-Re w} I_ν(w) = e^{-Re w} (1/N) Σ e^{w cos θ_j} cos(ν θ_j)`.
fn trapezoid<T: Real>(w: Complex<T>, nu: usize) -> Complex<T> {
    let n = TRAPEZOID_NODES;
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        let th = T::TAU() * T::of(j) / T::of(n);
        let c = th.cos();
        let e = (w * c - w.re).exp();
        acc += if nu == 0 { e } else { e * c };
    }
    acc / T::of(n)
}

/// Large-argument expansion with both exponentials, for `Re w >= 0`.
fn asymptotic<T: Real>(w: Complex<T>, nu: usize) -> Complex<T> {
    let mu = T::of(4 * nu * nu);
    let inv = Complex::new(T::one(), T::zero()) / w;
    let mut a = Complex::new(T::one(), T::zero());
    let mut dominant = a;
    let mut recessive = a;
    let mut last = T::infinity();
    for k in 1..60 {
        let odd = T::of(2 * k - 1);
        a = a * inv * ((mu - odd * odd) / (T::of(k) * T::lit(8.0)));
        let size = a.norm();
        if size > last {
            break;
        }
        last = size;
        let sign = if k % 2 == 1 { -T::one() } else { T::one() };
        dominant += a * sign;
        recessive += a;
        if size <= T::epsilon() * T::lit(0.1) {
            break;
        }
    }
    let pre = (w * T::TAU()).sqrt();
    let phase = Complex::new(T::zero(), w.im).exp();
    // ± i e^{±iνπ} e^{-w}, with the upper sign for arg w >= 0.
    let upper = w.im >= T::zero();
    let rot = Complex::new(T::zero(), if upper { T::one() } else { -T::one() })
        * if nu.is_multiple_of(2) { T::one() } else { -T::one() };
    let second = Complex::new(T::zero(), -w.im).exp() * (-T::lit(2.0) * w.re).exp() * rot;
    (phase * dominant + second * recessive) / pre
}

/// `e^{-|Re(k z)|} r(k, ·)` and `e^{-|Re(k z)|} ∂_y r` for `z = √(y² - t²)`.
#[inline]
pub fn r_pair_scaled<T: Real>(k: Complex<T>, y: T, z: T) -> (Complex<T>, Complex<T>) {
    let w = k * z;
    let half = T::lit(0.5);
    (
        i0_scaled(w) * half,
        i1_over_w_scaled(w) * (k * k * y * half),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn value_at_light_cone_and_zero_k() {
        for k in [c(0.0, 0.0), c(3.0, -2.0), c(10.0, 40.0)] {
            assert!((r_fun(k, 1.3, 1.3).unwrap() - 0.5).norm() < 1e-15);
            assert!((r_fun(k, 1.3, -1.3).unwrap() - 0.5).norm() < 1e-15);
        }
        assert!((r_fun(c(0.0, 0.0), 2.0, 0.7).unwrap() - 0.5).norm() < 1e-15);
        assert!(dr_dy(c(0.0, 0.0), 2.0, 0.7).unwrap().norm() < 1e-15);
    }

    #[test]
    fn half_i0_of_two() {
        // Power series of I₀(2) = Σ 1/(m!)².
        let mut s = 0.0;
        let mut f = 1.0;
        for m in 0..30 {
            if m > 0 {
                f *= m as f64;
            }
            s += 1.0 / (f * f);
        }
        let r = r_fun(c(2.0, 0.0), 1.0, 0.0).unwrap();
        assert!((r.re - s / 2.0).abs() < 1e-14);
        assert!((r.re - 1.1397927).abs() < 1e-7);
    }

    #[test]
    fn derivative_limits_and_finite_difference() {
        let k = c(2.0, 0.0);
        let edge = dr_dy(k, 1.0, 1.0).unwrap();
        assert!((edge.re - 1.0).abs() < 1e-14);
        let h = 1e-4;
        let fd = (r_fun(k, 1.0 + h, 0.0).unwrap() - r_fun(k, 1.0 - h, 0.0).unwrap()) / (2.0 * h);
        assert!((dr_dy(k, 1.0, 0.0).unwrap() - fd).norm() < 1e-8);
    }

    #[test]
    fn rejects_points_outside_the_cone() {
        assert!(matches!(
            r_fun(c(1.0, 0.0), 1.0, 1.5),
            Err(Error::OutsideLightCone { .. })
        ));
        assert!(dr_dy(c(1.0, 0.0), 1.0, -1.01).is_err());
    }

    proptest! {
        #[test]
        fn fast_route_matches_quadrature(re in -120.0f64..120.0, im in -120.0f64..120.0) {
            let w = c(re, im);
            let scale = (-re.abs()).exp();
            let i0 = r_fun(w, 1.0, 0.0).unwrap() * 2.0 * scale;
            let i1 = dr_dy(w, 1.0, 0.0).unwrap() * 2.0 * scale;
            let fast0 = i0_scaled(w);
            let fast1 = i1_over_w_scaled(w) * w * w;
            let tol = 1e-12 * (1.0 + w.norm());
            prop_assert!((fast0 - i0).norm() <= tol, "I0 at {}: {} vs {}", w, fast0, i0);
            prop_assert!((fast1 - i1).norm() <= tol * (1.0 + w.norm()), "I1 at {}: {} vs {}", w, fast1, i1);
        }

        #[test]
        fn growth_estimates(kre in -30.0f64..30.0, kim in -30.0f64..30.0, y in 0.01f64..3.0, frac in -1.0f64..1.0) {
            let k = c(kre, kim);
            let t = frac * y;
            let z = (y * y - t * t).sqrt();
            let bound = (kre.abs() * z).exp();
            prop_assert!(r_fun(k, y, t).unwrap().norm() <= 0.5 * bound * (1.0 + 1e-12));
            prop_assert!(dr_dy(k, y, t).unwrap().norm() <= 0.25 * k.norm_sqr() * y * bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}
