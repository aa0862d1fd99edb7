//! Reference computations that share no numerical code with the library:
//! an FFT implementation of the free-space reconstruction, a finite
//! difference eigensolver, and a direct quadrature of the free-space kernel.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::UniformGrid;
use crate::reconstruct::{CauchyData, TargetPoint};
use crate::spectral1d::Potential;

/// `I₀(w)` for real `w` by its power series.
pub fn bessel_i0(w: f64) -> f64 {
    let q = w * w / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    let mut m = 1.0;
    while term > sum * 1e-17 {
        term *= q / (m * m);
        sum += term;
        m += 1.0;
    }
    sum
}

/// `I₁(w) / w` for real `w` by its power series.
pub fn bessel_i1_over_w(w: f64) -> f64 {
    let q = w * w / 4.0;
    let (mut term, mut sum) = (0.5, 0.5);
    let mut m = 1.0;
    while term > sum * 1e-17 {
        term *= q / (m * (m + 1.0));
        sum += term;
        m += 1.0;
    }
    sum
}

/// Cubic Lagrange interpolation of `values` on `grid` at `t`, written out
/// independently of the library's stencils (same stencil placement).
fn lagrange4(grid: &UniformGrid<f64>, values: &[Complex64], t: f64) -> Complex64 {
    let s = (t - grid.start) / grid.step;
    let first = ((s.floor() as isize) - 1).clamp(0, grid.len as isize - 4) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                w *= (s - (first + b) as f64) / (a as f64 - b as f64);
            }
        }
        acc += values[first + a] * w;
    }
    acc
}

/// Regularized free-space reconstruction `u_h(x0, y0, t0)` at each `h`,
/// computed with zero-padded FFTs in `x` over all frequencies below the
/// Nyquist limit.
///
/// The time integral uses `t = t0 + y0 sin θ` with composite Simpson in `θ`
/// and `n` intervals (the same node set as the library, so that the two
/// agree beyond interpolation error).
pub fn fourier_reconstruction(
    data: &CauchyData<f64>,
    target: &TargetPoint<f64>,
    levels: &[f64],
) -> Vec<f64> {
    let (x, t) = (data.x, data.t);
    let TargetPoint { x0, y0, t0 } = *target;
    let nx = x.len;
    let npad = (4 * nx).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(npad);
    let dxi = 2.0 * std::f64::consts::PI / (npad as f64 * x.step);

    let mut n = ((std::f64::consts::PI * y0 / t.step).ceil() as usize).max(16);
    n += n % 2;
    let dtheta = std::f64::consts::PI / n as f64;
    let nodes: Vec<(f64, f64, f64)> = (0..=n)
        .map(|j| {
            let theta = -std::f64::consts::FRAC_PI_2 + j as f64 * dtheta;
            let simpson = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let z = y0 * theta.cos().max(0.0);
            (y0 * theta.sin(), z, simpson * dtheta / 3.0 * z)
        })
        .collect();

    // Transforms of every data row, one frequency vector per row.
    let transform = |row: &[f64]| {
        let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(npad, Complex64::new(0.0, 0.0));
        fft.process(&mut buf);
        buf
    };
    let fhat: Vec<Vec<Complex64>> = (0..t.len).map(|i| transform(data.f_row(i))).collect();
    let ghat: Vec<Vec<Complex64>> = (0..t.len).map(|i| transform(data.g_row(i))).collect();

    let half = npad / 2;
    let mut per_mode = Vec::with_capacity(half);
    let mut fcol = vec![Complex64::new(0.0, 0.0); t.len];
    let mut gcol = vec![Complex64::new(0.0, 0.0); t.len];
    for m in 0..half {
        let xi = m as f64 * dxi;
        // DTFT at ξ from the DFT bin: dx · e^{-iξ x_min} · F_m.
        let phase = Complex64::from_polar(x.step, -xi * x.start);
        for i in 0..t.len {
            fcol[i] = fhat[i][m] * phase;
            gcol[i] = ghat[i][m] * phase;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(off, z, w) in &nodes {
            let tt = (t0 + off).clamp(t0 - y0, t0 + y0);
            let f = lagrange4(&t, &fcol, tt);
            let g = lagrange4(&t, &gcol, tt);
            let arg = xi * z;
            let r = 0.5 * bessel_i0(arg);
            let dr = 0.5 * xi * xi * y0 * bessel_i1_over_w(arg);
            acc += (f * dr + g * r) * w;
        }
        per_mode.push(acc * Complex64::from_polar(1.0, xi * x0));
    }

    let column: Vec<Complex64> = (0..t.len)
        .map(|i| Complex64::new(interp_x(&x, data.f_row(i), x0), 0.0))
        .collect();
    let boundary = 0.5 * (lagrange4(&t, &column, t0 + y0) + lagrange4(&t, &column, t0 - y0)).re;

    levels
        .iter()
        .map(|&h| {
            // Real data: the negative frequencies are the conjugates.
            let mut sum = per_mode[0].re;
            for (m, c) in per_mode.iter().enumerate().skip(1) {
                let xi = m as f64 * dxi;
                sum += 2.0 * (c.re * (-h * xi * xi).exp());
            }
            boundary + sum * dxi / (2.0 * std::f64::consts::PI)
        })
        .collect()
}

fn interp_x(x: &UniformGrid<f64>, row: &[f64], x0: f64) -> f64 {
    let col: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    lagrange4(x, &col, x0).re
}

/// Number of eigenvalues below `lambda` of the Dirichlet finite-difference
/// operator with diagonal `diag` and off-diagonal `-1/dx²` (Sturm count of
/// the `LDLᵀ` pivots).
fn sturm_count(diag: &[f64], off: f64, lambda: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        d = if i == 0 {
            a - lambda
        } else {
            a - lambda - off * off / d
        };
        if d == 0.0 {
            d = f64::EPSILON * (a.abs() + lambda.abs()).max(1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenvalue of `-d²/dx² + q` on `[-half_width, half_width]` with
/// Dirichlet ends, second-order differences with `n` intervals.
pub fn fd_ground_energy(q: &Potential<f64>, half_width: f64, n: usize) -> f64 {
    let dx = 2.0 * half_width / n as f64;
    let diag: Vec<f64> = (1..n)
        .map(|i| 2.0 / (dx * dx) + q.eval(-half_width + i as f64 * dx))
        .collect();
    let off = -1.0 / (dx * dx);
    // Gershgorin bounds on the spectrum.
    let (mut lo, mut hi) = (q.min() - 1.0, q.max_abs() + 4.0 / (dx * dx));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Ground-state energy extrapolated from three grids: the Richardson values
/// from grids `(n, 2n)` and `(2n, 4n)`, returned as (best, difference).
pub fn fd_ground_energy_richardson(q: &Potential<f64>, half_width: f64, n: usize) -> (f64, f64) {
    let e1 = fd_ground_energy(q, half_width, n);
    let e2 = fd_ground_energy(q, half_width, 2 * n);
    let e3 = fd_ground_energy(q, half_width, 4 * n);
    let r12 = (4.0 * e2 - e1) / 3.0;
    let r23 = (4.0 * e3 - e2) / 3.0;
    (r23, (r23 - r12).abs())
}

/// Free-space `(K^D, K^N)` at offset `dx = x - x0`, depth `y0` and time
/// offset `t`, from
///
/// `K^N = (4π)^{-1} (πh)^{-1/2} ∫_0^π exp((z cos s + i dx)² / 4h) ds`,
/// `z = √(y0² - t²)`, and its `y0` derivative for `K^D`.
///
/// The integrand is even and `2π`-periodic in `s`, so the trapezoid rule on
/// a full period converges geometrically.
pub fn free_space_kernel(h: f64, y0: f64, t: f64, dx: f64) -> (f64, f64) {
    assert!(t.abs() < y0, "free_space_kernel needs |t| < y0");
    let z = (y0 * y0 - t * t).sqrt();
    let n = 2048;
    let (mut kn, mut kd) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for j in 0..n {
        let s = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let a = Complex64::new(z * s.cos(), dx);
        let e = (a * a / (4.0 * h)).exp();
        kn += e;
        // ∂/∂y0 acts through z, with ∂z/∂y0 = y0 / z.
        kd += e * a * (2.0 * s.cos() * y0 / z / (4.0 * h));
    }
    let scale = 1.0 / (4.0 * std::f64::consts::PI * (std::f64::consts::PI * h).sqrt())
        * std::f64::consts::PI
        / n as f64;
    ((kd * scale).re, (kn * scale).re)
}
