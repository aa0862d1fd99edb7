//! Quadrature rules: composite Simpson / trapezoid weights on uniform grids,
//! Gauss–Legendre panels and adaptive Gauss–Kronrod (7, 15) integration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Composite Simpson weights for `n` equally spaced samples with spacing
/// `step`. An even sample count closes with Simpson's 3/8 rule on the last
/// three intervals; two samples fall back to the trapezoid rule.
pub fn simpson_weights<T: Real>(n: usize, step: T) -> Vec<T> {
    let mut w = vec![T::zero(); n];
    match n {
        0 => return w,
        1 => return w,
        2 => {
            w[0] = step / T::lit(2.0);
            w[1] = step / T::lit(2.0);
            return w;
        }
        3 => {}
        _ => {}
    }
    let third = step / T::lit(3.0);
    let simpson_end = if n % 2 == 1 { n - 1 } else { n - 4 };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] += third;
        w[i + 1] += T::lit(4.0) * third;
        w[i + 2] += third;
        i += 2;
    }
    if n.is_multiple_of(2) {
        let e = step * T::lit(3.0 / 8.0);
        let s = simpson_end;
        w[s] += e;
        w[s + 1] += T::lit(3.0) * e;
        w[s + 2] += T::lit(3.0) * e;
        w[s + 3] += e;
    }
    w
}

pub fn trapezoid_weights<T: Real>(n: usize, step: T) -> Vec<T> {
    let mut w = vec![step; n];
    if n >= 1 {
        w[0] = step / T::lit(2.0);
        w[n - 1] = step / T::lit(2.0);
    }
    if n == 1 {
        w[0] = T::zero();
    }
    w
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

/// Composite Gauss–Legendre rule with `panels` equal panels on `[a, b]`.
pub fn composite_gauss_legendre<T: Real>(
    a: T,
    b: T,
    panels: usize,
    order: usize,
) -> (Vec<T>, Vec<T>) {
    let (xs, ws) = gauss_legendre::<T>(order);
    let width = (b - a) / T::of(panels);
    let half = width / T::lit(2.0);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (T::of(p) + T::lit(0.5)) * width;
        for (x, w) in xs.iter().zip(&ws) {
            nodes.push(mid + half * *x);
            weights.push(half * *w);
        }
    }
    (nodes, weights)
}

/// Gauss–Kronrod 15-point abscissae on `[0, 1]` (positive half, descending),
/// with the 7-point Gauss weights on the even-indexed entries.
const GK15_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes of the 15-point Kronrod rule on `[a, b]` together with Kronrod
/// weights and embedded Gauss weights (zero on Kronrod-only nodes).
#[derive(Debug, Clone)]
pub struct KronrodPanel<T> {
    pub nodes: [T; 15],
    pub kronrod: [T; 15],
    pub gauss: [T; 15],
}

pub fn kronrod_panel<T: Real>(a: T, b: T) -> KronrodPanel<T> {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut nodes = [T::zero(); 15];
    let mut kronrod = [T::zero(); 15];
    let mut gauss = [T::zero(); 15];
    for j in 0..7 {
        let x = T::lit(GK15_X[j]) * half;
        nodes[j] = mid - x;
        nodes[14 - j] = mid + x;
        kronrod[j] = T::lit(GK15_WK[j]) * half;
        kronrod[14 - j] = kronrod[j];
        if j % 2 == 1 {
            gauss[j] = T::lit(GK15_WG[j / 2]) * half;
            gauss[14 - j] = gauss[j];
        }
    }
    nodes[7] = mid;
    kronrod[7] = T::lit(GK15_WK[7]) * half;
    gauss[7] = T::lit(GK15_WG[3]) * half;
    KronrodPanel {
        nodes,
        kronrod,
        gauss,
    }
}

/// Stopping rule for [`adaptive_kronrod`]. A panel is accepted once its
/// error estimate in every component `c` is at most
/// `max(abs_tol[c], rel_tol · |I_g|) · width / (b - a)`, or has reached the
/// rounding level of `∫ |f_c|` over the panel. `|I_g|` is the Euclidean norm
/// of the group of `group` consecutive components containing `c` (use 2 for
/// real and imaginary parts of complex outputs).
#[derive(Debug, Clone)]
pub struct AdaptiveOptions<T> {
    pub rel_tol: T,
    pub group: usize,
    pub abs_tol: Vec<T>,
    pub initial_panels: usize,
    pub max_panels: usize,
}

/// Integrals, error estimates and the accepted panels of an adaptive run.
#[derive(Debug, Clone)]
pub struct AdaptiveResult<T> {
    pub integral: Vec<T>,
    pub error: Vec<T>,
    /// Accepted panels in ascending order; their Kronrod nodes form a
    /// reusable quadrature rule for integrands of the same character.
    pub panels: Vec<(T, T)>,
}

impl<T: Real> AdaptiveResult<T> {
    /// Kronrod nodes and weights of all accepted panels.
    pub fn rule(&self) -> (Vec<T>, Vec<T>) {
        let mut nodes = Vec::with_capacity(self.panels.len() * 15);
        let mut weights = Vec::with_capacity(self.panels.len() * 15);
        for &(a, b) in &self.panels {
            let p = kronrod_panel(a, b);
            nodes.extend_from_slice(&p.nodes);
            weights.extend_from_slice(&p.kronrod);
        }
        (nodes, weights)
    }
}

struct Panel<T> {
    a: T,
    b: T,
    value: Vec<T>,
    error: Vec<T>,
    /// `∫ |f|` on the panel, bounding what rounding lets the error reach.
    magnitude: Vec<T>,
}

/// Adaptive Gauss–Kronrod integration of a vector-valued function on
/// `[a, b]`. All nodes of one refinement round are evaluated in parallel.
pub fn adaptive_kronrod<T, F>(
    a: T,
    b: T,
    dim: usize,
    f: F,
    opts: &AdaptiveOptions<T>,
) -> Result<AdaptiveResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    let width = b - a;
    let n0 = opts.initial_panels.max(1);
    let mut pending: Vec<(T, T)> = (0..n0)
        .map(|i| {
            (
                a + width * T::of(i) / T::of(n0),
                a + width * T::of(i + 1) / T::of(n0),
            )
        })
        .collect();
    let mut done: Vec<Panel<T>> = Vec::new();
    let mut active: Vec<Panel<T>> = Vec::new();
    loop {
        let fresh = pending
            .par_iter()
            .map(|&(lo, hi)| eval_panel(lo, hi, dim, &f))
            .collect::<Result<Vec<_>>>()?;
        active.extend(fresh);
        if done.len() + active.len() > opts.max_panels {
            return Err(Error::NodeBudget {
                budget: opts.max_panels,
            });
        }
        let mut total = vec![T::zero(); dim];
        for p in done.iter().chain(&active) {
            for c in 0..dim {
                total[c] += p.value[c];
            }
        }
        let g = opts.group.max(1);
        let tol: Vec<T> = (0..dim)
            .map(|c| {
                let first = c - c % g;
                let norm = total[first..(first + g).min(dim)]
                    .iter()
                    .fold(T::zero(), |s, v| s + *v * *v)
                    .sqrt();
                opts.abs_tol
                    .get(c)
                    .copied()
                    .unwrap_or(T::zero())
                    .max(opts.rel_tol * norm)
            })
            .collect();
        pending.clear();
        for p in active.drain(..) {
            let share = (p.b - p.a) / width;
            let noise = T::epsilon() * T::lit(50.0);
            let ok = (0..dim)
                .all(|c| p.error[c] <= tol[c] * share || p.error[c] <= noise * p.magnitude[c]);
            if ok {
                done.push(p);
            } else {
                let mid = (p.a + p.b) / T::lit(2.0);
                if !(mid > p.a && mid < p.b) {
                    // Cannot split further; accept what rounding allows.
                    done.push(p);
                    continue;
                }
                pending.push((p.a, mid));
                pending.push((mid, p.b));
            }
        }
        if pending.is_empty() {
            done.sort_by(|x, y| x.a.partial_cmp(&y.a).expect("finite panel bounds"));
            let mut integral = vec![T::zero(); dim];
            let mut error = vec![T::zero(); dim];
            for p in &done {
                for c in 0..dim {
                    integral[c] += p.value[c];
                    error[c] += p.error[c];
                }
            }
            let panels = done.iter().map(|p| (p.a, p.b)).collect();
            return Ok(AdaptiveResult {
                integral,
                error,
                panels,
            });
        }
    }
}

fn eval_panel<T: Real, F>(a: T, b: T, dim: usize, f: &F) -> Result<Panel<T>>
where
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    let p = kronrod_panel(a, b);
    let values = p
        .nodes
        .par_iter()
        .map(|&x| f(x))
        .collect::<Result<Vec<_>>>()?;
    let mut value = vec![T::zero(); dim];
    let mut gauss = vec![T::zero(); dim];
    let mut magnitude = vec![T::zero(); dim];
    for (j, v) in values.iter().enumerate() {
        for c in 0..dim {
            value[c] += p.kronrod[j] * v[c];
            gauss[c] += p.gauss[j] * v[c];
            magnitude[c] += p.kronrod[j] * v[c].abs();
        }
    }
    let error = value
        .iter()
        .zip(&gauss)
        .map(|(k, g)| (*k - *g).abs())
        .collect();
    Ok(Panel {
        a,
        b,
        value,
        error,
        magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        for n in [3usize, 4, 5, 8, 11] {
            let h = 2.0 / (n - 1) as f64;
            let w = simpson_weights(n, h);
            let s: f64 = (0..n)
                .map(|i| w[i] * (-1.0 + i as f64 * h).powi(3) + w[i] * 1.0)
                .sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} s={s}");
            let x2: f64 = (0..n).map(|i| w[i] * (-1.0 + i as f64 * h).powi(2)).sum();
            assert!((x2 - 2.0 / 3.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn gauss_legendre_exact_to_degree() {
        for n in 1..12 {
            let (x, w) = gauss_legendre::<f64>(n);
            for p in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 {
                    0.0
                } else {
                    2.0 / (p as f64 + 1.0)
                };
                assert!((s - exact).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn kronrod_pair_consistent() {
        let p = kronrod_panel(0.0f64, 2.0);
        let f = |x: f64| (3.0 * x).cos() * x.exp();
        let exact = {
            // ∫ e^x cos 3x = e^x (cos 3x + 3 sin 3x)/10
            let g = |x: f64| x.exp() * ((3.0 * x).cos() + 3.0 * (3.0 * x).sin()) / 10.0;
            g(2.0) - g(0.0)
        };
        let k: f64 = (0..15).map(|i| p.kronrod[i] * f(p.nodes[i])).sum();
        let g: f64 = (0..15).map(|i| p.gauss[i] * f(p.nodes[i])).sum();
        assert!((k - exact).abs() < 1e-12);
        assert!((g - exact).abs() < 1e-4);
    }
}

#[cfg(test)]
mod adaptive_tests {
    use super::*;

    #[test]
    fn adaptive_handles_sharp_peak() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-12,
            group: 1,
            abs_tol: vec![0.0, 0.0],
            initial_panels: 2,
            max_panels: 500,
        };
        let r = adaptive_kronrod(
            -1.0f64,
            1.0,
            2,
            |x| Ok(vec![1.0 / (1e-4 + x * x), x.cos()]),
            &opts,
        )
        .unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.integral[0] - exact).abs() < 1e-10 * exact);
        assert!((r.integral[1] - 2.0 * 1f64.sin()).abs() < 1e-14);
        let (nodes, weights) = r.rule();
        let reuse: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x.cos()).sum();
        assert!((reuse - 2.0 * 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn adaptive_reports_budget() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-15,
            group: 1,
            abs_tol: vec![0.0],
            initial_panels: 1,
            max_panels: 4,
        };
        let r = adaptive_kronrod(0.0f64, 1.0, 1, |x| Ok(vec![x.sqrt()]), &opts);
        assert!(matches!(r, Err(Error::NodeBudget { .. })));
    }
}
