use num_complex::Complex;

use super::data::window_error;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interp::cubic_stencil;
use crate::kernels::bessel::r_pair_scaled;
use crate::quadrature::simpson_weights;
use crate::scalar::Real;

/// Quadrature over the light interval `|t - t0| <= y0`, in the variable
/// `t = t0 + y0 sin θ`, with cubic interpolation of samples on a uniform
/// time grid.
///
/// The substitution removes the square-root behaviour of `r(k, y0, t)` at
/// `|t| = y0`: in `θ` the integrand is smooth and Simpson's rule converges
/// at its full order.
#[derive(Debug, Clone)]
pub struct TimeRule<T> {
    y0: T,
    t0: T,
    /// `t - t0` at the nodes.
    offsets: Vec<T>,
    /// `√(y0² - (t - t0)²)` at the nodes.
    depths: Vec<T>,
    weights: Vec<T>,
    stencils: Vec<(usize, [T; 4])>,
    ends: [(usize, [T; 4]); 2],
}

impl<T: Real> TimeRule<T> {
    /// Node spacing in `t` near `t0` is at most `max_step` and at most the
    /// data spacing; at least 16 intervals are used.
    pub fn new(grid: &UniformGrid<T>, y0: T, t0: T, max_step: T) -> Result<Self> {
        if !(y0 > T::zero()) {
            return Err(Error::invalid(format!(
                "depth y0 must be positive, got {y0}"
            )));
        }
        let (lo, hi) = (t0 - y0, t0 + y0);
        let stencil = |t: T| cubic_stencil(grid, t).ok_or_else(|| window_error("t", lo, hi, grid));
        let ends = [stencil(hi)?, stencil(lo)?];
        let step = max_step.min(grid.step);
        let mut n = (T::PI() * y0 / step)
            .ceil()
            .to_usize()
            .unwrap_or(16)
            .max(16);
        n += n % 2;
        let dtheta = T::PI() / T::of(n);
        let simpson = simpson_weights(n + 1, dtheta);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut depths = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        let mut stencils = Vec::with_capacity(n + 1);
        for (j, w) in simpson.iter().enumerate() {
            let theta = -T::FRAC_PI_2() + dtheta * T::of(j);
            let off = if j == n / 2 {
                T::zero()
            } else {
                y0 * theta.sin()
            };
            let depth = y0 * theta.cos().max(T::zero());
            offsets.push(off);
            depths.push(depth);
            weights.push(*w * depth);
            stencils.push(stencil((t0 + off).max(lo).min(hi))?);
        }
        Ok(Self {
            y0,
            t0,
            offsets,
            depths,
            weights,
            stencils,
            ends,
        })
    }

    pub fn y0(&self) -> T {
        self.y0
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    pub fn depths(&self) -> &[T] {
        &self.depths
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Range of data rows any stencil touches.
    pub fn rows(&self) -> std::ops::Range<usize> {
        let first = self
            .stencils
            .iter()
            .chain(&self.ends)
            .map(|s| s.0)
            .min()
            .expect("nodes");
        let last = self
            .stencils
            .iter()
            .chain(&self.ends)
            .map(|s| s.0 + 4)
            .max()
            .expect("nodes");
        first..last
    }

    /// Interpolated value at node `j` of samples given for the rows in
    /// [`rows`](Self::rows), `series[i - rows().start]`.
    #[inline]
    fn node_value<V>(&self, stencil: (usize, [T; 4]), series: &[V], first: usize) -> V
    where
        V: Copy + std::ops::Mul<T, Output = V> + std::ops::Add<Output = V>,
    {
        let (i, w) = stencil;
        let s = &series[i - first..];
        s[0] * w[0] + s[1] * w[1] + s[2] * w[2] + s[3] * w[3]
    }

    /// `½ (f(t0 + y0) + f(t0 - y0))`.
    pub fn boundary<V>(&self, series: &[V]) -> V
    where
        V: Copy + std::ops::Mul<T, Output = V> + std::ops::Add<Output = V>,
    {
        let first = self.rows().start;
        (self.node_value(self.ends[0], series, first)
            + self.node_value(self.ends[1], series, first))
            * T::lit(0.5)
    }

    /// Interpolated samples at every node.
    pub fn at_nodes<V>(&self, series: &[V]) -> Vec<V>
    where
        V: Copy + std::ops::Mul<T, Output = V> + std::ops::Add<Output = V>,
    {
        let first = self.rows().start;
        self.stencils
            .iter()
            .map(|&s| self.node_value(s, series, first))
            .collect()
    }

    /// `∫ [∂_y r(k, y0, t - t0) f̂(t) + r(k, y0, t - t0) ĝ(t)] dt` from node values.
    pub fn integral(
        &self,
        k: Complex<T>,
        f_nodes: &[Complex<T>],
        g_nodes: &[Complex<T>],
    ) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..self.weights.len() {
            let z = self.depths[j];
            let (r, dr) = r_pair_scaled(k, self.y0, z);
            let grow = ((k * z).re.abs()).exp() * self.weights[j];
            acc += (dr * f_nodes[j] + r * g_nodes[j]) * grow;
        }
        acc
    }
}

/// Solution `û(k, y0, t0)` of the per-mode problem `û_tt - û_yy + k² û = 0`
/// with `û|_{y=0} = f̂`, `∂_y û|_{y=0} = ĝ` given on `grid`:
///
/// `û = ½(f̂(t0 + y0) + f̂(t0 - y0)) + ∫_{|t - t0| <= y0} [∂_y r f̂ + r ĝ] dt`.
pub fn mode_solution<T: Real>(
    grid: &UniformGrid<T>,
    fhat: &[Complex<T>],
    ghat: &[Complex<T>],
    k: Complex<T>,
    y0: T,
    t0: T,
) -> Result<Complex<T>> {
    if fhat.len() != grid.len || ghat.len() != grid.len {
        return Err(Error::invalid("mode samples must match the time grid"));
    }
    let rule = TimeRule::new(grid, y0, t0, grid.step)?;
    let rows = rule.rows();
    let f = &fhat[rows.clone()];
    let g = &ghat[rows];
    Ok(rule.boundary(f) + rule.integral(k, &rule.at_nodes(f), &rule.at_nodes(g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex<f64> {
        Complex::new(v, 0.0)
    }

    fn sampled(grid: &UniformGrid<f64>, f: impl Fn(f64) -> f64) -> Vec<Complex<f64>> {
        grid.points().into_iter().map(|t| c(f(t))).collect()
    }

    #[test]
    fn zero_data_give_zero() {
        let grid = UniformGrid::new(-1.0, 0.01, 201).unwrap();
        let z = vec![c(0.0); grid.len];
        assert_eq!(
            mode_solution(&grid, &z, &z, c(3.0), 0.5, 0.0).unwrap(),
            c(0.0)
        );
    }

    #[test]
    fn klein_gordon_standing_mode() {
        // û = cos(√2 t) cos(y) solves û_tt - û_yy + û = 0.
        let grid = UniformGrid::new(-1.0, 0.01, 201).unwrap();
        let f = sampled(&grid, |t| (2f64.sqrt() * t).cos());
        let g = vec![c(0.0); grid.len];
        let u = mode_solution(&grid, &f, &g, c(1.0), 0.5, 0.0).unwrap();
        assert!((u - c(0.5f64.cos())).norm() < 1e-8, "{u}");
    }

    #[test]
    fn travelling_mode_with_neumann_data() {
        // û = sin(t - y + 0.3) cosh-free: k = 0 plane wave, f = sin(t+0.3), g = -cos(t+0.3).
        let grid = UniformGrid::new(0.0, 0.005, 401).unwrap();
        let f = sampled(&grid, |t| (t + 0.3).sin());
        let g = sampled(&grid, |t| -(t + 0.3).cos());
        let u = mode_solution(&grid, &f, &g, c(0.0), 0.7, 1.0).unwrap();
        assert!((u - c((1.0 - 0.7 + 0.3f64).sin())).norm() < 1e-9);
    }

    #[test]
    fn evanescent_mode_grows() {
        // k = 2, ω = 1: û = cos(t) cosh(√3 y).
        let grid = UniformGrid::new(-1.0, 0.01, 201).unwrap();
        let f = sampled(&grid, f64::cos);
        let g = vec![c(0.0); grid.len];
        let u = mode_solution(&grid, &f, &g, c(2.0), 0.6, 0.1).unwrap();
        let want = 0.1f64.cos() * (3f64.sqrt() * 0.6).cosh();
        assert!((u - c(want)).norm() < 1e-8 * want, "{u} vs {want}");
    }

    #[test]
    fn collapses_to_data_as_depth_vanishes() {
        let grid = UniformGrid::new(-1.0, 0.01, 201).unwrap();
        let f = sampled(&grid, |t| (3.0 * t).sin() + 2.0);
        let g = sampled(&grid, |t| t * t);
        let u = mode_solution(&grid, &f, &g, c(1.5), 1e-6, 0.237).unwrap();
        assert!((u - c((3.0 * 0.237f64).sin() + 2.0)).norm() < 1e-5);
    }

    #[test]
    fn rejects_windows_outside_the_data() {
        let grid = UniformGrid::new(0.0, 0.01, 101).unwrap();
        let z = vec![c(0.0); grid.len];
        assert!(matches!(
            mode_solution(&grid, &z, &z, c(1.0), 0.5, 0.2),
            Err(Error::WindowOutsideData { what: "t", .. })
        ));
    }
}
