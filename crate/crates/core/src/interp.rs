//! Cubic interpolation on uniform grids (four-point Lagrange stencils) and a
//! natural cubic spline for sampled coefficient functions.

use crate::grid::UniformGrid;
use crate::scalar::Real;

/// Four-point Lagrange stencil for `x` on `grid`: first index and weights.
/// The stencil is shifted inward near the ends. `None` when `x` is outside
/// the grid or the grid has fewer than four points.
pub fn cubic_stencil<T: Real>(grid: &UniformGrid<T>, x: T) -> Option<(usize, [T; 4])> {
    if grid.len < 4 || !grid.contains(x) {
        return None;
    }
    let s = (x - grid.start) / grid.step;
    let cell = s.floor().to_isize().unwrap_or(0);
    let first = (cell - 1).clamp(0, grid.len as isize - 4) as usize;
    let u = s - T::of(first);
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let six = T::lit(6.0);
    let w = [
        -(u - one) * (u - two) * (u - three) / six,
        u * (u - two) * (u - three) / two,
        -u * (u - one) * (u - three) / two,
        u * (u - one) * (u - two) / six,
    ];
    Some((first, w))
}

pub fn interp1<T: Real>(grid: &UniformGrid<T>, values: &[T], x: T) -> Option<T> {
    let (i, w) = cubic_stencil(grid, x)?;
    Some((0..4).fold(T::zero(), |acc, j| acc + w[j] * values[i + j]))
}

/// Tensor-product cubic interpolation of row-major data `values[iy][ix]`.
pub fn interp2<T: Real>(
    gy: &UniformGrid<T>,
    gx: &UniformGrid<T>,
    values: &[T],
    y: T,
    x: T,
) -> Option<T> {
    let (iy, wy) = cubic_stencil(gy, y)?;
    let (ix, wx) = cubic_stencil(gx, x)?;
    let mut acc = T::zero();
    for a in 0..4 {
        let row = &values[(iy + a) * gx.len..];
        let mut r = T::zero();
        for b in 0..4 {
            r += wx[b] * row[ix + b];
        }
        acc += wy[a] * r;
    }
    Some(acc)
}

/// Dense interpolation matrix mapping samples on `grid` to values at
/// `targets`, stored as (first index, weights) per target.
pub fn stencils<T: Real>(grid: &UniformGrid<T>, targets: &[T]) -> Option<Vec<(usize, [T; 4])>> {
    targets.iter().map(|&x| cubic_stencil(grid, x)).collect()
}

/// Natural cubic spline through uniformly spaced samples.
#[derive(Debug, Clone)]
pub struct CubicSpline<T> {
    grid: UniformGrid<T>,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn new(grid: UniformGrid<T>, values: Vec<T>) -> Self {
        let n = values.len();
        assert_eq!(n, grid.len);
        let mut second = vec![T::zero(); n];
        if n > 2 {
            // Thomas algorithm on the interior system h/6 (m_{i-1} + 4 m_i + m_{i+1}) = Δ²y/h.
            let h = grid.step;
            let mut c = vec![T::zero(); n];
            let mut d = vec![T::zero(); n];
            let six = T::lit(6.0);
            for i in 1..n - 1 {
                let rhs = six * (values[i + 1] - T::lit(2.0) * values[i] + values[i - 1]) / (h * h);
                let denom = T::lit(4.0) - c[i - 1];
                c[i] = T::one() / denom;
                d[i] = (rhs - d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                second[i] = d[i] - c[i] * second[i + 1];
            }
        }
        Self {
            grid,
            values,
            second,
        }
    }

    pub fn grid(&self) -> &UniformGrid<T> {
        &self.grid
    }

    /// Spline value; constant extension outside the sampled range.
    pub fn eval(&self, x: T) -> T {
        let g = &self.grid;
        if x <= g.start {
            return self.values[0];
        }
        if x >= g.end() {
            return self.values[g.len - 1];
        }
        let s = (x - g.start) / g.step;
        let i = s.floor().to_usize().unwrap_or(0).min(g.len - 2);
        let b = s - T::of(i);
        let a = T::one() - b;
        let h2 = g.step * g.step / T::lit(6.0);
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_reproduces_cubics() {
        let g = UniformGrid::new(-1.0, 0.25, 9).unwrap();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 3.0 * x * x * x;
        let v: Vec<f64> = g.points().into_iter().map(f).collect();
        for x in [-1.0, -0.93, -0.1, 0.0, 0.37, 0.99, 1.0] {
            assert!((interp1(&g, &v, x).unwrap() - f(x)).abs() < 1e-12);
        }
        assert!(interp1(&g, &v, 1.01).is_none());
    }

    #[test]
    fn spline_interpolates_smooth_function() {
        let g = UniformGrid::new(-3.0, 0.01, 601).unwrap();
        let v: Vec<f64> = g
            .points()
            .into_iter()
            .map(|x: f64| (-x * x).exp())
            .collect();
        let s = CubicSpline::new(g, v);
        for x in [-2.345, -0.5, 0.0, 0.0051, 1.777] {
            assert!((s.eval(x) - (-x * x).exp()).abs() < 1e-8);
        }
    }
}
