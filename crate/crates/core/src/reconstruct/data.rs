use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interp::interp2;
use crate::scalar::Real;

/// Boundary traces `f = u|_{y=0}` and `g = ∂_y u|_{y=0}` on a uniform
/// `(x, t)` grid, stored row-major as `[t index][x index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData<T> {
    pub x: UniformGrid<T>,
    pub t: UniformGrid<T>,
    pub f: Vec<T>,
    pub g: Vec<T>,
}

impl<T: Real> CauchyData<T> {
    pub fn new(x: UniformGrid<T>, t: UniformGrid<T>, f: Vec<T>, g: Vec<T>) -> Result<Self> {
        if x.len < 4 || t.len < 4 {
            return Err(Error::invalid(format!(
                "Cauchy data need nx, nt >= 4 for cubic interpolation (got nx = {}, nt = {})",
                x.len, t.len
            )));
        }
        let n = x.len * t.len;
        if f.len() != n || g.len() != n {
            return Err(Error::invalid(format!(
                "Cauchy data arrays must hold nt * nx = {n} values (f has {}, g has {})",
                f.len(),
                g.len()
            )));
        }
        if f.iter().chain(&g).any(|v| !v.is_finite()) {
            return Err(Error::invalid("Cauchy data contain non-finite values"));
        }
        Ok(Self { x, t, f, g })
    }

    pub fn zeros(x: UniformGrid<T>, t: UniformGrid<T>) -> Result<Self> {
        let n = x.len * t.len;
        Self::new(x, t, vec![T::zero(); n], vec![T::zero(); n])
    }

    /// Samples closed-form traces `f(x, t)` and `g(x, t)`.
    pub fn from_fn(
        x: UniformGrid<T>,
        t: UniformGrid<T>,
        f: impl Fn(T, T) -> T,
        g: impl Fn(T, T) -> T,
    ) -> Result<Self> {
        let mut fv = Vec::with_capacity(x.len * t.len);
        let mut gv = Vec::with_capacity(x.len * t.len);
        for it in 0..t.len {
            let tt = t.point(it);
            for ix in 0..x.len {
                let xx = x.point(ix);
                fv.push(f(xx, tt));
                gv.push(g(xx, tt));
            }
        }
        Self::new(x, t, fv, gv)
    }

    #[inline]
    pub fn f_row(&self, it: usize) -> &[T] {
        &self.f[it * self.x.len..(it + 1) * self.x.len]
    }

    #[inline]
    pub fn g_row(&self, it: usize) -> &[T] {
        &self.g[it * self.x.len..(it + 1) * self.x.len]
    }

    /// Cubic interpolation of `f` at `(x, t)`.
    pub fn f_at(&self, x: T, t: T) -> Result<T> {
        interp2(&self.t, &self.x, &self.f, t, x).ok_or_else(|| self.outside(x, t))
    }

    pub fn g_at(&self, x: T, t: T) -> Result<T> {
        interp2(&self.t, &self.x, &self.g, t, x).ok_or_else(|| self.outside(x, t))
    }

    fn outside(&self, x: T, t: T) -> Error {
        if !self.x.contains(x) {
            window_error("x", x, x, &self.x)
        } else {
            window_error("t", t, t, &self.t)
        }
    }

    /// `a * self + b * other` on identical grids.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.x != other.x || self.t != other.t {
            return Err(Error::invalid(
                "cannot combine Cauchy data on different grids",
            ));
        }
        let mix = |u: &[T], v: &[T]| u.iter().zip(v).map(|(&p, &q)| a * p + b * q).collect();
        Self::new(
            self.x,
            self.t,
            mix(&self.f, &other.f),
            mix(&self.g, &other.g),
        )
    }

    /// Adds independent uniform noise on `[-δ, δ]` with `δ = level · max|f|`
    /// to `f` (and likewise for `g`, relative to `max|g|`).
    pub fn with_noise(&self, level: T, seed: u64) -> Result<Self> {
        if !(level >= T::zero()) {
            return Err(Error::invalid(format!(
                "noise level must be non-negative, got {level}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perturb = |v: &[T]| -> Vec<T> {
            let amp = level * v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
            v.iter()
                .map(|&x| x + amp * T::lit(rng.gen_range(-1.0..=1.0)))
                .collect()
        };
        let f = perturb(&self.f);
        let g = perturb(&self.g);
        Self::new(self.x, self.t, f, g)
    }

    /// Time-shifted copy: the same samples on the grid starting at `t_min + shift`.
    pub fn shifted(&self, shift: T) -> Self {
        let mut out = self.clone();
        out.t.start += shift;
        out
    }
}

pub(crate) fn window_error<T: Real>(
    what: &'static str,
    lo: T,
    hi: T,
    grid: &UniformGrid<T>,
) -> Error {
    Error::WindowOutsideData {
        what,
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
        min: grid.start.to_f64_lossy(),
        max: grid.end().to_f64_lossy(),
    }
}

/// Reconstruction location `(x0, y0, t0)` with `y0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPoint<T> {
    pub x0: T,
    pub y0: T,
    pub t0: T,
}

impl<T: Real> TargetPoint<T> {
    pub fn new(x0: T, y0: T, t0: T) -> Result<Self> {
        if !(y0 > T::zero()) || !x0.is_finite() || !t0.is_finite() || !y0.is_finite() {
            return Err(Error::invalid(format!(
                "target needs finite coordinates and y0 > 0 (got y0 = {y0})"
            )));
        }
        Ok(Self { x0, y0, t0 })
    }

    /// Checks that `[t0 - y0, t0 + y0]` and, if given, `[x0 - y0 - ε, x0 + y0 + ε]`
    /// lie inside the data grid.
    pub fn check_window(
        &self,
        data_x: &UniformGrid<T>,
        data_t: &UniformGrid<T>,
        eps: Option<T>,
    ) -> Result<()> {
        let (lo, hi) = (self.t0 - self.y0, self.t0 + self.y0);
        if !data_t.contains(lo) || !data_t.contains(hi) {
            return Err(window_error("t", lo, hi, data_t));
        }
        let reach = self.y0 + eps.unwrap_or(T::zero());
        let (lo, hi) = (self.x0 - reach, self.x0 + reach);
        if !data_x.contains(lo) || !data_x.contains(hi) {
            return Err(window_error("x", lo, hi, data_x));
        }
        Ok(())
    }
}

/// Geometric sequence of regularization levels `h0 · ratio^m`, `m < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HSchedule<T> {
    pub h0: T,
    pub ratio: T,
    pub count: usize,
}

impl<T: Real> HSchedule<T> {
    pub fn new(h0: T, ratio: T, count: usize) -> Result<Self> {
        let s = Self { h0, ratio, count };
        s.validate()?;
        Ok(s)
    }

    /// `h0 = 0.2 y0²`, halving, six levels.
    pub fn default_for(y0: T) -> Self {
        Self {
            h0: T::lit(0.2) * y0 * y0,
            ratio: T::lit(0.5),
            count: 6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h0 > T::zero()) || !(self.ratio > T::zero() && self.ratio < T::one()) {
            return Err(Error::invalid(format!(
                "h schedule needs h0 > 0 and ratio in (0, 1) (got h0 = {}, ratio = {})",
                self.h0, self.ratio
            )));
        }
        if self.count < 3 {
            return Err(Error::TooFewLevels(self.count));
        }
        let last = self.levels()[self.count - 1];
        if !(last >= T::lit(1e-6)) {
            return Err(Error::invalid(format!(
                "finest level h = {last:e} is below the floor 1e-6"
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> Vec<T> {
        (0..self.count)
            .map(|m| self.h0 * self.ratio.powi(m as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Spectral,
    Localized,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Spectral => "spectral",
            Pipeline::Localized => "localized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult<T> {
    pub target: TargetPoint<T>,
    /// Value at the selected level.
    pub value: T,
    pub levels: Vec<T>,
    pub per_level: Vec<T>,
    pub selected: usize,
    pub error_estimate: T,
    pub pipeline: Pipeline,
}

impl<T: Real> ReconstructionResult<T> {
    pub fn h_selected(&self) -> T {
        self.levels[self.selected]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids() -> (UniformGrid<f64>, UniformGrid<f64>) {
        (
            UniformGrid::new(-1.0, 0.1, 21).unwrap(),
            UniformGrid::new(0.0, 0.05, 41).unwrap(),
        )
    }

    #[test]
    fn interpolates_bilinear_fields_exactly() {
        let (x, t) = grids();
        let d = CauchyData::from_fn(x, t, |x, t| 1.0 + 2.0 * x - t + x * t, |x, _| x).unwrap();
        let v = d.f_at(0.123, 1.234).unwrap();
        assert!((v - (1.0 + 0.246 - 1.234 + 0.123 * 1.234)).abs() < 1e-13);
        assert!(d.g_at(1.2, 0.5).is_err());
    }

    #[test]
    fn window_checks() {
        let (x, t) = grids();
        let p = TargetPoint::new(0.0, 0.5, 1.0).unwrap();
        assert!(p.check_window(&x, &t, Some(0.5)).is_ok());
        assert!(matches!(
            p.check_window(&x, &t, Some(0.6)),
            Err(Error::WindowOutsideData { what: "x", .. })
        ));
        let late = TargetPoint::new(0.0, 0.5, 1.8).unwrap();
        assert!(matches!(
            late.check_window(&x, &t, None),
            Err(Error::WindowOutsideData { what: "t", .. })
        ));
        assert!(TargetPoint::new(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn schedule_levels_and_validation() {
        let s = HSchedule::<f64>::default_for(0.5);
        let l = s.levels();
        assert_eq!(l.len(), 6);
        assert!((l[0] - 0.05).abs() < 1e-15 && (l[5] - 0.05 / 32.0).abs() < 1e-15);
        assert!(matches!(
            HSchedule::new(0.1, 0.5, 2),
            Err(Error::TooFewLevels(2))
        ));
        assert!(HSchedule::new(1e-5, 0.1, 4).is_err());
        assert!(HSchedule::new(0.1, 1.0, 4).is_err());
    }

    #[test]
    fn noise_is_seeded_and_bounded() {
        let (x, t) = grids();
        let d = CauchyData::from_fn(x, t, |x, t| (x + t).sin(), |x, t| (x - t).cos()).unwrap();
        let a = d.with_noise(0.01, 7).unwrap();
        assert_eq!(a, d.with_noise(0.01, 7).unwrap());
        assert_ne!(a, d.with_noise(0.01, 8).unwrap());
        let fmax = d.f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(a
            .f
            .iter()
            .zip(&d.f)
            .all(|(p, q)| (p - q).abs() <= 0.01 * fmax));
    }
}
