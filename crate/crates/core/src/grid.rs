use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform one-dimensional grid `start + i*step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid<T> {
    pub start: T,
    pub step: T,
    pub len: usize,
}

impl<T: Real> UniformGrid<T> {
    pub fn new(start: T, step: T, len: usize) -> Result<Self> {
        if !(step > T::zero()) || !start.is_finite() || len < 2 {
            return Err(Error::invalid(format!(
                "uniform grid needs step > 0 and at least 2 points (start {start}, step {step}, len {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// Grid covering `[a, b]` with spacing at most `max_step` and an even
    /// number of intervals (so that Simpson's rule applies).
    pub fn covering_even(a: T, b: T, max_step: T) -> Result<Self> {
        if !(b > a) || !(max_step > T::zero()) {
            return Err(Error::invalid(format!(
                "cannot cover [{a}, {b}] with step {max_step}"
            )));
        }
        let mut n = ((b - a) / max_step).ceil().to_usize().unwrap_or(2).max(2);
        if n % 2 == 1 {
            n += 1;
        }
        Self::new(a, (b - a) / T::of(n), n + 1)
    }

    #[inline]
    pub fn point(&self, i: usize) -> T {
        self.start + T::of(i) * self.step
    }

    #[inline]
    pub fn end(&self) -> T {
        self.point(self.len - 1)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    /// Whether `x` lies in `[start, end]` up to a small relative slack.
    pub fn contains(&self, x: T) -> bool {
        let slack = self.step * T::lit(1e-9);
        x >= self.start - slack && x <= self.end() + slack
    }

    /// Index of the grid point nearest to `x` if `x` lies on the grid to
    /// within `1e-9` of a step.
    pub fn exact_index(&self, x: T) -> Option<usize> {
        let s = (x - self.start) / self.step;
        let r = s.round();
        if (s - r).abs() < T::lit(1e-9) && r >= T::zero() && r < T::of(self.len) {
            r.to_usize()
        } else {
            None
        }
    }

    pub fn cast<U: Real>(&self) -> UniformGrid<U> {
        UniformGrid {
            start: U::lit(self.start.to_f64_lossy()),
            step: U::lit(self.step.to_f64_lossy()),
            len: self.len,
        }
    }
}
