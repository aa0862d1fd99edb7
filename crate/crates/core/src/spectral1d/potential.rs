use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interp::CubicSpline;
use crate::scalar::Real;

/// One additive component of a potential, before the compact-support taper.
#[derive(Debug, Clone)]
pub enum Term<T> {
    /// `-nu (nu + 1) / scale² · sech²((x - center) / scale)`.
    PoschlTeller { nu: T, center: T, scale: T },
    /// `amplitude · exp(-((x - center) / width)²)`.
    Gaussian { amplitude: T, center: T, width: T },
    /// Smoothly interpolated samples on a uniform grid (zero outside it).
    Sampled(CubicSpline<T>),
}

impl<T: Real> Term<T> {
    fn eval(&self, x: T) -> T {
        match self {
            Term::PoschlTeller { nu, center, scale } => {
                let s = ((x - *center) / *scale).abs();
                let e = (-T::lit(2.0) * s).exp();
                let sech2 = T::lit(4.0) * e / ((T::one() + e) * (T::one() + e));
                -*nu * (*nu + T::one()) / (*scale * *scale) * sech2
            }
            Term::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let u = (x - *center) / *width;
                *amplitude * (-u * u).exp()
            }
            Term::Sampled(spline) => {
                let g = spline.grid();
                if x < g.start || x > g.end() {
                    T::zero()
                } else {
                    spline.eval(x)
                }
            }
        }
    }
}

/// Smooth, compactly supported real potential `q(x)` with `q = 0` for
/// `|x| >= support`.
///
/// The sum of the terms is multiplied by a C^∞ taper that equals one on
/// `|x| <= support - taper` and vanishes from `|x| = support` outward.
#[derive(Debug, Clone)]
pub struct Potential<T> {
    terms: Vec<Term<T>>,
    support: T,
    taper: T,
    min: T,
    max_abs: T,
}

impl<T: Real> Potential<T> {
    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            support: T::zero(),
            taper: T::zero(),
            min: T::zero(),
            max_abs: T::zero(),
        }
    }

    /// Builds a potential from terms; `taper` defaults to `min(1, support/4)`.
    pub fn new(terms: Vec<Term<T>>, support: T, taper: Option<T>) -> Result<Self> {
        if terms.is_empty() {
            return Ok(Self::zero());
        }
        if !(support > T::zero()) || !support.is_finite() {
            return Err(Error::invalid(format!(
                "support radius must be positive, got {support}"
            )));
        }
        let taper = taper.unwrap_or_else(|| T::one().min(support / T::lit(4.0)));
        if !(taper > T::zero()) || taper > support {
            return Err(Error::invalid(format!(
                "taper width {taper} must lie in (0, {support}]"
            )));
        }
        for term in &terms {
            let ok = match term {
                Term::PoschlTeller { nu, scale, center } => {
                    *scale > T::zero() && nu.is_finite() && center.is_finite()
                }
                Term::Gaussian {
                    amplitude,
                    width,
                    center,
                } => *width > T::zero() && amplitude.is_finite() && center.is_finite(),
                Term::Sampled(_) => true,
            };
            if !ok {
                return Err(Error::invalid(format!("invalid potential term {term:?}")));
            }
        }
        let mut p = Self {
            terms,
            support,
            taper,
            min: T::zero(),
            max_abs: T::zero(),
        };
        let n = 8192;
        let mut min = T::zero();
        let mut max_abs = T::zero();
        for i in 0..=n {
            let x = -support + T::lit(2.0) * support * T::of(i) / T::of(n);
            let q = p.eval(x);
            if !q.is_finite() {
                return Err(Error::invalid(format!("potential not finite at x = {x}")));
            }
            min = min.min(q);
            max_abs = max_abs.max(q.abs());
        }
        p.min = min;
        p.max_abs = max_abs;
        Ok(p)
    }

    /// `-nu(nu+1) sech²(x)`, truncated at `support`.
    pub fn poschl_teller(nu: T, support: T) -> Result<Self> {
        Self::new(
            vec![Term::PoschlTeller {
                nu,
                center: T::zero(),
                scale: T::one(),
            }],
            support,
            None,
        )
    }

    /// `amplitude · exp(-(x/width)²)`, truncated at `support`.
    pub fn gaussian(amplitude: T, width: T, support: T) -> Result<Self> {
        Self::new(
            vec![Term::Gaussian {
                amplitude,
                center: T::zero(),
                width,
            }],
            support,
            None,
        )
    }

    /// Sampled values on a uniform ascending grid, spline-interpolated and
    /// tapered to vanish at `support`.
    pub fn sampled(
        grid: UniformGrid<T>,
        values: Vec<T>,
        support: T,
        taper: Option<T>,
    ) -> Result<Self> {
        if values.len() != grid.len || grid.len < 4 {
            return Err(Error::invalid(
                "sampled potential needs at least 4 values matching its grid",
            ));
        }
        Self::new(
            vec![Term::Sampled(CubicSpline::new(grid, values))],
            support,
            taper,
        )
    }

    pub fn with_taper(&self, support: T, taper: Option<T>) -> Result<Self> {
        Self::new(self.terms.clone(), support, taper)
    }

    pub fn with_term(&self, term: Term<T>) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(term);
        Self::new(terms, self.support, Some(self.taper))
    }

    #[inline]
    pub fn support(&self) -> T {
        self.support
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimum of `q` (never above zero).
    pub fn min(&self) -> T {
        self.min
    }

    pub fn max_abs(&self) -> T {
        self.max_abs
    }

    /// Variational upper bound `sqrt(max(0, -min q))` on the decay rates of
    /// bound states.
    pub fn kappa_bound(&self) -> T {
        (-self.min).max(T::zero()).sqrt()
    }

    pub fn eval(&self, x: T) -> T {
        if self.terms.is_empty() || x.abs() >= self.support {
            return T::zero();
        }
        let sum = self.terms.iter().fold(T::zero(), |acc, t| acc + t.eval(x));
        sum * self.taper_factor(x)
    }

    fn taper_factor(&self, x: T) -> T {
        let d = self.support - x.abs();
        if d >= self.taper {
            return T::one();
        }
        if d <= T::zero() {
            return T::zero();
        }
        let s = d / self.taper;
        let a = bump_tail(s);
        let b = bump_tail(T::one() - s);
        a / (a + b)
    }

    pub fn cast<U: Real>(&self) -> Potential<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::PoschlTeller { nu, center, scale } => Term::PoschlTeller {
                    nu: c(*nu),
                    center: c(*center),
                    scale: c(*scale),
                },
                Term::Gaussian {
                    amplitude,
                    center,
                    width,
                } => Term::Gaussian {
                    amplitude: c(*amplitude),
                    center: c(*center),
                    width: c(*width),
                },
                Term::Sampled(s) => {
                    let g = s.grid().cast::<U>();
                    let vals = (0..g.len).map(|i| c(s.eval(s.grid().point(i)))).collect();
                    Term::Sampled(CubicSpline::new(g, vals))
                }
            })
            .collect();
        Potential {
            terms,
            support: c(self.support),
            taper: c(self.taper),
            min: c(self.min),
            max_abs: c(self.max_abs),
        }
    }
}

fn bump_tail<T: Real>(s: T) -> T {
    if s <= T::zero() {
        T::zero()
    } else {
        (-T::one() / s).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_outside_support_and_matches_inside() {
        let q = Potential::<f64>::poschl_teller(1.0, 12.0).unwrap();
        assert_eq!(q.eval(12.0), 0.0);
        assert_eq!(q.eval(-13.5), 0.0);
        let x: f64 = 0.7;
        assert!((q.eval(x) + 2.0 / x.cosh().powi(2)).abs() < 1e-15);
        assert!((q.min() + 2.0).abs() < 1e-6);
        assert!((q.kappa_bound() - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn taper_is_smooth_and_monotone() {
        let q = Potential::<f64>::gaussian(2.0, 3.0, 4.0).unwrap();
        let mut prev = q.eval(3.0);
        for i in 1..=100 {
            let v = q.eval(3.0 + i as f64 * 0.01);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert_eq!(q.eval(4.0), 0.0);
        assert!(q.min() >= 0.0);
    }

    #[test]
    fn zero_potential() {
        let q = Potential::<f64>::zero();
        assert!(q.is_zero());
        assert_eq!(q.eval(0.0), 0.0);
        assert_eq!(q.kappa_bound(), 0.0);
    }
}
