//! Jost solutions `f±(x, k) = e^{±ikx} m±(x, k)` of `-φ'' + qφ = k²φ`.
//!
//! `f₊ = e^{ikx}` for `x >= A` and `f₋ = e^{-ikx}` for `x <= -A`. Both are
//! propagated across the support with a fourth-order Magnus integrator
//! applied to `(f, f')`, with the exponential factor divided out after every
//! step. The propagator of each step has unit determinant, so the Wronskian
//! is preserved to rounding, and the step error does not degrade as `|k|`
//! grows, which matters on the high contours used by the kernels.

use std::sync::Arc;

use num_complex::Complex;

use super::potential::Potential;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// Which Jost solution: `Plus` is normalized at `+∞`, `Minus` at `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy)]
pub struct JostOptions<T> {
    /// Largest Magnus step across the support of `q`.
    pub max_step: T,
}

impl<T: Real> Default for JostOptions<T> {
    fn default() -> Self {
        Self {
            max_step: T::lit(0.01),
        }
    }
}

/// Reduced state `(m, m̃)` with `m = f e^{∓ikx}` and `m̃ = f' e^{∓ikx}`.
pub type State<T> = [Complex<T>; 2];

/// Precomputed mesh and potential samples for repeated Jost solves. Cheap to
/// clone; solutions keep a shared handle to the mesh.
#[derive(Debug, Clone)]
pub struct JostSolver<T> {
    mesh: Arc<Mesh<T>>,
}

#[derive(Debug)]
struct Mesh<T> {
    potential: Potential<T>,
    support: T,
    step: T,
    intervals: usize,
    /// `q` at the two Gauss points of each mesh interval, in ascending `x`.
    gauss_q: Vec<[T; 2]>,
}

impl<T: Real> JostSolver<T> {
    pub fn new(potential: &Potential<T>, options: JostOptions<T>) -> Result<Self> {
        if !(options.max_step > T::zero()) {
            return Err(Error::invalid("Jost mesh step must be positive"));
        }
        let support = potential.support();
        // An even interval count puts x = 0 on the mesh.
        let intervals = if potential.is_zero() {
            0
        } else {
            let n = (T::lit(2.0) * support / options.max_step)
                .ceil()
                .to_usize()
                .unwrap_or(2)
                .max(2);
            n + n % 2
        };
        let step = if intervals == 0 {
            T::zero()
        } else {
            T::lit(2.0) * support / T::of(intervals)
        };
        let (c1, c2) = gauss_offsets::<T>();
        let gauss_q = (0..intervals)
            .map(|i| {
                let x = -support + T::of(i) * step;
                [potential.eval(x + c1 * step), potential.eval(x + c2 * step)]
            })
            .collect();
        let mesh = Mesh {
            potential: potential.clone(),
            support,
            step,
            intervals,
            gauss_q,
        };
        Ok(Self {
            mesh: Arc::new(mesh),
        })
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.mesh.potential
    }

    pub fn support(&self) -> T {
        self.mesh.support
    }

    /// Mesh node `i`, `i = 0..node_count()`.
    #[inline]
    pub fn node(&self, i: usize) -> T {
        self.mesh.node(i)
    }

    /// Mesh spacing (zero for the zero potential).
    pub fn step(&self) -> T {
        self.mesh.step
    }

    pub fn node_count(&self) -> usize {
        self.mesh.intervals + 1
    }

    /// Integrates both Jost solutions at spectral parameter `k`.
    pub fn solve(&self, k: Complex<T>) -> Result<JostSolution<T>> {
        if k.im < T::zero() {
            return Err(Error::NegativeImaginaryPart {
                re: k.re.to_f64_lossy(),
                im: k.im.to_f64_lossy(),
            });
        }
        if k.norm() == T::zero() {
            return Err(Error::invalid(
                "Jost solutions are not normalizable at k = 0",
            ));
        }
        let ik = cplx(-k.im, k.re);
        let mesh = &*self.mesh;
        let n = mesh.intervals;
        let mut plus = vec![[Complex::new(T::zero(), T::zero()); 2]; n + 1];
        let mut minus = plus.clone();

        plus[n] = [Complex::new(T::one(), T::zero()), ik];
        minus[0] = [Complex::new(T::one(), T::zero()), -ik];
        if n > 0 {
            let k2 = k * k;
            let down = StepConsts::new(k, -mesh.step, Side::Plus);
            let up = StepConsts::new(k, mesh.step, Side::Minus);
            for i in (0..n).rev() {
                let [qa, qb] = mesh.gauss_q[i];
                // Descending through interval i meets the upper Gauss point first.
                plus[i] = magnus_step(&down, k2, qb, qa, plus[i + 1]);
            }
            for i in 0..n {
                let [qa, qb] = mesh.gauss_q[i];
                minus[i + 1] = magnus_step(&up, k2, qa, qb, minus[i]);
            }
        }
        let mid = n / 2;
        let w = plus[mid][0] * minus[mid][1] - plus[mid][1] * minus[mid][0];
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::NonConvergent(format!(
                "Jost integration overflowed at k = {k}"
            )));
        }
        Ok(JostSolution {
            mesh: self.mesh.clone(),
            k,
            ik,
            plus,
            minus,
            wronskian: w,
        })
    }
}

impl<T: Real> Mesh<T> {
    #[inline]
    fn node(&self, i: usize) -> T {
        -self.support + T::of(i) * self.step
    }
}

/// Both Jost solutions at one spectral parameter, sampled on the mesh.
#[derive(Debug, Clone)]
pub struct JostSolution<T> {
    mesh: Arc<Mesh<T>>,
    k: Complex<T>,
    ik: Complex<T>,
    plus: Vec<State<T>>,
    minus: Vec<State<T>>,
    wronskian: Complex<T>,
}

impl<T: Real> JostSolution<T> {
    pub fn k(&self) -> Complex<T> {
        self.k
    }

    /// `W(f₊, f₋) = f₊ f₋' - f₊' f₋`; `-2ik` when `q ≡ 0`.
    pub fn wronskian(&self) -> Complex<T> {
        self.wronskian
    }

    /// Wronskian evaluated from the stored states at mesh node `i`.
    pub fn wronskian_at_node(&self, i: usize) -> Complex<T> {
        let p = self.plus[i];
        let m = self.minus[i];
        p[0] * m[1] - p[1] * m[0]
    }

    pub fn node_count(&self) -> usize {
        self.plus.len()
    }

    pub fn node(&self, i: usize) -> T {
        self.mesh.node(i)
    }

    pub fn plus_at_node(&self, i: usize) -> State<T> {
        self.plus[i]
    }

    pub fn minus_at_node(&self, i: usize) -> State<T> {
        self.minus[i]
    }

    /// `(m₊, f₊' e^{-ikx})` at `x`.
    pub fn plus_state(&self, x: T) -> State<T> {
        let s = &*self.mesh;
        let a = s.support;
        let one = Complex::new(T::one(), T::zero());
        if x >= a || s.intervals == 0 && x >= T::zero() {
            return [one, self.ik];
        }
        if x <= -a {
            let [d1, d2] = self.plus_exterior();
            let e = (-self.ik * (x + a) * T::lit(2.0)).exp();
            return [d1 + d2 * e, self.ik * (d1 - d2 * e)];
        }
        let pos = (x + a) / s.step;
        let j = pos.ceil().to_usize().unwrap_or(0).min(s.intervals);
        let dx = x - s.node(j);
        if dx == T::zero() {
            return self.plus[j];
        }
        partial_step(s, self.k, Side::Plus, s.node(j), dx, self.plus[j])
    }

    /// `(m₋, f₋' e^{ikx})` at `x`.
    pub fn minus_state(&self, x: T) -> State<T> {
        let s = &*self.mesh;
        let a = s.support;
        let one = Complex::new(T::one(), T::zero());
        if x <= -a || s.intervals == 0 && x <= T::zero() {
            return [one, -self.ik];
        }
        if x >= a {
            let [c2, c1] = self.minus_exterior();
            let e = (self.ik * (x - a) * T::lit(2.0)).exp();
            return [c2 + c1 * e, self.ik * (c1 * e - c2)];
        }
        let pos = (x + a) / s.step;
        let j = pos.floor().to_usize().unwrap_or(0).min(s.intervals);
        let dx = x - s.node(j);
        if dx == T::zero() {
            return self.minus[j];
        }
        partial_step(s, self.k, Side::Minus, s.node(j), dx, self.minus[j])
    }

    pub fn m(&self, side: Side, x: T) -> Complex<T> {
        match side {
            Side::Plus => self.plus_state(x)[0],
            Side::Minus => self.minus_state(x)[0],
        }
    }

    /// `f±(x)`; may overflow for large `|Im k · x|`.
    pub fn f(&self, side: Side, x: T) -> Complex<T> {
        match side {
            Side::Plus => (self.ik * x).exp() * self.plus_state(x)[0],
            Side::Minus => (-self.ik * x).exp() * self.minus_state(x)[0],
        }
    }

    /// `(d₁, d̃₂)` with `f₊ = d₁ e^{ikx} + d̃₂ e^{-2ikA} e^{-ikx}` for `x <= -A`.
    pub fn plus_exterior(&self) -> [Complex<T>; 2] {
        let [m, mt] = self.plus[0];
        let r = mt / self.ik;
        let half = T::lit(0.5);
        [(m + r) * half, (m - r) * half]
    }

    /// `(c₂, c̃₁)` with `f₋ = c̃₁ e^{-2ikA} e^{ikx} + c₂ e^{-ikx}` for `x >= A`.
    pub fn minus_exterior(&self) -> [Complex<T>; 2] {
        let [m, mt] = self.minus[self.minus.len() - 1];
        let r = mt / self.ik;
        let half = T::lit(0.5);
        [(m - r) * half, (m + r) * half]
    }

    /// Green's function `G_{k²}(x0, x) = f₊(x>) f₋(x<) / W` of
    /// `-∂²_x + q - k²`.
    pub fn green(&self, x0: T, x: T) -> Complex<T> {
        let (hi, lo) = if x >= x0 { (x, x0) } else { (x0, x) };
        let phase = (self.ik * (hi - lo)).exp();
        phase * self.plus_state(hi)[0] * self.minus_state(lo)[0] / self.wronskian
    }

    /// Green's function from a fixed source point to many field points.
    pub fn green_row(&self, x0: T, xs: &[T]) -> Vec<Complex<T>> {
        let p0 = self.plus_state(x0)[0];
        let m0 = self.minus_state(x0)[0];
        xs.iter()
            .map(|&x| {
                if x >= x0 {
                    (self.ik * (x - x0)).exp() * self.plus_state(x)[0] * m0 / self.wronskian
                } else {
                    (self.ik * (x0 - x)).exp() * p0 * self.minus_state(x)[0] / self.wronskian
                }
            })
            .collect()
    }
}

/// Evaluates `m±(x, k)` with a freshly built solver.
pub fn jost_m<T: Real>(q: &Potential<T>, k: Complex<T>, side: Side, x: T) -> Result<Complex<T>> {
    let solver = JostSolver::new(q, JostOptions::default())?;
    let sol = solver.solve(k)?;
    Ok(sol.m(side, x))
}

fn gauss_offsets<T: Real>() -> (T, T) {
    let r = T::lit(3.0).sqrt() / T::lit(6.0);
    (T::lit(0.5) - r, T::lit(0.5) + r)
}

/// Constants of a Magnus step of fixed signed length.
struct StepConsts<T> {
    delta: T,
    /// `∓ik δ`, the exponent removing `e^{±ikx}` growth over the step.
    shift: Complex<T>,
    commutator: T,
}

impl<T: Real> StepConsts<T> {
    fn new(k: Complex<T>, delta: T, side: Side) -> Self {
        let ik = cplx(-k.im, k.re);
        let shift = match side {
            Side::Plus => -ik * delta,
            Side::Minus => ik * delta,
        };
        let commutator = T::lit(3.0).sqrt() * delta * delta / T::lit(12.0);
        Self {
            delta,
            shift,
            commutator,
        }
    }
}

/// One fourth-order Magnus step for `(f, f')' = [[0, 1], [q - k², 0]] (f, f')`
/// applied to the reduced state. `q1`, `q2` are `q` at the first and second
/// Gauss points in the direction of travel.
#[inline]
fn magnus_step<T: Real>(
    c: &StepConsts<T>,
    k2: Complex<T>,
    q1: T,
    q2: T,
    state: State<T>,
) -> State<T> {
    let half = T::lit(0.5);
    let abar = Complex::new((q1 + q2) * half, T::zero()) - k2;
    let d = Complex::new(c.commutator * (q1 - q2), T::zero());
    let delta = c.delta;
    let lower = abar * delta;
    let mu2 = d * d + lower * delta;
    let (ch, shc) = scaled_cosh_sinhc(mu2, c.shift);
    // exp(Ω) = cosh μ I + (sinh μ / μ) Ω with Ω = [[d, δ], [δ ā, -d]].
    let [m, mt] = state;
    [
        ch * m + shc * (d * m + mt * delta),
        ch * mt + shc * (lower * m - d * mt),
    ]
}

/// `e^{s} cosh μ` and `e^{s} sinh μ / μ` for `μ = sqrt(mu2)`.
#[inline]
fn scaled_cosh_sinhc<T: Real>(mu2: Complex<T>, s: Complex<T>) -> (Complex<T>, Complex<T>) {
    let small = T::lit(1e-4);
    if mu2.norm() < small {
        let one = Complex::new(T::one(), T::zero());
        let es = s.exp();
        let c = one + mu2 / T::lit(2.0) * (one + mu2 / T::lit(12.0) * (one + mu2 / T::lit(30.0)));
        let sh = one + mu2 / T::lit(6.0) * (one + mu2 / T::lit(20.0) * (one + mu2 / T::lit(42.0)));
        return (es * c, es * sh);
    }
    let mu = mu2.sqrt();
    let e1 = (s + mu).exp();
    let e2 = (s - mu).exp();
    let half = T::lit(0.5);
    ((e1 + e2) * half, (e1 - e2) * half / mu)
}

/// Magnus step of arbitrary length `dx` starting from node `x0`, with `q`
/// evaluated directly at the Gauss points.
fn partial_step<T: Real>(
    s: &Mesh<T>,
    k: Complex<T>,
    side: Side,
    x0: T,
    dx: T,
    state: State<T>,
) -> State<T> {
    let (c1, c2) = gauss_offsets::<T>();
    let q1 = s.potential.eval(x0 + c1 * dx);
    let q2 = s.potential.eval(x0 + c2 * dx);
    let consts = StepConsts::new(k, dx, side);
    magnus_step(&consts, k * k, q1, q2, state)
}
