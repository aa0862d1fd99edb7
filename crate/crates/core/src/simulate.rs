//! Finite-difference forward solver for `∂²_t u - Δu + q(x) u = 0`,
//! producing synthetic Cauchy data on `y = 0` and ground truth above it.
//!
//! The grid extends below `y = 0`, so the data line is an interior row and
//! no condition is imposed there; the outer edges are homogeneous Dirichlet
//! and are kept out of reach of the initial disturbance for the whole run.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interp::cubic_stencil;
use crate::reconstruct::{CauchyData, TargetPoint};
use crate::scalar::Real;
use crate::spectral1d::Potential;

/// Support of one initial pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape<T> {
    /// `exp(1 - 1/(1 - ρ²))` with `ρ = |(x, y) - centre| / radius`.
    Bump { x: T, y: T, radius: T },
    /// The same profile in `y` only, constant in `x` (needs periodic sides).
    Layer { y: T, half_width: T },
}

impl<T: Real> Shape<T> {
    pub fn eval(&self, x: T, y: T) -> T {
        let rho2 = match *self {
            Shape::Bump {
                x: cx,
                y: cy,
                radius,
            } => ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius),
            Shape::Layer { y: cy, half_width } => (y - cy) * (y - cy) / (half_width * half_width),
        };
        if rho2 >= T::one() {
            T::zero()
        } else {
            (T::one() - T::one() / (T::one() - rho2)).exp()
        }
    }

    /// Lowest and highest `y` of the support.
    fn y_extent(&self) -> (T, T) {
        match *self {
            Shape::Bump { y, radius, .. } => (y - radius, y + radius),
            Shape::Layer { y, half_width } => (y - half_width, y + half_width),
        }
    }
}

/// Initial displacement and velocity `(a · shape, b · shape)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse<T> {
    pub shape: Shape<T>,
    pub displacement: T,
    pub velocity: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lateral {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone)]
pub struct SimConfig<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_max: T,
    /// Depth of the grid extension below `y = 0`.
    pub y_below: T,
    /// Rows with `0 <= y <= store_y_max` are kept for every time step.
    pub store_y_max: T,
    pub spacing: T,
    pub dt: T,
    pub t_final: T,
    pub potential: Potential<T>,
    pub pulses: Vec<Pulse<T>>,
    pub lateral: Lateral,
}

impl<T: Real> SimConfig<T> {
    /// Rows `y ∈ [0, 3]` recorded over `x ∈ [-6, 6]`, `Δ = 0.02`, `T = 3`,
    /// `Δt = 0.9 Δ/√2`. The grid runs from `y = -3` to `y = 7` so that
    /// pulses supported in `0 < y < 3` stay clear of the outer edges.
    pub fn standard(potential: Potential<T>, pulses: Vec<Pulse<T>>) -> Self {
        let spacing = T::lit(0.02);
        Self {
            x_min: T::lit(-6.0),
            x_max: T::lit(6.0),
            y_max: T::lit(7.0),
            y_below: T::lit(3.0),
            store_y_max: T::lit(3.0),
            spacing,
            dt: cfl_limit(spacing),
            t_final: T::lit(3.0),
            potential,
            pulses,
            lateral: Lateral::Dirichlet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.spacing;
        if !(d > T::zero()) || !(self.t_final > T::zero()) || !(self.dt > T::zero()) {
            return Err(Error::invalid(
                "spacing, dt and final time must be positive",
            ));
        }
        if !(self.x_max > self.x_min) || !(self.y_max > T::zero()) || self.y_below < T::zero() {
            return Err(Error::invalid("empty simulation domain"));
        }
        if !(self.store_y_max >= T::zero()) || self.store_y_max > self.y_max {
            return Err(Error::invalid("stored rows must lie in [0, y_max]"));
        }
        let limit = cfl_limit(d);
        if self.dt > limit * (T::one() + T::lit(1e-12)) {
            return Err(Error::Cfl {
                dt: self.dt.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
        for span in [self.x_max - self.x_min, self.y_max, self.y_below] {
            let n = span / d;
            if (n - n.round()).abs() > T::lit(1e-6) {
                return Err(Error::invalid(format!(
                    "domain extent {span} is not a multiple of the spacing {d}"
                )));
            }
        }
        let reach = self.t_final;
        for p in &self.pulses {
            let (lo, hi) = p.shape.y_extent();
            if !(lo > T::zero()) {
                return Err(Error::invalid(
                    "initial support must stay strictly above y = 0",
                ));
            }
            if self.y_max - hi <= reach {
                return Err(Error::SupportTouchesEdge { edge: "top" });
            }
            if lo + self.y_below <= reach {
                return Err(Error::SupportTouchesEdge { edge: "bottom" });
            }
            match (p.shape, self.lateral) {
                (Shape::Bump { x, radius, .. }, Lateral::Dirichlet) => {
                    if x - radius - self.x_min <= reach || self.x_max - x - radius <= reach {
                        return Err(Error::SupportTouchesEdge { edge: "lateral" });
                    }
                }
                (Shape::Layer { .. }, Lateral::Dirichlet) => {
                    return Err(Error::SupportTouchesEdge { edge: "lateral" });
                }
                (_, Lateral::Periodic) => {}
            }
        }
        Ok(())
    }
}

/// `0.9 Δ/√2`.
pub fn cfl_limit<T: Real>(spacing: T) -> T {
    T::lit(0.9) * spacing / T::SQRT_2()
}

/// Simulated `u` on the stored rows, at every time step.
#[derive(Debug, Clone)]
pub struct WaveField<T> {
    pub config: SimConfig<T>,
    pub x: UniformGrid<T>,
    /// Stored rows, starting at `y = 0`.
    pub y: UniformGrid<T>,
    pub t: UniformGrid<T>,
    /// `u[n][j][i]` flattened.
    pub u: Vec<T>,
    /// Discrete energy between consecutive steps (conserved by the scheme).
    pub energy: Vec<T>,
}

impl<T: Real> WaveField<T> {
    #[inline]
    pub fn value(&self, n: usize, j: usize, i: usize) -> T {
        self.u[(n * self.y.len + j) * self.x.len + i]
    }

    pub fn snapshot(&self, n: usize) -> &[T] {
        let s = self.y.len * self.x.len;
        &self.u[n * s..(n + 1) * s]
    }

    /// `(max E - min E) / max E`.
    pub fn energy_drift(&self) -> T {
        let max = self.energy.iter().fold(T::zero(), |m, e| m.max(*e));
        let min = self.energy.iter().fold(T::infinity(), |m, e| m.min(*e));
        if max > T::zero() {
            (max - min) / max
        } else {
            T::zero()
        }
    }
}

/// Leapfrog in time with the five-point Laplacian; every stored row is kept
/// at every step.
pub fn simulate<T: Real>(config: &SimConfig<T>) -> Result<WaveField<T>> {
    config.validate()?;
    let d = config.spacing;
    let nx = ((config.x_max - config.x_min) / d)
        .round()
        .to_usize()
        .expect("validated")
        + 1;
    let below = (config.y_below / d).round().to_usize().expect("validated");
    let above = (config.y_max / d).round().to_usize().expect("validated");
    let ny = below + above + 1;
    let stored = (config.store_y_max / d + T::lit(1e-9))
        .floor()
        .to_usize()
        .expect("validated")
        + 1;
    let steps = (config.t_final / config.dt)
        .ceil()
        .to_usize()
        .expect("validated")
        .max(1);
    let dt = config.t_final / T::of(steps);

    let xs: Vec<T> = (0..nx).map(|i| config.x_min + T::of(i) * d).collect();
    let row_y = |j: usize| (T::of(j) - T::of(below)) * d;
    let q: Vec<T> = xs.iter().map(|&x| config.potential.eval(x)).collect();
    let periodic = config.lateral == Lateral::Periodic;

    let initial = |amp: fn(&Pulse<T>) -> T| -> Vec<T> {
        let mut v = vec![T::zero(); nx * ny];
        for j in 0..ny {
            let y = row_y(j);
            for i in 0..nx {
                v[j * nx + i] = config
                    .pulses
                    .iter()
                    .fold(T::zero(), |s, p| s + amp(p) * p.shape.eval(xs[i], y));
            }
        }
        v
    };
    let u0 = initial(|p| p.displacement);
    let v0 = initial(|p| p.velocity);

    // A u = -Δ_h u + q u on interior nodes, zero on Dirichlet edges.
    let apply = |u: &[T], out: &mut [T]| {
        let inv = T::one() / (d * d);
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            if j == 0 || j == ny - 1 {
                row.iter_mut().for_each(|v| *v = T::zero());
                return;
            }
            let c = &u[j * nx..(j + 1) * nx];
            let up = &u[(j + 1) * nx..(j + 2) * nx];
            let dn = &u[(j - 1) * nx..j * nx];
            for i in 0..nx {
                let (l, r) = if periodic {
                    // The last column duplicates the first.
                    let l = if i == 0 { c[nx - 2] } else { c[i - 1] };
                    let r = if i == nx - 1 { c[1] } else { c[i + 1] };
                    (l, r)
                } else if i == 0 || i == nx - 1 {
                    row[i] = T::zero();
                    continue;
                } else {
                    (c[i - 1], c[i + 1])
                };
                row[i] = (T::lit(4.0) * c[i] - l - r - up[i] - dn[i]) * inv + q[i] * c[i];
            }
        });
    };
    let area = d * d;
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |s, (p, q)| s + *p * *q) * area;

    let mut prev = u0;
    let mut a = vec![T::zero(); nx * ny];
    apply(&prev, &mut a);
    let half = dt * dt / T::lit(2.0);
    let mut cur: Vec<T> = (0..nx * ny)
        .map(|k| prev[k] + dt * v0[k] - half * a[k])
        .collect();
    enforce_edges(&mut cur, nx, ny, periodic);

    let keep =
        |u: &[T], out: &mut Vec<T>| out.extend_from_slice(&u[below * nx..(below + stored) * nx]);
    let mut record = Vec::with_capacity((steps + 1) * stored * nx);
    keep(&prev, &mut record);
    keep(&cur, &mut record);
    let mut energy = Vec::with_capacity(steps);
    let kinetic = |new: &[T], old: &[T]| {
        new.iter()
            .zip(old)
            .fold(T::zero(), |s, (p, q)| s + (*p - *q) * (*p - *q))
            * area
            / (dt * dt)
    };
    // E_{n+1/2} = ½ (‖(u^{n+1} - u^n)/Δt‖² + <A u^n, u^{n+1}>).
    energy.push((kinetic(&cur, &prev) + dot(&a, &cur)) / T::lit(2.0));
    let mut next = vec![T::zero(); nx * ny];
    for _ in 1..steps {
        apply(&cur, &mut a);
        let dt2 = dt * dt;
        next.par_iter_mut()
            .enumerate()
            .for_each(|(k, v)| *v = T::lit(2.0) * cur[k] - prev[k] - dt2 * a[k]);
        enforce_edges(&mut next, nx, ny, periodic);
        // <A u^n, u^{n+1}> for the step just taken.
        energy.push((kinetic(&next, &cur) + dot(&a, &next)) / T::lit(2.0));
        keep(&next, &mut record);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(WaveField {
        config: config.clone(),
        x: UniformGrid::new(config.x_min, d, nx)?,
        y: UniformGrid {
            start: T::zero(),
            step: d,
            len: stored,
        },
        t: UniformGrid::new(T::zero(), dt, steps + 1)?,
        u: record,
        energy,
    })
}

fn enforce_edges<T: Real>(u: &mut [T], nx: usize, ny: usize, periodic: bool) {
    for i in 0..nx {
        u[i] = T::zero();
        u[(ny - 1) * nx + i] = T::zero();
    }
    for j in 0..ny {
        if periodic {
            u[j * nx + nx - 1] = u[j * nx];
        } else {
            u[j * nx] = T::zero();
            u[j * nx + nx - 1] = T::zero();
        }
    }
}

/// `f = u(·, 0, ·)` and `g = ∂_y u(·, 0, ·)` by the fourth-order one-sided
/// difference `(-25u₀ + 48u₁ - 36u₂ + 16u₃ - 3u₄) / 12Δ`.
pub fn extract_cauchy<T: Real>(field: &WaveField<T>) -> Result<CauchyData<T>> {
    if field.y.len < 5 {
        return Err(Error::TooFewRows(field.y.len));
    }
    let nx = field.x.len;
    let c = [-25.0, 48.0, -36.0, 16.0, -3.0].map(T::lit);
    let scale = T::one() / (T::lit(12.0) * field.y.step);
    let mut f = Vec::with_capacity(nx * field.t.len);
    let mut g = Vec::with_capacity(nx * field.t.len);
    for n in 0..field.t.len {
        let snap = field.snapshot(n);
        f.extend_from_slice(&snap[..nx]);
        for i in 0..nx {
            let s = (0..5).fold(T::zero(), |acc, j| acc + c[j] * snap[j * nx + i]);
            g.push(s * scale);
        }
    }
    CauchyData::new(field.x, field.t, f, g)
}

/// Tricubic interpolation of `u` at each target `(x0, y0, t0)`.
pub fn ground_truth<T: Real>(field: &WaveField<T>, points: &[TargetPoint<T>]) -> Result<Vec<T>> {
    points
        .iter()
        .map(|p| {
            let out = || Error::OutOfRange {
                x: p.x0.to_f64_lossy(),
                y: p.y0.to_f64_lossy(),
                t: p.t0.to_f64_lossy(),
            };
            let (ix, wx) = cubic_stencil(&field.x, p.x0).ok_or_else(out)?;
            let (iy, wy) = cubic_stencil(&field.y, p.y0).ok_or_else(out)?;
            let (it, wt) = cubic_stencil(&field.t, p.t0).ok_or_else(out)?;
            let mut acc = T::zero();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        acc += wt[a] * wy[b] * wx[c] * field.value(it + a, iy + b, ix + c);
                    }
                }
            }
            Ok(acc)
        })
        .collect()
}
