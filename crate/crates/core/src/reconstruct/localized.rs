use rayon::prelude::*;

use super::data::{CauchyData, HSchedule, Pipeline, ReconstructionResult, TargetPoint};
use super::mode::TimeRule;
use super::schedule::extrapolate_h;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interp::cubic_stencil;
use crate::kernels::{KernelEvaluator, KernelGrid};
use crate::quadrature::simpson_weights;
use crate::scalar::Real;
use crate::spectral1d::Potential;

/// Relative accuracy of the kernel tables, against the size of `K_h` in the
/// light disk.
const KERNEL_TOL: f64 = 1e-12;

/// `ε = 0.25 y0`, reduced so that the window stays inside the data.
pub fn default_epsilon<T: Real>(target: &TargetPoint<T>, x: &UniformGrid<T>) -> T {
    let room = (target.x0 - x.start).min(x.end() - target.x0) - target.y0;
    (T::lit(0.25) * target.y0).min(room)
}

/// Node spacing that resolves `K_h` at level `h`: the kernel's spectrum in
/// `x` is concentrated below `y0/2h + √((L + 28)/h)` with `L = y0²/4h`, and
/// the composite Simpson rule is exact up to aliasing at `π/step`.
fn node_spacing<T: Real>(h: T, y0: T) -> T {
    let l = y0 * y0 / (T::lit(4.0) * h);
    T::PI() / (y0 / (T::lit(2.0) * h) + ((l + T::lit(28.0)) / h).sqrt())
}

#[derive(Debug, Clone)]
struct Layer<T> {
    rule: TimeRule<T>,
    x_weights: Vec<T>,
    x_stencils: Vec<(usize, [T; 4])>,
    kernel: KernelGrid<T>,
}

/// Kernel tables for one target over a list of regularization levels.
///
/// Building the plan is the expensive part; applying it to data sets on the
/// same grid (for example clean and noisy versions) is cheap.
#[derive(Debug, Clone)]
pub struct LocalizedPlan<T> {
    target: TargetPoint<T>,
    eps: T,
    x: UniformGrid<T>,
    t: UniformGrid<T>,
    levels: Vec<T>,
    layers: Vec<Layer<T>>,
}

impl<T: Real> LocalizedPlan<T> {
    pub fn new(
        evaluator: &KernelEvaluator<T>,
        x: UniformGrid<T>,
        t: UniformGrid<T>,
        target: TargetPoint<T>,
        eps: T,
        levels: &[T],
    ) -> Result<Self> {
        if !(eps > T::zero()) {
            return Err(Error::invalid(format!(
                "window margin ε must be positive, got {eps}"
            )));
        }
        if levels.is_empty() || levels.iter().any(|h| !(*h > T::zero())) {
            return Err(Error::invalid("regularization levels must be positive"));
        }
        target.check_window(&x, &t, Some(eps))?;
        let reach = target.y0 + eps;
        let layers = levels
            .iter()
            .map(|&h| {
                let step = node_spacing(h, target.y0).min(x.step);
                let xg = UniformGrid::covering_even(target.x0 - reach, target.x0 + reach, step)?;
                let mut xs = xg.points();
                // Keep the outermost nodes inside the data despite rounding.
                xs[0] = xs[0].max(x.start);
                let last = xs.len() - 1;
                xs[last] = xs[last].min(x.end());
                let x_stencils = xs
                    .iter()
                    .map(|&v| {
                        cubic_stencil(&x, v)
                            .ok_or_else(|| Error::invalid("window node outside data"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let rule = TimeRule::new(&t, target.y0, target.t0, step)?;
                let kernel = evaluator.kernel_grid(
                    target.x0,
                    target.y0,
                    h,
                    &xs,
                    rule.offsets(),
                    T::lit(KERNEL_TOL),
                )?;
                Ok(Layer {
                    x_weights: simpson_weights(xs.len(), xg.step),
                    x_stencils,
                    rule,
                    kernel,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            target,
            eps,
            x,
            t,
            levels: levels.to_vec(),
            layers,
        })
    }

    /// Plan with the default schedule for the target's depth.
    pub fn with_schedule(
        q: &Potential<T>,
        x: UniformGrid<T>,
        t: UniformGrid<T>,
        target: TargetPoint<T>,
        eps: T,
        schedule: &HSchedule<T>,
    ) -> Result<Self> {
        schedule.validate()?;
        let evaluator = KernelEvaluator::new(q)?;
        Self::new(&evaluator, x, t, target, eps, &schedule.levels())
    }

    pub fn target(&self) -> TargetPoint<T> {
        self.target
    }

    pub fn epsilon(&self) -> T {
        self.eps
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    /// Total Jost solves spent on the kernel tables.
    pub fn solves(&self) -> usize {
        self.layers.iter().map(|l| l.kernel.solves).sum()
    }

    /// Regularized values `u_h(x0, y0, t0)` per level.
    pub fn regularized(&self, data: &CauchyData<T>) -> Result<Vec<T>> {
        if data.x != self.x || data.t != self.t {
            return Err(Error::invalid("data grid differs from the planned grid"));
        }
        let p = self.target;
        let boundary =
            (data.f_at(p.x0, p.t0 + p.y0)? + data.f_at(p.x0, p.t0 - p.y0)?) / T::lit(2.0);
        Ok(self
            .layers
            .par_iter()
            .map(|layer| boundary + layer.integrate(data))
            .collect())
    }

    pub fn run(&self, data: &CauchyData<T>) -> Result<ReconstructionResult<T>> {
        let per_level = self.regularized(data)?;
        let (value, error_estimate, selected) = extrapolate_h(&per_level)?;
        Ok(ReconstructionResult {
            target: self.target,
            value,
            levels: self.levels.clone(),
            per_level,
            selected,
            error_estimate,
            pipeline: Pipeline::Localized,
        })
    }
}

impl<T: Real> Layer<T> {
    /// `∬ [K^D f + K^N g] dx dt` over the window.
    fn integrate(&self, data: &CauchyData<T>) -> T {
        let rows = self.rule.rows();
        let nx = self.x_stencils.len();
        // Interpolate in x on every row in use, then in t at the nodes.
        let across = |field: fn(&CauchyData<T>, usize) -> &[T]| -> Vec<Vec<T>> {
            let per_row: Vec<Vec<T>> = rows
                .clone()
                .map(|it| {
                    let row = field(data, it);
                    self.x_stencils
                        .iter()
                        .map(|(i, w)| {
                            w[0] * row[*i]
                                + w[1] * row[i + 1]
                                + w[2] * row[i + 2]
                                + w[3] * row[i + 3]
                        })
                        .collect()
                })
                .collect();
            (0..nx)
                .map(|ix| {
                    let series: Vec<T> = per_row.iter().map(|r| r[ix]).collect();
                    self.rule.at_nodes(&series)
                })
                .collect()
        };
        let f = across(CauchyData::f_row);
        let g = across(CauchyData::g_row);
        let mut total = T::zero();
        for (it, wt) in self.rule.weights().iter().enumerate() {
            let mut row = T::zero();
            for ix in 0..nx {
                let (kd, kn) = self.kernel.at(it, ix);
                row += self.x_weights[ix] * (kd * f[ix][it] + kn * g[ix][it]);
            }
            total += *wt * row;
        }
        total
    }
}

/// `u_h(x0, y0, t0)` by the localized pipeline at a single level `h` with
/// window margin `ε`.
pub fn localized_reconstruct<T: Real>(
    data: &CauchyData<T>,
    q: &Potential<T>,
    target: TargetPoint<T>,
    h: T,
    eps: T,
) -> Result<T> {
    let evaluator = KernelEvaluator::new(q)?;
    let plan = LocalizedPlan::new(&evaluator, data.x, data.t, target, eps, &[h])?;
    Ok(plan.regularized(data)?[0])
}
