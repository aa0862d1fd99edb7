use num_complex::Complex;
use rayon::prelude::*;

use super::data::{CauchyData, HSchedule, Pipeline, ReconstructionResult, TargetPoint};
use super::mode::TimeRule;
use super::schedule::extrapolate_h;
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quadrature::trapezoid_weights;
use crate::scalar::{cplx, Real};
use crate::spectral1d::transform::{k_nodes, nyquist_cap};
use crate::spectral1d::{
    bound_states_with, BoundState, JostOptions, JostSolver, ModeSampler, Potential,
};

/// Tolerance on `e^{-hk² + k y0}` defining the spectral cutoff.
const CUTOFF_TOL: f64 = 1e-10;

/// Smallest `k` with `-h k² + k y0 <= ln(tol)`, `tol = 1e-10`.
pub fn spectral_kmax<T: Real>(h: T, y0: T) -> T {
    let l = -T::lit(CUTOFF_TOL).ln();
    (y0 + (y0 * y0 + T::lit(4.0) * h * l).sqrt()) / (T::lit(2.0) * h)
}

/// Everything the spectral pipeline needs that does not depend on the data
/// values: the continuous-spectrum `k` rule, the bound states and one time
/// rule per target.
///
/// A single pass over the `k` nodes serves all targets and all levels of
/// their schedules. The `k` rule is cut off for the finest level; coarser
/// levels simply see negligible contributions near the end.
#[derive(Debug, Clone)]
pub struct SpectralPlan<T> {
    sampler: ModeSampler<T>,
    x: UniformGrid<T>,
    t: UniformGrid<T>,
    x_weights: Vec<T>,
    k: Vec<T>,
    k_weights: Vec<T>,
    bound: Vec<BoundState<T>>,
    bound_samples: Vec<Vec<T>>,
    targets: Vec<TargetPoint<T>>,
    levels: Vec<Vec<T>>,
    rules: Vec<TimeRule<T>>,
}

impl<T: Real> SpectralPlan<T> {
    /// Plans reconstructions at `targets`, each with its own list of levels,
    /// from data on the grids `x` and `t`.
    pub fn new(
        q: &Potential<T>,
        x: UniformGrid<T>,
        t: UniformGrid<T>,
        targets: &[(TargetPoint<T>, Vec<T>)],
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::invalid("no reconstruction targets"));
        }
        let mut kmax = T::zero();
        let mut rules = Vec::with_capacity(targets.len());
        for (p, levels) in targets {
            p.check_window(&x, &t, None)?;
            if levels.is_empty() || levels.iter().any(|h| !(*h > T::zero())) {
                return Err(Error::invalid("regularization levels must be positive"));
            }
            for &h in levels {
                kmax = kmax.max(spectral_kmax(h, p.y0));
            }
            rules.push(TimeRule::new(&t, p.y0, p.t0, t.step)?);
        }
        let kmax = nyquist_cap(kmax, x.step);
        let solver = JostSolver::new(q, JostOptions::default())?;
        let x_extent = x.start.abs().max(x.end().abs());
        let (k, k_weights) = k_nodes(kmax, x_extent, solver.support())?;
        let abscissae: Vec<T> = targets.iter().map(|(p, _)| p.x0).collect();
        let mut points = x.points();
        points.extend_from_slice(&abscissae);
        let bound = bound_states_with(&solver)?;
        let bound_samples = bound.iter().map(|s| s.sample(&points)).collect();
        Ok(Self {
            sampler: ModeSampler::on_grid(solver, x, abscissae),
            x,
            t,
            x_weights: trapezoid_weights(x.len, x.step),
            k,
            k_weights,
            bound,
            bound_samples,
            targets: targets.iter().map(|(p, _)| *p).collect(),
            levels: targets.iter().map(|(_, l)| l.clone()).collect(),
            rules,
        })
    }

    /// Plan for one target with its default (or given) schedule.
    pub fn single(
        q: &Potential<T>,
        x: UniformGrid<T>,
        t: UniformGrid<T>,
        target: TargetPoint<T>,
        schedule: &HSchedule<T>,
    ) -> Result<Self> {
        schedule.validate()?;
        Self::new(q, x, t, &[(target, schedule.levels())])
    }

    pub fn k_nodes(&self) -> &[T] {
        &self.k
    }

    pub fn bound_states(&self) -> &[BoundState<T>] {
        &self.bound
    }

    fn check_data(&self, data: &CauchyData<T>) -> Result<()> {
        if data.x != self.x || data.t != self.t {
            return Err(Error::invalid("data grid differs from the planned grid"));
        }
        let rows = self.rows();
        let mut max = T::zero();
        let mut edge = T::zero();
        for it in rows {
            for row in [data.f_row(it), data.g_row(it)] {
                max = row.iter().fold(max, |m, v| m.max(v.abs()));
                edge = edge.max(row[0].abs()).max(row[row.len() - 1].abs());
            }
        }
        if edge > T::lit(1e-8) * max {
            return Err(Error::Truncation {
                edge: edge.to_f64_lossy(),
                max: max.to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn rows(&self) -> std::ops::Range<usize> {
        let first = self
            .rules
            .iter()
            .map(|r| r.rows().start)
            .min()
            .expect("targets");
        let last = self
            .rules
            .iter()
            .map(|r| r.rows().end)
            .max()
            .expect("targets");
        first..last
    }

    /// `Σ_j ∫ [∂_y r f̂_j + r ĝ_j] dt · φ_j(x0)` for every target, at one
    /// spectral component with sampled eigenfunctions `phis` (data grid
    /// points followed by target abscissae) and spectral parameter `k`.
    fn component(
        &self,
        data: &CauchyData<T>,
        k: Complex<T>,
        phis: &[&[Complex<T>]],
    ) -> Vec<Complex<T>> {
        let rows = self.rows();
        let nx = self.x.len;
        let zero = cplx(T::zero(), T::zero());
        // Projections onto each eigenfunction, for every row in use.
        let mut fhat = vec![vec![zero; rows.len()]; phis.len()];
        let mut ghat = vec![vec![zero; rows.len()]; phis.len()];
        for (j, phi) in phis.iter().enumerate() {
            let a: Vec<Complex<T>> = phi[..nx]
                .iter()
                .zip(&self.x_weights)
                .map(|(p, w)| p.conj() * *w)
                .collect();
            for (r, it) in rows.clone().enumerate() {
                let (mut sf, mut sg) = (zero, zero);
                for ((fv, gv), av) in data.f_row(it).iter().zip(data.g_row(it)).zip(&a) {
                    sf += *av * *fv;
                    sg += *av * *gv;
                }
                fhat[j][r] = sf;
                ghat[j][r] = sg;
            }
        }
        self.rules
            .iter()
            .enumerate()
            .map(|(n, rule)| {
                let span = rule.rows();
                let off = span.start - rows.start;
                let len = span.len();
                let mut acc = zero;
                for (j, phi) in phis.iter().enumerate() {
                    let f = rule.at_nodes(&fhat[j][off..off + len]);
                    let g = rule.at_nodes(&ghat[j][off..off + len]);
                    acc += rule.integral(k, &f, &g) * phi[nx + n];
                }
                acc
            })
            .collect()
    }

    /// Regularized values `u_h(x0, y0, t0)` per target and level.
    pub fn regularized(&self, data: &CauchyData<T>) -> Result<Vec<Vec<T>>> {
        self.check_data(data)?;
        let continuous = self
            .k
            .par_iter()
            .map(|&k| {
                let (p1, p2) = self.sampler.sample(k)?;
                Ok(self.component(data, cplx(k, T::zero()), &[&p1, &p2]))
            })
            .collect::<Result<Vec<_>>>()?;
        let discrete: Vec<Vec<Complex<T>>> = self
            .bound
            .iter()
            .zip(&self.bound_samples)
            .map(|(s, samples)| {
                let phi: Vec<Complex<T>> = samples.iter().map(|&v| cplx(v, T::zero())).collect();
                self.component(data, cplx(T::zero(), s.kappa), &[&phi])
            })
            .collect();
        let mut out = Vec::with_capacity(self.targets.len());
        for (n, (p, levels)) in self.targets.iter().zip(&self.levels).enumerate() {
            let boundary =
                (data.f_at(p.x0, p.t0 + p.y0)? + data.f_at(p.x0, p.t0 - p.y0)?) / T::lit(2.0);
            let values = levels
                .iter()
                .map(|&h| {
                    let mut acc = cplx(T::zero(), T::zero());
                    for ((k, w), c) in self.k.iter().zip(&self.k_weights).zip(&continuous) {
                        acc += c[n] * (*w * (-h * *k * *k).exp());
                    }
                    for (s, c) in self.bound.iter().zip(&discrete) {
                        acc += c[n] * (h * s.kappa * s.kappa).exp();
                    }
                    boundary + acc.re
                })
                .collect();
            out.push(values);
        }
        Ok(out)
    }

    /// Regularized values and the quasi-optimal choice for every target.
    pub fn run(&self, data: &CauchyData<T>) -> Result<Vec<ReconstructionResult<T>>> {
        let values = self.regularized(data)?;
        self.targets
            .iter()
            .zip(&self.levels)
            .zip(values)
            .map(|((p, levels), v)| {
                let (value, error_estimate, selected) = extrapolate_h(&v)?;
                Ok(ReconstructionResult {
                    target: *p,
                    value,
                    levels: levels.clone(),
                    per_level: v,
                    selected,
                    error_estimate,
                    pipeline: Pipeline::Spectral,
                })
            })
            .collect()
    }
}

/// `u_h(x0, y0, t0)` by the spectral pipeline at a single level `h`.
pub fn spectral_reconstruct<T: Real>(
    data: &CauchyData<T>,
    q: &Potential<T>,
    target: TargetPoint<T>,
    h: T,
) -> Result<T> {
    let plan = SpectralPlan::new(q, data.x, data.t, &[(target, vec![h])])?;
    Ok(plan.regularized(data)?[0][0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kmax_bounds_the_damped_growth() {
        let (h, y0) = (0.01, 0.5);
        let k = spectral_kmax(h, y0);
        assert!((-h * k * k + k * y0 - CUTOFF_TOL.ln()).abs() < 1e-9);
    }

    #[test]
    fn zero_data_give_zero() {
        let x = UniformGrid::new(-3.0, 0.05, 121).unwrap();
        let t = UniformGrid::new(0.0, 0.05, 41).unwrap();
        let data = CauchyData::zeros(x, t).unwrap();
        let p = TargetPoint::new(0.2, 0.5, 1.0).unwrap();
        assert_eq!(
            spectral_reconstruct(&data, &Potential::zero(), p, 0.05).unwrap(),
            0.0
        );
    }

    #[test]
    fn rejects_laterally_unbounded_data() {
        let x = UniformGrid::new(-3.0, 0.05, 121).unwrap();
        let t = UniformGrid::new(0.0, 0.05, 41).unwrap();
        let data = CauchyData::from_fn(x, t, |_, t: f64| t.cos(), |_, _| 0.0).unwrap();
        let p = TargetPoint::new(0.0, 0.5, 1.0).unwrap();
        assert!(matches!(
            spectral_reconstruct(&data, &Potential::zero(), p, 0.05),
            Err(Error::Truncation { .. })
        ));
    }
}
