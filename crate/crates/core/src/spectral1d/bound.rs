use rayon::prelude::*;

use super::jost::{JostOptions, JostSolution, JostSolver};
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::quadrature::simpson_weights;
use crate::scalar::{cplx, Real};

/// Eigenfunction of `L` with eigenvalue `-κ²`, normalized in `L₂`.
///
/// `φ₀` is `a₊ f₊(·, iκ)` on `x >= 0` and `a₋ f₋(·, iκ)` on `x < 0`, so
/// both halves are evaluated from the solution that decays there.
#[derive(Debug, Clone)]
pub struct BoundState<T> {
    pub kappa: T,
    /// `‖φ₀‖` recomputed by quadrature after normalization.
    pub norm: T,
    jost: JostSolution<T>,
    scale_plus: T,
    scale_minus: T,
}

impl<T: Real> BoundState<T> {
    pub fn eval(&self, x: T) -> T {
        if x >= T::zero() {
            self.scale_plus * (-self.kappa * x).exp() * self.jost.plus_state(x)[0].re
        } else {
            self.scale_minus * (self.kappa * x).exp() * self.jost.minus_state(x)[0].re
        }
    }

    pub fn sample(&self, xs: &[T]) -> Vec<T> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// The same state with the opposite (equally valid) sign convention.
    pub fn negated(&self) -> Self {
        Self {
            scale_plus: -self.scale_plus,
            scale_minus: -self.scale_minus,
            ..self.clone()
        }
    }

    pub fn eigenvalue(&self) -> T {
        -self.kappa * self.kappa
    }
}

/// Wronskian `W(f₊, f₋)` at `k = iκ`, real for real `q`.
fn wronskian_imag_axis<T: Real>(solver: &JostSolver<T>, kappa: T) -> Result<T> {
    Ok(solver.solve(cplx(T::zero(), kappa))?.wronskian().re)
}

/// All bound states of `q`, ordered by decreasing `κ` (increasing energy).
pub fn find_bound_states<T: Real>(q: &Potential<T>) -> Result<Vec<BoundState<T>>> {
    let solver = JostSolver::new(q, JostOptions::default())?;
    bound_states_with(&solver)
}

pub fn bound_states_with<T: Real>(solver: &JostSolver<T>) -> Result<Vec<BoundState<T>>> {
    let q = solver.potential();
    if q.min() >= T::zero() {
        return Ok(Vec::new());
    }
    let bound = q.kappa_bound() + T::lit(1e-9);
    let step = T::lit(0.01).min(bound / T::lit(100.0));
    let n = (bound / step).ceil().to_usize().unwrap_or(1).max(1);
    let kappas: Vec<T> = (1..=n).map(|j| T::of(j) * step).collect();
    let ws = kappas
        .par_iter()
        .map(|&kappa| wronskian_imag_axis(solver, kappa))
        .collect::<Result<Vec<T>>>()?;

    let mut roots = Vec::new();
    for j in 0..n - 1 {
        let (wa, wb) = (ws[j], ws[j + 1]);
        if wa == T::zero() {
            roots.push(kappas[j]);
        } else if wa * wb < T::zero() {
            roots.push(bisect(solver, kappas[j], kappas[j + 1], wa)?);
        } else if j > 0 {
            let w = wa.abs();
            let scale = T::lit(2.0) * kappas[j];
            let isolated = ws[j - 1] * wa > T::zero() && wa * wb > T::zero();
            if isolated && w < ws[j - 1].abs() && w < wb.abs() && w < T::lit(1e-6) * scale {
                return Err(Error::IllConditioned {
                    kappa: kappas[j].to_f64_lossy(),
                    w: w.to_f64_lossy(),
                });
            }
        }
    }
    roots.sort_by(|a, b| b.partial_cmp(a).expect("finite roots"));
    roots
        .into_iter()
        .map(|kappa| normalize(solver, kappa))
        .collect()
}

fn bisect<T: Real>(solver: &JostSolver<T>, mut lo: T, mut hi: T, mut w_lo: T) -> Result<T> {
    let (lo0, hi0) = (lo, hi);
    for _ in 0..200 {
        if hi - lo <= T::lit(1e-12) {
            return Ok((lo + hi) / T::lit(2.0));
        }
        let mid = (lo + hi) / T::lit(2.0);
        let w = wronskian_imag_axis(solver, mid)?;
        if w == T::zero() {
            return Ok(mid);
        }
        if (w < T::zero()) == (w_lo < T::zero()) {
            lo = mid;
            w_lo = w;
        } else {
            hi = mid;
        }
        if !w.is_finite() {
            break;
        }
    }
    if hi - lo <= T::lit(1e-9) {
        return Ok((lo + hi) / T::lit(2.0));
    }
    Err(Error::BracketFailure {
        lo: lo0.to_f64_lossy(),
        hi: hi0.to_f64_lossy(),
    })
}

fn normalize<T: Real>(solver: &JostSolver<T>, kappa: T) -> Result<BoundState<T>> {
    let jost = solver.solve(cplx(T::zero(), kappa))?;
    let n = jost.node_count();
    let a = solver.support();
    // Match the two halves at x = 0.
    let mid = (n - 1) / 2;
    // At x = 0 both exponential factors are one, so (m, m̃) = (f, f').
    // Least squares over value and slope handles even and odd states alike.
    let [p, dp] = jost.plus_at_node(mid);
    let [m, dm] = jost.minus_at_node(mid);
    let ratio = (p.re * m.re + dp.re * dm.re) / (m.re * m.re + dm.re * dm.re);
    finish(jost, kappa, a, n, mid, ratio)
}

fn finish<T: Real>(
    jost: JostSolution<T>,
    kappa: T,
    a: T,
    n: usize,
    mid: usize,
    scale_minus: T,
) -> Result<BoundState<T>> {
    let scale_plus = T::one();
    let mut state = BoundState {
        kappa,
        norm: T::zero(),
        jost,
        scale_plus,
        scale_minus,
    };
    let tail = (-T::lit(2.0) * kappa * a).exp() / (T::lit(2.0) * kappa);
    let mut norm2 = tail * (scale_plus * scale_plus + scale_minus * scale_minus);
    if n > 1 {
        let step = state.jost.node(1) - state.jost.node(0);
        let left: Vec<T> = (0..=mid).map(|i| state.eval_node(i, false)).collect();
        let right: Vec<T> = (mid..n).map(|i| state.eval_node(i, true)).collect();
        let wl = simpson_weights(left.len(), step);
        let wr = simpson_weights(right.len(), step);
        norm2 += left
            .iter()
            .zip(&wl)
            .fold(T::zero(), |s, (v, w)| s + *w * *v * *v);
        norm2 += right
            .iter()
            .zip(&wr)
            .fold(T::zero(), |s, (v, w)| s + *w * *v * *v);
    }
    if !(norm2 > T::zero()) || !norm2.is_finite() {
        return Err(Error::NonConvergent(format!(
            "bound state at kappa = {kappa} has no finite norm"
        )));
    }
    let inv = T::one() / norm2.sqrt();
    state.scale_plus *= inv;
    state.scale_minus *= inv;
    state.norm = norm2.sqrt() * inv;
    Ok(state)
}

impl<T: Real> BoundState<T> {
    fn eval_node(&self, i: usize, plus: bool) -> T {
        let x = self.jost.node(i);
        if plus {
            self.scale_plus * (-self.kappa * x).exp() * self.jost.plus_at_node(i)[0].re
        } else {
            self.scale_minus * (self.kappa * x).exp() * self.jost.minus_at_node(i)[0].re
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_repulsive_potentials_have_none() {
        assert!(find_bound_states(&Potential::<f64>::zero())
            .unwrap()
            .is_empty());
        let bump = Potential::<f64>::gaussian(2.0, 1.0, 5.0).unwrap();
        assert!(find_bound_states(&bump).unwrap().is_empty());
    }

    #[test]
    fn poschl_teller_ground_state() {
        let q = Potential::<f64>::poschl_teller(1.0, 12.0).unwrap();
        let states = find_bound_states(&q).unwrap();
        assert_eq!(states.len(), 1);
        let s = &states[0];
        assert!((s.kappa - 1.0).abs() < 1e-8, "kappa = {}", s.kappa);
        assert!((s.norm - 1.0).abs() < 1e-12);
        let sign = s.eval(0.0).signum();
        for x in [-5.0f64, -1.0, 0.0, 0.3, 2.0, 8.0] {
            let want = 1.0 / (x.cosh() * 2f64.sqrt());
            assert!((sign * s.eval(x) - want).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn deeper_well_has_odd_state() {
        // -6 sech² x: κ = 2 (even) and κ = 1 (odd).
        let q = Potential::<f64>::poschl_teller(2.0, 14.0).unwrap();
        let states = find_bound_states(&q).unwrap();
        assert_eq!(states.len(), 2);
        assert!((states[0].kappa - 2.0).abs() < 1e-7);
        assert!((states[1].kappa - 1.0).abs() < 1e-7);
        let odd = &states[1];
        assert!((odd.eval(1.0) + odd.eval(-1.0)).abs() < 1e-8);
        // ψ = sqrt(3/2) tanh x sech x
        let want = 1.5f64.sqrt() * 1f64.tanh() / 1f64.cosh();
        assert!((odd.eval(1.0).abs() - want).abs() < 1e-7);
    }
}
