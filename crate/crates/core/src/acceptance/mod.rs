//! The acceptance suite: nine end-to-end checks against independent
//! oracles, closed forms and simulated ground truth.
//!
//! Shared by the `acceptance` test target and the `selftest` command. The
//! whole suite takes a few minutes on one core; most of it is building the
//! kernel tables of the inhomogeneous case, which criteria 3, 7 and 9 share.

pub mod oracle;

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::UniformGrid;
use crate::kernels::{KernelEvaluator, KernelParams};
use crate::reconstruct::{
    CauchyData, HSchedule, LocalizedPlan, ReconstructionResult, SpectralPlan, TargetPoint,
};
use crate::simulate::{
    cfl_limit, extract_cauchy, ground_truth, simulate, Lateral, Pulse, Shape, SimConfig,
};
use crate::spectral1d::{
    bound_states_with, find_bound_states, forward_transform, resolvent_solution, JostOptions,
    JostSolver, Potential, SpectralBasis, Term,
};

/// Seed of the recorded noise realization.
pub const NOISE_SEED: u64 = 20261015;

/// Target points `(x0, y0, t0)` of the inhomogeneous end-to-end case.
pub const INHOMOGENEOUS_TARGETS: [(f64, f64, f64); 10] = [
    (-1.5, 0.3, 2.6),
    (-0.5, 0.3, 1.4),
    (0.5, 0.3, 1.0),
    (0.5, 0.3, 2.4),
    (1.0, 0.3, 1.8),
    (-1.0, 0.4, 1.3),
    (0.0, 0.4, 1.3),
    (1.0, 0.4, 1.3),
    (-0.5, 0.5, 1.8),
    (1.0, 0.5, 1.4),
];

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Relative noise amplitude for the noise study.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            noise: 0.01,
            seed: NOISE_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {} [{status}] {}: {} ({:.1} s)",
            self.id, self.title, self.detail, self.seconds
        )
    }
}

const TITLES: [&str; 9] = [
    "Fourier-oracle equivalence",
    "closed-form reconstructions",
    "end-to-end inhomogeneous reconstruction",
    "bound state",
    "Parseval identity",
    "kernel decay and free-space reduction",
    "extension invariance",
    "Green's function estimate",
    "noise study",
];

type Outcome = Result<(bool, String)>;

fn report(id: usize, start: Instant, outcome: Outcome) -> Report {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    Report {
        id,
        title: TITLES[id - 1],
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every criterion in order, handing each report to `sink` as soon as
/// it is available.
pub fn run_suite(options: &SuiteOptions, mut sink: impl FnMut(&Report)) -> Vec<Report> {
    let mut reports = Vec::with_capacity(9);
    let mut emit = |r: Report| {
        sink(&r);
        reports.push(r);
    };
    let simple: [(usize, fn() -> Outcome); 2] = [(1, fourier_equivalence), (2, closed_forms)];
    for (id, check) in simple {
        let start = Instant::now();
        emit(report(id, start, check()));
    }

    let start = Instant::now();
    let case = InhomogeneousCase::build();
    let third = case
        .as_ref()
        .map_err(clone_error)
        .and_then(|c| c.accuracy());
    emit(report(3, start, third));

    let simple: [(usize, fn() -> Outcome); 3] =
        [(4, bound_state), (5, parseval), (6, kernel_decay)];
    for (id, check) in simple {
        let start = Instant::now();
        emit(report(id, start, check()));
    }

    let start = Instant::now();
    emit(report(
        7,
        start,
        case.as_ref()
            .map_err(clone_error)
            .and_then(|c| c.extension_invariance()),
    ));
    let start = Instant::now();
    emit(report(8, start, green_estimate()));
    let start = Instant::now();
    emit(report(
        9,
        start,
        case.as_ref()
            .map_err(clone_error)
            .and_then(|c| c.noise_study(options)),
    ));
    reports
}

fn clone_error(e: &crate::Error) -> crate::Error {
    crate::Error::NonConvergent(format!("inhomogeneous case unavailable: {e}"))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Free-space simulation with a smooth bump source.
fn free_space_field_data() -> Result<CauchyData<f64>> {
    let config = SimConfig {
        x_min: -4.0,
        x_max: 4.0,
        y_max: 4.8,
        y_below: 2.0,
        store_y_max: 0.1,
        spacing: 0.01,
        dt: cfl_limit(0.01),
        t_final: 2.2,
        potential: Potential::zero(),
        pulses: vec![Pulse {
            shape: Shape::Bump {
                x: 0.3,
                y: 1.4,
                radius: 1.0,
            },
            displacement: 1.0,
            velocity: 0.5,
        }],
        lateral: Lateral::Dirichlet,
    };
    extract_cauchy(&simulate(&config)?)
}

/// Criterion 1: the spectral pipeline against the FFT oracle on simulated
/// free-space data.
///
/// Levels are compared where the amplification `e^{y0²/4h}` of rounding
/// errors stays below the tolerance; beyond that no two implementations can
/// agree. The selected level must be among them.
pub fn fourier_equivalence() -> Outcome {
    let data = free_space_field_data()?;
    let targets: Vec<(TargetPoint<f64>, Vec<f64>)> =
        [(0.0, 0.5, 1.5), (0.5, 0.4, 1.2), (-0.5, 0.3, 1.6)]
            .iter()
            .map(|&(x0, y0, t0)| {
                Ok((
                    TargetPoint::new(x0, y0, t0)?,
                    HSchedule::default_for(y0).levels(),
                ))
            })
            .collect::<Result<_>>()?;
    let plan = SpectralPlan::new(&Potential::zero(), data.x, data.t, &targets)?;
    let results = plan.run(&data)?;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut selected_ok = true;
    for ((p, levels), r) in targets.iter().zip(&results) {
        let oracle = oracle::fourier_reconstruction(&data, p, levels);
        for (m, &h) in levels.iter().enumerate() {
            if (p.y0 * p.y0 / (4.0 * h)).exp() * f64::EPSILON <= 1e-6 {
                worst = worst.max(relative(r.per_level[m], oracle[m]));
                compared += 1;
            } else if m == r.selected {
                selected_ok = false;
            }
        }
    }
    let passed = worst <= 1e-6 && selected_ok;
    Ok((
        passed,
        format!(
            "max relative difference {worst:.2e} over {compared} levels at 3 targets (limit 1e-6)"
        ),
    ))
}

/// Criterion 2: standing field and plane pulse with closed-form solutions.
pub fn closed_forms() -> Outcome {
    let x = UniformGrid::new(-2.0, 0.01, 401)?;
    let t = UniformGrid::new(-1.0, 0.01, 321)?;
    let evaluator = KernelEvaluator::new(&Potential::zero())?;
    let run = |data: &CauchyData<f64>, p: TargetPoint<f64>| -> Result<ReconstructionResult<f64>> {
        let levels = HSchedule::default_for(p.y0).levels();
        LocalizedPlan::new(&evaluator, x, t, p, 0.25 * p.y0, &levels)?.run(data)
    };

    let standing = CauchyData::from_fn(x, t, |_, t| t.cos(), |_, _| 0.0)?;
    let p = TargetPoint::new(0.0, 0.5, 0.0)?;
    let err_standing = (run(&standing, p)?.value - 0.5f64.cos()).abs();

    let sigma2 = 0.3f64 * 0.3;
    let pulse = |s: f64| (-s * s / (2.0 * sigma2)).exp();
    let plane = CauchyData::from_fn(x, t, |_, t| pulse(t), |_, t| t / sigma2 * pulse(t))?;
    let p = TargetPoint::new(0.0, 0.8, 1.0)?;
    let err_plane = relative(run(&plane, p)?.value, pulse(0.2));

    let passed = err_standing <= 1e-3 && err_plane <= 1e-2;
    Ok((passed, format!("standing field error {err_standing:.2e} (limit 1e-3), plane pulse relative error {err_plane:.2e} (limit 1e-2)")))
}

/// Simulated data in a truncated Pöschl–Teller medium with kernel tables
/// for the ten targets of [`INHOMOGENEOUS_TARGETS`].
pub struct InhomogeneousCase {
    pub potential: Potential<f64>,
    pub data: CauchyData<f64>,
    pub targets: Vec<TargetPoint<f64>>,
    pub truth: Vec<f64>,
    pub plans: Vec<LocalizedPlan<f64>>,
}

/// `-2 sech² x`, which has the single bound state `κ = 1`, cut off at `|x| = 4.5`.
pub fn inhomogeneous_potential() -> Result<Potential<f64>> {
    Potential::poschl_teller(1.0, 4.5)
}

pub fn inhomogeneous_config(potential: Potential<f64>) -> SimConfig<f64> {
    SimConfig {
        x_min: -5.0,
        x_max: 5.0,
        y_max: 5.6,
        y_below: 2.8,
        store_y_max: 0.6,
        spacing: 0.01,
        dt: cfl_limit(0.01),
        t_final: 3.0,
        potential,
        pulses: vec![Pulse {
            shape: Shape::Bump {
                x: 0.2,
                y: 1.4,
                radius: 1.0,
            },
            displacement: 1.0,
            velocity: 0.5,
        }],
        lateral: Lateral::Dirichlet,
    }
}

impl InhomogeneousCase {
    pub fn build() -> Result<Self> {
        let potential = inhomogeneous_potential()?;
        let field = simulate(&inhomogeneous_config(potential.clone()))?;
        let data = extract_cauchy(&field)?;
        let targets = INHOMOGENEOUS_TARGETS
            .iter()
            .map(|&(x0, y0, t0)| TargetPoint::new(x0, y0, t0))
            .collect::<Result<Vec<_>>>()?;
        let truth = ground_truth(&field, &targets)?;
        drop(field);
        let evaluator = KernelEvaluator::new(&potential)?;
        let plans = targets
            .iter()
            .map(|p| {
                let levels = HSchedule::default_for(p.y0).levels();
                LocalizedPlan::new(&evaluator, data.x, data.t, *p, 0.25 * p.y0, &levels)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            potential,
            data,
            targets,
            truth,
            plans,
        })
    }

    /// Criterion 3: accuracy on clean data and reliability of the error
    /// estimate.
    pub fn accuracy(&self) -> Outcome {
        let mut worst: f64 = 0.0;
        let mut bounded = 0;
        for (plan, u) in self.plans.iter().zip(&self.truth) {
            let r = plan.run(&self.data)?;
            let err = (r.value - u).abs();
            worst = worst.max(err / u.abs());
            if err <= 5.0 * r.error_estimate {
                bounded += 1;
            }
        }
        let passed = worst <= 0.05 && bounded >= 8;
        Ok((
            passed,
            format!("max relative error {worst:.2e} (limit 5e-2); estimate within 5x on {bounded}/10 points (need 8)"),
        ))
    }

    /// Criterion 7: a second extension of the medium, different outside
    /// `|x| <= 3.5` but equal on the cone neighbourhood of the target.
    pub fn extension_invariance(&self) -> Outcome {
        let index = 6;
        let plan = &self.plans[index];
        let p = plan.target();
        let other = Potential::poschl_teller(1.0, 5.5)?.with_term(Term::Gaussian {
            amplitude: 1.5,
            center: -4.5,
            width: 0.4,
        })?;
        let evaluator = KernelEvaluator::new(&other)?;
        let second = LocalizedPlan::new(
            &evaluator,
            self.data.x,
            self.data.t,
            p,
            plan.epsilon(),
            plan.levels(),
        )?;
        let a = plan.run(&self.data)?;
        let b = second.run(&self.data)?;
        let mut worst = relative(b.value, a.value);
        for (u, v) in a.per_level.iter().zip(&b.per_level) {
            worst = worst.max(relative(*v, *u));
        }
        Ok((
            worst <= 1e-6,
            format!(
                "max relative difference {worst:.2e} over {} levels at ({}, {}, {}) (limit 1e-6)",
                a.levels.len(),
                p.x0,
                p.y0,
                p.t0
            ),
        ))
    }

    /// Criterion 9: the recorded noise realization on the criterion-3 targets.
    pub fn noise_study(&self, options: &SuiteOptions) -> Outcome {
        let noisy = self.data.with_noise(options.noise, options.seed)?;
        let mut worst: f64 = 0.0;
        let mut diverging = 0;
        for (plan, u) in self.plans.iter().zip(&self.truth) {
            let r = plan.run(&noisy)?;
            let dev = (r.value - u).abs();
            worst = worst.max(dev / u.abs());
            let last = r.per_level[r.per_level.len() - 1];
            if (last - u).abs() >= 10.0 * dev {
                diverging += 1;
            }
        }
        let passed = worst <= 0.10 && diverging == self.plans.len();
        Ok((
            passed,
            format!(
                "noise {:.0e}, seed {}: max relative error {worst:.2e} (limit 1e-1); finest level diverges on {diverging}/10",
                options.noise, options.seed
            ),
        ))
    }
}

/// Criterion 4: `κ` against a Richardson-extrapolated finite difference
/// eigensolver, and the norm of `φ₀` by independent quadrature.
pub fn bound_state() -> Outcome {
    let q = Potential::poschl_teller(1.0, 12.0)?;
    let states = find_bound_states(&q)?;
    let [state] = states.as_slice() else {
        return Ok((
            false,
            format!("expected one bound state, found {}", states.len()),
        ));
    };
    let (energy, spread) = oracle::fd_ground_energy_richardson(&q, 12.0, 2400);
    let kappa_fd = (-energy).sqrt();
    let dk = (state.kappa - kappa_fd).abs();
    let (a, n) = (20.0, 40_000);
    let step = 2.0 * a / n as f64;
    let norm2: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let v = state.eval(-a + i as f64 * step);
            w * v * v
        })
        .sum::<f64>()
        * step
        / 3.0;
    let dn = (norm2.sqrt() - 1.0).abs();
    let passed = dk <= 1e-5 && spread <= 1e-6 && dn <= 1e-6;
    Ok((
        passed,
        format!(
            "kappa {:.8} vs oracle {kappa_fd:.8} (diff {dk:.1e}, oracle spread {spread:.1e}); |norm - 1| = {dn:.1e}",
            state.kappa
        ),
    ))
}

/// Criterion 5: `‖ψ̂‖ = ‖ψ‖` for random Gaussian wave packets.
pub fn parseval() -> Outcome {
    let q = Potential::poschl_teller(1.0, 12.0)?;
    let grid = UniformGrid::new(-12.0, 0.05, 481)?;
    let basis = SpectralBasis::new(&q, grid, 20.0, &[])?;
    let xs = grid.points();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let packets: Vec<[f64; 4]> = (0..3)
            .map(|_| {
                [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(0.6..1.5),
                    rng.gen_range(0.0..3.0),
                ]
            })
            .collect();
        let psi: Vec<f64> = xs
            .iter()
            .map(|&x| {
                packets
                    .iter()
                    .map(|[a, c, w, b]| a * (-((x - c) / w).powi(2)).exp() * (b * x).cos())
                    .sum::<f64>()
            })
            .collect();
        let norm2 = psi.iter().map(|v| v * v).sum::<f64>() * grid.step;
        let coeffs = forward_transform(&psi, &basis)?;
        worst = worst.max((coeffs.norm_sqr(&basis) / norm2 - 1.0).abs());
    }
    Ok((
        worst <= 1e-6,
        format!("max |ratio - 1| = {worst:.2e} over 20 functions (limit 1e-6)"),
    ))
}

/// Criterion 6: decay of `K^N` away from the light disk as `h` halves, and
/// the contour evaluation against the free-space closed form.
pub fn kernel_decay() -> Outcome {
    let neumann = |ev: &KernelEvaluator<f64>, h: f64| -> Result<f64> {
        Ok(ev
            .kernel(&KernelParams::new(h, 1.0, 0.0, 0.0, 2.0))?
            .neumann
            .norm())
    };
    let free = KernelEvaluator::new(&Potential::zero())?;
    let medium = KernelEvaluator::new(&inhomogeneous_potential()?)?;
    let ratio_free = neumann(&free, 0.1)? / neumann(&free, 0.05)?;
    let ratio_medium = neumann(&medium, 0.1)? / neumann(&medium, 0.05)?;

    let mut worst: f64 = 0.0;
    for h in [0.1, 0.05] {
        for (t, dx) in [(0.0, 2.0), (0.0, 0.0), (0.3, 0.5), (-0.6, 1.2)] {
            let v = free.kernel(&KernelParams::new(h, 1.0, t, 0.0, dx))?;
            let (kd, kn) = oracle::free_space_kernel(h, 1.0, t, dx);
            let err_d = (v.dirichlet - Complex64::new(kd, 0.0)).norm() / kd.abs();
            let err_n = (v.neumann - Complex64::new(kn, 0.0)).norm() / kn.abs();
            worst = worst.max(err_d).max(err_n);
        }
    }
    let passed = ratio_free >= 10.0 && ratio_medium >= 10.0 && worst <= 1e-6;
    Ok((
        passed,
        format!(
            "|K_N| drops {ratio_free:.3e}x (free) and {ratio_medium:.3e}x (medium) (need 10x); free-space mismatch {worst:.2e} (limit 1e-6)"
        ),
    ))
}

/// Criterion 8: `|G| |k| e^{Im k |x - x0|}` stays below a constant fitted on
/// a separate calibration sample (with a safety factor of two).
pub fn green_estimate() -> Outcome {
    let q = inhomogeneous_potential()?;
    let solver = JostSolver::new(&q, JostOptions::default())?;
    let kappa_max = bound_states_with(&solver)?
        .iter()
        .fold(0.0f64, |m, s| m.max(s.kappa));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sample = |count: usize| -> Result<Vec<f64>> {
        (0..count)
            .map(|_| {
                let k = Complex64::new(
                    rng.gen_range(-20.0..20.0),
                    rng.gen_range(1.0 + kappa_max..10.0),
                );
                let (x0, x) = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
                let g = resolvent_solution(&solver, k)?.green(x0, x);
                Ok(g.norm() * k.norm() * (k.im * (x - x0).abs()).exp())
            })
            .collect()
    };
    let calibration = sample(200)?;
    let c = 2.0 * calibration.iter().fold(0.0f64, |m, v| m.max(*v));
    let test = sample(100)?;
    let violations = test.iter().filter(|v| **v > c).count();
    let max = test.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok((
        violations == 0,
        format!(
            "C = {c:.3} (calibrated), max ratio {max:.3}, {violations} violations in 100 draws"
        ),
    ))
}
