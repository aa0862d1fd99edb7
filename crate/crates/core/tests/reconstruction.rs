//! Both pipelines against an exact solution, against simulated data, and
//! under linear combinations and time shifts of the data.

use conewave::grid::UniformGrid;
use conewave::kernels::KernelEvaluator;
use conewave::reconstruct::{
    localized_reconstruct, spectral_reconstruct, CauchyData, HSchedule, LocalizedPlan,
    SpectralPlan, TargetPoint,
};
use conewave::simulate::{
    cfl_limit, extract_cauchy, ground_truth, simulate, Lateral, Pulse, Shape, SimConfig,
};
use conewave::spectral1d::{Potential, Term};

const MU: f64 = 2.236_067_977_499_79;

/// `u = sech(x) cos(2t) (cos(μy) + sin(μy)/2)` with `μ = √5` solves the
/// equation for `q = -2 sech²x`, whose bound state is `sech x` at `κ = 1`.
fn bound_mode(x: f64, y: f64, t: f64) -> f64 {
    (2.0 * t).cos() / x.cosh() * ((MU * y).cos() + 0.5 * (MU * y).sin())
}

#[test]
fn exact_solution_in_a_medium() {
    let q = Potential::poschl_teller(1.0, 12.0).unwrap();
    let x = UniformGrid::new(-20.0, 0.05, 801).unwrap();
    let t = UniformGrid::new(-1.0, 0.01, 301).unwrap();
    let data = CauchyData::from_fn(
        x,
        t,
        |x: f64, t: f64| (2.0 * t).cos() / x.cosh(),
        |x: f64, t: f64| 0.5 * MU * (2.0 * t).cos() / x.cosh(),
    )
    .unwrap();
    let targets: Vec<TargetPoint<f64>> = [
        (0.0, 0.5, 0.5),
        (1.0, 0.4, 0.7),
        (-0.7, 0.8, 0.2),
        (0.3, 0.05, 0.4),
    ]
    .iter()
    .map(|&(x0, y0, t0)| TargetPoint::new(x0, y0, t0).unwrap())
    .collect();
    let requests: Vec<_> = targets
        .iter()
        .map(|p| (*p, HSchedule::default_for(p.y0).levels()))
        .collect();
    let spectral = SpectralPlan::new(&q, x, t, &requests)
        .unwrap()
        .run(&data)
        .unwrap();
    let evaluator = KernelEvaluator::new(&q).unwrap();
    for (p, s) in targets.iter().zip(&spectral) {
        let u = bound_mode(p.x0, p.y0, p.t0);
        let levels = HSchedule::default_for(p.y0).levels();
        let l = LocalizedPlan::new(&evaluator, x, t, *p, 0.25 * p.y0, &levels)
            .unwrap()
            .run(&data)
            .unwrap();
        assert!(
            (s.value - u).abs() <= 0.02 * u.abs(),
            "{p:?}: {} vs {u}",
            s.value
        );
        assert!(
            (l.value - u).abs() <= 0.02 * u.abs(),
            "{p:?}: {} vs {u}",
            l.value
        );
        assert!(
            (s.value - u).abs() <= 5.0 * s.error_estimate,
            "{p:?}: estimate {} for error {}",
            s.error_estimate,
            (s.value - u).abs()
        );
    }
}

#[test]
fn pipelines_agree_at_moderate_levels_on_simulated_data() {
    let q = Potential::poschl_teller(1.0, 3.0).unwrap();
    let config = SimConfig {
        x_min: -4.0,
        x_max: 4.0,
        y_max: 4.4,
        y_below: 2.2,
        store_y_max: 0.6,
        spacing: 0.02,
        dt: cfl_limit(0.02),
        t_final: 2.2,
        potential: q.clone(),
        pulses: vec![Pulse {
            shape: Shape::Bump {
                x: 0.2,
                y: 1.2,
                radius: 0.9,
            },
            displacement: 1.0,
            velocity: -0.4,
        }],
        lateral: Lateral::Dirichlet,
    };
    let field = simulate(&config).unwrap();
    let data = extract_cauchy(&field).unwrap();
    let targets: [TargetPoint<f64>; 2] = [
        TargetPoint::new(0.0, 0.4, 1.2).unwrap(),
        TargetPoint::new(0.5, 0.3, 1.0).unwrap(),
    ];
    let truth = ground_truth(&field, &targets).unwrap();
    for (p, u) in targets.iter().zip(truth) {
        let h = 0.2 * p.y0 * p.y0 / 8.0;
        let s = spectral_reconstruct(&data, &q, *p, h).unwrap();
        let l = localized_reconstruct(&data, &q, *p, h, 0.25 * p.y0).unwrap();
        assert!((s - l).abs() <= 2e-3 * u.abs(), "{p:?}: {s} vs {l}");
        assert!((s - u).abs() <= 0.03 * u.abs(), "{p:?}: {s} vs {u}");
    }
}

/// Modulated Gaussian data `a exp(-x²) cos(b t)` in both traces.
fn packet_data(x: UniformGrid<f64>, t: UniformGrid<f64>, a: f64, b: f64) -> CauchyData<f64> {
    CauchyData::from_fn(
        x,
        t,
        move |x: f64, t: f64| a * (-x * x).exp() * (b * t).cos(),
        move |x: f64, t: f64| 0.5 * a * (-(x - 0.3).powi(2)).exp() * (b * t + 0.4).sin(),
    )
    .unwrap()
}

fn small_grids() -> (UniformGrid<f64>, UniformGrid<f64>) {
    (
        UniformGrid::new(-7.0, 0.05, 281).unwrap(),
        UniformGrid::new(0.0, 0.01, 201).unwrap(),
    )
}

fn gaussian_well() -> Potential<f64> {
    Potential::new(
        vec![Term::Gaussian {
            amplitude: -2.0,
            center: 0.0,
            width: 0.8,
        }],
        3.0,
        None,
    )
    .unwrap()
}

#[test]
fn both_pipelines_are_linear() {
    let q = gaussian_well();
    let (x, t) = small_grids();
    let d1 = packet_data(x, t, 1.0, 3.0);
    let d2 = packet_data(x, t, -0.6, 7.0);
    let (a, b) = (1.7, -2.3);
    let mixed = d1.combine(a, &d2, b).unwrap();
    let p = TargetPoint::new(0.1, 0.3, 1.0).unwrap();
    let levels = [0.02, 0.01, 0.005];

    let spectral = SpectralPlan::new(&q, x, t, &[(p, levels.to_vec())]).unwrap();
    let evaluator = KernelEvaluator::new(&q).unwrap();
    let localized = LocalizedPlan::new(&evaluator, x, t, p, 0.1, &levels).unwrap();
    let run_s = |d: &CauchyData<f64>| spectral.regularized(d).unwrap().remove(0);
    let run_l = |d: &CauchyData<f64>| localized.regularized(d).unwrap();
    for run in [&run_s as &dyn Fn(&CauchyData<f64>) -> Vec<f64>, &run_l] {
        let (u1, u2, u) = (run(&d1), run(&d2), run(&mixed));
        for i in 0..levels.len() {
            let expect = a * u1[i] + b * u2[i];
            let scale = (a * u1[i]).abs() + (b * u2[i]).abs();
            assert!(
                (u[i] - expect).abs() <= 1e-12 * scale.max(1.0),
                "level {i}: {} vs {expect}",
                u[i]
            );
        }
    }
}

#[test]
fn time_shifts_commute_with_reconstruction() {
    let q = gaussian_well();
    let (x, t) = small_grids();
    let data = packet_data(x, t, 1.0, 4.0);
    let p = TargetPoint::new(-0.2, 0.35, 1.1).unwrap();
    let (h, eps) = (0.02, 0.15);
    let s0 = spectral_reconstruct(&data, &q, p, h).unwrap();
    let l0 = localized_reconstruct(&data, &q, p, h, eps).unwrap();
    for shift in [0.37, -2.0, 10.005] {
        let moved = data.shifted(shift);
        let pm = TargetPoint::new(p.x0, p.y0, p.t0 + shift).unwrap();
        let s = spectral_reconstruct(&moved, &q, pm, h).unwrap();
        let l = localized_reconstruct(&moved, &q, pm, h, eps).unwrap();
        assert!(
            (s - s0).abs() <= 1e-9 * s0.abs().max(1e-3),
            "{shift}: {s} vs {s0}"
        );
        assert!(
            (l - l0).abs() <= 1e-9 * l0.abs().max(1e-3),
            "{shift}: {l} vs {l0}"
        );
    }
}
