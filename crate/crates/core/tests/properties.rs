//! Randomized invariants of the line operator, the kernels and the level
//! selection.

use num_complex::Complex64;
use proptest::prelude::*;

use conewave::grid::UniformGrid;
use conewave::kernels::{KernelEvaluator, KernelParams};
use conewave::reconstruct::{extrapolate_h, CauchyData, HSchedule};
use conewave::spectral1d::{
    forward_transform, inverse_transform, resolvent_solution, JostOptions, JostSolver, Potential,
    ScatteringPair, SpectralBasis, Term,
};

fn well(amplitude: f64, width: f64, center: f64) -> Potential<f64> {
    Potential::new(
        vec![Term::Gaussian {
            amplitude,
            center,
            width,
        }],
        4.0,
        None,
    )
    .unwrap()
}

/// Sum of modulated Gaussians `a exp(-((x - c)/w)²) cos(b x)` and its second
/// derivative.
fn packet(params: &[(f64, f64, f64, f64)], x: f64) -> (f64, f64) {
    params.iter().fold((0.0, 0.0), |(v, d2), &(a, c, w, b)| {
        let u = (x - c) / w;
        let e = a * (-u * u).exp();
        let (cos, sin) = ((b * x).cos(), (b * x).sin());
        let de = -2.0 * u / w;
        let dde = de * de - 2.0 / (w * w);
        (
            v + e * cos,
            d2 + e * (dde * cos - 2.0 * de * b * sin - b * b * cos),
        )
    })
}

fn packets() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -2.5..2.5f64, 0.7..1.4f64, 0.0..3.0f64), 1..4)
}

fn grid() -> UniformGrid<f64> {
    UniformGrid::new(-12.0, 0.05, 481).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transform_is_unitary_and_inverts(
        (amplitude, width, center) in (-3.0..1.0f64, 0.5..1.5f64, -1.0..1.0f64),
        p in packets(),
    ) {
        let q = well(amplitude, width, center);
        let g = grid();
        let basis = SpectralBasis::new(&q, g, 20.0, &[]).unwrap();
        let psi: Vec<f64> = g.points().iter().map(|&x| packet(&p, x).0).collect();
        let norm2 = psi.iter().map(|v| v * v).sum::<f64>() * g.step;
        prop_assume!(norm2 > 1e-6);
        let c = forward_transform(&psi, &basis).unwrap();
        prop_assert!((c.norm_sqr(&basis) / norm2 - 1.0).abs() < 1e-6);
        let back = inverse_transform(&c, &basis);
        let err = psi.iter().zip(&back).map(|(a, b)| (b - a).norm_sqr()).sum::<f64>() * g.step;
        prop_assert!((err / norm2).sqrt() < 1e-6);
        prop_assert!(back.iter().all(|v| v.im.abs() < 1e-6));
    }

    #[test]
    fn transform_diagonalizes_the_operator(
        (amplitude, width) in (-3.0..0.0f64, 0.5..1.5f64),
        p in packets(),
    ) {
        let q = well(amplitude, width, 0.0);
        let g = grid();
        let basis = SpectralBasis::new(&q, g, 24.0, &[]).unwrap();
        let xs = g.points();
        let psi: Vec<f64> = xs.iter().map(|&x| packet(&p, x).0).collect();
        let l_psi: Vec<f64> = xs.iter().map(|&x| {
            let (v, d2) = packet(&p, x);
            -d2 + q.eval(x) * v
        }).collect();
        let mut c = forward_transform(&psi, &basis).unwrap();
        c.apply(&basis, |lambda| lambda);
        let d = forward_transform(&l_psi, &basis).unwrap();
        let diff = c.continuous1.iter().zip(&d.continuous1)
            .chain(c.continuous2.iter().zip(&d.continuous2))
            .zip(basis.k_weights().iter().chain(basis.k_weights()))
            .map(|((a, b), w)| (a - b).norm_sqr() * w)
            .sum::<f64>()
            + c.discrete.iter().zip(&d.discrete).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        let scale = d.norm_sqr(&basis);
        prop_assert!(diff.sqrt() <= 1e-5 * scale.sqrt().max(1e-3), "{} vs {}", diff.sqrt(), scale.sqrt());
    }

    #[test]
    fn bound_state_sign_does_not_matter(amplitude in -4.0..-1.0f64, p in packets()) {
        let q = well(amplitude, 1.0, 0.0);
        let g = UniformGrid::new(-10.0, 0.1, 201).unwrap();
        let basis = SpectralBasis::new(&q, g, 10.0, &[0.37]).unwrap();
        prop_assume!(!basis.bound_states().is_empty());
        let flipped = basis.with_negated_bound_states();
        let psi: Vec<f64> = g.points().iter().map(|&x| packet(&p, x).0).collect();
        let a = inverse_transform(&forward_transform(&psi, &basis).unwrap(), &basis);
        let b = inverse_transform(&forward_transform(&psi, &flipped).unwrap(), &flipped);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scattering_conserves_flux_and_wronskian(
        (amplitude, width, center) in (-5.0..5.0f64, 0.3..2.0f64, -2.0..2.0f64),
        k in 0.05..30.0f64,
        x in -6.0..6.0f64,
    ) {
        let q = well(amplitude, width, center);
        let solver = JostSolver::new(&q, JostOptions::default()).unwrap();
        let s = ScatteringPair::from_solver(&solver, k).unwrap();
        prop_assert!((s.flux() - 1.0).abs() < 1e-9);
        // φ₁ φ₂' - φ₁' φ₂ is independent of x.
        let w0 = s.wronskian_at(0.0);
        prop_assert!((s.wronskian_at(x) - w0).norm() < 1e-9 * w0.norm().max(1e-3));
        // Reciprocity: both pairs share the transmission coefficient.
        prop_assert!((s.beta1 - s.alpha2).norm() < 1e-9);
    }

    #[test]
    fn green_function_is_symmetric(
        (amplitude, width) in (-5.0..5.0f64, 0.3..2.0f64),
        (re, im) in (-15.0..15.0f64, 0.5..8.0f64),
        (x0, x) in (-6.0..6.0f64, -6.0..6.0f64),
    ) {
        let q = well(amplitude, width, 0.3);
        let solver = JostSolver::new(&q, JostOptions::default()).unwrap();
        let kappa_max = (-q.min()).sqrt();
        let k = Complex64::new(re, im + kappa_max);
        let sol = resolvent_solution(&solver, k).unwrap();
        let (a, b) = (sol.green(x0, x), sol.green(x, x0));
        prop_assert!((a - b).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn kernels_are_even_in_time(
        amplitude in -2.0..1.0f64,
        t in 0.0..0.9f64,
        dx in -2.0..2.0f64,
    ) {
        let ev = KernelEvaluator::new(&well(amplitude, 0.8, 0.2)).unwrap();
        let a = ev.kernel(&KernelParams::new(0.08, 1.0, t, 0.1, 0.1 + dx)).unwrap();
        let b = ev.kernel(&KernelParams::new(0.08, 1.0, -t, 0.1, 0.1 + dx)).unwrap();
        let scale = a.neumann.norm().max(a.dirichlet.norm());
        prop_assert!((a.neumann - b.neumann).norm() <= 1e-9 * scale);
        prop_assert!((a.dirichlet - b.dirichlet).norm() <= 1e-9 * scale);
        prop_assert!(a.neumann.im.abs() <= 1e-8 * scale);
    }
}

proptest! {
    #[test]
    fn level_selection_is_affine_equivariant(
        values in prop::collection::vec(-10.0..10.0f64, 3..9),
        a in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
        c in -10.0..10.0f64,
    ) {
        let (v, d, m) = extrapolate_h(&values).unwrap();
        prop_assert_eq!(v, values[m]);
        prop_assert!(m >= 1 && m < values.len());
        let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        prop_assert!(diffs.iter().all(|x| *x >= d));
        let mapped: Vec<f64> = values.iter().map(|v| a * v + c).collect();
        let (v2, d2, m2) = extrapolate_h(&mapped).unwrap();
        // Ties may be broken differently after rounding.
        let tied = diffs.iter().filter(|x| (**x - d).abs() <= 1e-12 * (1.0 + d)).count() > 1;
        if !tied {
            prop_assert_eq!(m2, m);
            prop_assert!((v2 - (a * v + c)).abs() <= 1e-12 * (1.0 + v2.abs()));
        }
        prop_assert!((d2 - a.abs() * d).abs() <= 1e-10 * (1.0 + d2));
    }

    #[test]
    fn schedules_are_geometric(h0 in 0.01..2.0f64, ratio in 0.1..0.9f64, count in 3usize..8) {
        let s = HSchedule::new(h0, ratio, count);
        let last = h0 * ratio.powi(count as i32 - 1);
        prop_assume!(last >= 1e-6);
        let levels = s.unwrap().levels();
        prop_assert_eq!(levels.len(), count);
        prop_assert_eq!(levels[0], h0);
        for w in levels.windows(2) {
            prop_assert!((w[1] / w[0] - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_is_bounded_and_reproducible(level in 0.0..0.2f64, seed in any::<u64>()) {
        let x = UniformGrid::new(-1.0, 0.1, 21).unwrap();
        let t = UniformGrid::new(0.0, 0.1, 11).unwrap();
        let data = CauchyData::from_fn(x, t, |x: f64, t: f64| (x + t).sin(), |x, t| 3.0 * (x - t).cos()).unwrap();
        let a = data.with_noise(level, seed).unwrap();
        prop_assert_eq!(&a, &data.with_noise(level, seed).unwrap());
        let max_f = data.f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_g = data.g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(a.f.iter().zip(&data.f).all(|(u, v)| (u - v).abs() <= level * max_f * (1.0 + 1e-12)));
        prop_assert!(a.g.iter().zip(&data.g).all(|(u, v)| (u - v).abs() <= level * max_g * (1.0 + 1e-12)));
    }

    #[test]
    fn cauchy_files_round_trip(values in prop::collection::vec(-1e6..1e6f64, 32), tiny in -1e-200..1e-200f64) {
        let dir = tempfile::tempdir().unwrap();
        let x = UniformGrid::new(-0.3, 0.1, 4).unwrap();
        let t = UniformGrid::new(1.0, 0.25, 4).unwrap();
        let mut g = values[16..].to_vec();
        g[0] = tiny;
        let data = CauchyData::new(x, t, values[..16].to_vec(), g).unwrap();
        conewave::io::write_cauchy(dir.path(), &data, None).unwrap();
        prop_assert_eq!(conewave::io::read_cauchy(dir.path()).unwrap(), data);
    }
}
