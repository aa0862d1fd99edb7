use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conewave::acceptance::{run_suite, SuiteOptions, NOISE_SEED};
use conewave::grid::UniformGrid;
use conewave::io::{self, number};
use conewave::kernels::KernelEvaluator;
use conewave::reconstruct::{
    default_epsilon, CauchyData, HSchedule, LocalizedPlan, Pipeline, ReconstructionResult,
    SpectralPlan, TargetPoint,
};
use conewave::simulate::{
    extract_cauchy, ground_truth, simulate, Lateral, Pulse, Shape, SimConfig,
};
use conewave::spectral1d::{
    bound_states_with, forward_transform, JostOptions, JostSolver, Potential, ScatteringPair,
    SpectralBasis, Term,
};

use crate::config::{invalid, parse_points, Config};

/// A CSV file waiting to be written.
pub struct Table {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Everything a command produces, written only once the computation has
/// succeeded.
#[derive(Default)]
pub struct Output {
    tables: Vec<Table>,
    cauchy: Option<CauchyData<f64>>,
    /// Set when the command ran but its checks failed.
    pub failed: bool,
}

impl Output {
    pub fn write(&self, dir: &Path, hash: &str) -> Result<()> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let comment = format!("config-hash: {hash}");
        if let Some(data) = &self.cauchy {
            io::write_cauchy(dir, data, Some(&comment))?;
        }
        for t in &self.tables {
            let path = dir.join(t.name);
            io::write_table(&path, Some(&comment), &t.header, &t.rows)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        Ok(())
    }
}

fn nums(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| number(v)).collect()
}

pub fn potential(cfg: &Config) -> Result<Potential<f64>> {
    let kind = cfg.raw("potential.kind").unwrap_or("zero");
    let taper = cfg.get("potential.taper")?;
    let support = || -> Result<f64> {
        cfg.get("potential.support")?
            .ok_or_else(|| invalid(format!("potential.kind = {kind} needs potential.support")))
    };
    let term = match kind {
        "zero" => return Ok(Potential::zero()),
        "poschl-teller" => Term::PoschlTeller {
            nu: cfg.get_or("potential.nu", 1.0)?,
            center: 0.0,
            scale: cfg.get_or("potential.width", 1.0)?,
        },
        "gaussian" => Term::Gaussian {
            amplitude: cfg.get_or("potential.amplitude", -1.0)?,
            center: 0.0,
            width: cfg.get_or("potential.width", 1.0)?,
        },
        other => {
            return Err(invalid(format!(
                "potential.kind '{other}' is not one of zero, poschl-teller, gaussian"
            )))
        }
    };
    Ok(Potential::new(vec![term], support()?, taper)?)
}

fn targets(cfg: &Config) -> Result<Vec<TargetPoint<f64>>> {
    let text = cfg
        .raw("targets")
        .ok_or_else(|| invalid("no reconstruction targets: set 'targets = x0 y0 t0; ...'"))?;
    let points = parse_points(text)?;
    if points.is_empty() {
        return Err(invalid("the target list is empty"));
    }
    points
        .into_iter()
        .map(|[x, y, t]| Ok(TargetPoint::new(x, y, t)?))
        .collect()
}

fn sim_config(cfg: &Config) -> Result<SimConfig<f64>> {
    let shape = match cfg.raw("pulse.shape").unwrap_or("bump") {
        "bump" => Shape::Bump {
            x: cfg.get_or("pulse.x", 0.0)?,
            y: cfg.get_or("pulse.y", 1.5)?,
            radius: cfg.get_or("pulse.radius", 1.0)?,
        },
        "layer" => Shape::Layer {
            y: cfg.get_or("pulse.y", 1.5)?,
            half_width: cfg.get_or("pulse.half_width", 1.0)?,
        },
        other => {
            return Err(invalid(format!(
                "pulse.shape '{other}' is not one of bump, layer"
            )))
        }
    };
    let pulse = Pulse {
        shape,
        displacement: cfg.get_or("pulse.displacement", 1.0)?,
        velocity: cfg.get_or("pulse.velocity", 0.0)?,
    };
    let mut c = SimConfig::standard(potential(cfg)?, vec![pulse]);
    c.x_min = cfg.get_or("sim.x_min", c.x_min)?;
    c.x_max = cfg.get_or("sim.x_max", c.x_max)?;
    c.y_max = cfg.get_or("sim.y_max", c.y_max)?;
    c.y_below = cfg.get_or("sim.y_below", c.y_below)?;
    c.store_y_max = cfg.get_or("sim.store_y_max", c.store_y_max)?;
    if let Some(d) = cfg.get("sim.spacing")? {
        c.spacing = d;
        c.dt = conewave::simulate::cfl_limit(d);
    }
    c.dt = cfg.get_or("sim.dt", c.dt)?;
    c.t_final = cfg.get_or("sim.t_final", c.t_final)?;
    c.lateral = match cfg.raw("sim.lateral").unwrap_or("dirichlet") {
        "dirichlet" => Lateral::Dirichlet,
        "periodic" => Lateral::Periodic,
        other => {
            return Err(invalid(format!(
                "sim.lateral '{other}' is not one of dirichlet, periodic"
            )))
        }
    };
    Ok(c)
}

pub fn run_simulate(cfg: &Config) -> Result<Output> {
    let config = sim_config(cfg)?;
    let field = simulate(&config)?;
    let data = extract_cauchy(&field)?;
    let mut out = Output::default();
    let mut energy = Table::new("energy.csv", &["t", "energy"]);
    for (n, e) in field.energy.iter().enumerate() {
        energy.push(nums(&[field.t.point(n), *e]));
    }
    out.tables.push(energy);
    if cfg.raw("targets").is_some() {
        let points = targets(cfg)?;
        let truth = ground_truth(&field, &points)?;
        let mut table = Table::new("truth.csv", &["x0", "y0", "t0", "u"]);
        for (p, u) in points.iter().zip(&truth) {
            table.push(nums(&[p.x0, p.y0, p.t0, *u]));
        }
        out.tables.push(table);
    }
    println!(
        "simulated {} x {} points over {} time steps; relative energy drift {:.2e}",
        field.x.len,
        field.y.len,
        field.t.len,
        field.energy_drift()
    );
    out.cauchy = Some(data);
    Ok(out)
}

pub fn run_spectrum(cfg: &Config) -> Result<Output> {
    let q = potential(cfg)?;
    let solver = JostSolver::new(&q, JostOptions::default())?;
    let bound = bound_states_with(&solver)?;
    let mut out = Output::default();

    let mut states = Table::new("bound_states.csv", &["index", "kappa", "energy", "norm"]);
    for (i, s) in bound.iter().enumerate() {
        println!(
            "bound state {i}: kappa = {:.12}, energy = {:.12}",
            s.kappa,
            s.eigenvalue()
        );
        let mut row = vec![i.to_string()];
        row.extend(nums(&[s.kappa, s.eigenvalue(), s.norm]));
        states.push(row);
    }
    if bound.is_empty() {
        println!("no bound states");
    }
    out.tables.push(states);

    let kmax: f64 = cfg.get_or("spectrum.kmax", 20.0)?;
    let samples: usize = cfg.get_or("spectrum.samples", 50)?;
    let mut scattering = Table::new(
        "scattering.csv",
        &[
            "k",
            "alpha1_re",
            "alpha1_im",
            "beta1_re",
            "beta1_im",
            "alpha2_re",
            "alpha2_im",
            "beta2_re",
            "beta2_im",
            "flux",
        ],
    );
    for i in 1..=samples {
        let k = kmax * i as f64 / samples as f64;
        let s = ScatteringPair::from_solver(&solver, k)?;
        let c = [s.alpha1, s.beta1, s.alpha2, s.beta2];
        let mut row = vec![k];
        row.extend(c.iter().flat_map(|z| [z.re, z.im]));
        row.push(s.flux());
        scattering.push(nums(&row));
    }
    out.tables.push(scattering);

    let x_min: f64 = cfg.get_or("spectrum.x_min", -12.0)?;
    let x_max: f64 = cfg.get_or("spectrum.x_max", 12.0)?;
    let dx: f64 = cfg.get_or("spectrum.dx", 0.05)?;
    let n = ((x_max - x_min) / dx).round() as usize + 1;
    let grid = UniformGrid::new(x_min, dx, n)?;
    let basis = SpectralBasis::with_solver(&solver, grid, kmax, &[])?;
    let trials: usize = cfg.get_or("spectrum.trials", 20)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.get_or("spectrum.seed", 5)?);
    let (centre, reach) = (0.5 * (x_min + x_max), 0.125 * (x_max - x_min));
    let mut parseval = Table::new(
        "parseval.csv",
        &["trial", "norm_sqr", "transform_norm_sqr", "relative_defect"],
    );
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        // Sums of modulated Gaussians well inside the grid.
        let packets: Vec<[f64; 4]> = (0..3)
            .map(|_| {
                [
                    rng.gen_range(-1.0..1.0),
                    centre + rng.gen_range(-reach..reach),
                    rng.gen_range(0.6..1.5),
                    rng.gen_range(0.0..0.5 * kmax.min(std::f64::consts::PI / dx)),
                ]
            })
            .collect();
        let psi: Vec<f64> = grid
            .points()
            .iter()
            .map(|&x| {
                packets
                    .iter()
                    .map(|[a, c, w, b]| a * (-((x - c) / w).powi(2)).exp() * (b * x).cos())
                    .sum()
            })
            .collect();
        let norm2 = psi.iter().map(|v| v * v).sum::<f64>() * dx;
        let transformed = forward_transform(&psi, &basis)?.norm_sqr(&basis);
        let defect = transformed / norm2 - 1.0;
        worst = worst.max(defect.abs());
        let mut row = vec![trial.to_string()];
        row.extend(nums(&[norm2, transformed, defect]));
        parseval.push(row);
    }
    if trials > 0 {
        println!("Parseval: max relative defect {worst:.3e} over {trials} functions");
    }
    out.tables.push(parseval);
    Ok(out)
}

pub fn run_kernel(cfg: &Config) -> Result<Output> {
    let q = potential(cfg)?;
    let h: f64 = cfg.get_or("kernel.h", 0.05)?;
    let y0: f64 = cfg.get_or("kernel.y0", 1.0)?;
    let x0: f64 = cfg.get_or("kernel.x0", 0.0)?;
    let half_width: f64 = cfg.get_or("kernel.half_width", y0 + 1.0)?;
    let nx: usize = cfg.get_or("kernel.nx", 81)?;
    let nt: usize = cfg.get_or("kernel.nt", 41)?;
    let tol: f64 = cfg.get_or("kernel.tol", 1e-10)?;
    if nx < 2 || nt < 2 || !(half_width > 0.0) {
        return Err(invalid(
            "kernel grid needs nx >= 2, nt >= 2 and half_width > 0",
        ));
    }
    let xs = UniformGrid::new(x0 - half_width, 2.0 * half_width / (nx - 1) as f64, nx)?.points();
    let ts = UniformGrid::new(-y0, 2.0 * y0 / (nt - 1) as f64, nt)?.points();
    let grid = KernelEvaluator::new(&q)?.kernel_grid(x0, y0, h, &xs, &ts, tol)?;
    let mut table = Table::new("kernel.csv", &["t", "x", "k_dirichlet", "k_neumann"]);
    for (it, &t) in ts.iter().enumerate() {
        for (ix, &x) in xs.iter().enumerate() {
            let (kd, kn) = grid.at(it, ix);
            table.push(nums(&[t, x, kd, kn]));
        }
    }
    println!(
        "kernel tables on {nt} x {nx} points ({} Jost solves)",
        grid.solves
    );
    let mut out = Output::default();
    out.tables.push(table);
    Ok(out)
}

fn schedule(cfg: &Config, y0: f64) -> Result<HSchedule<f64>> {
    let d = HSchedule::default_for(y0);
    let s = HSchedule {
        h0: cfg.get_or("schedule.h0", d.h0)?,
        ratio: cfg.get_or("schedule.ratio", d.ratio)?,
        count: cfg.get_or("schedule.count", d.count)?,
    };
    s.validate()?;
    Ok(s)
}

fn pipelines(cfg: &Config) -> Result<Vec<Pipeline>> {
    match cfg.raw("reconstruct.pipeline").unwrap_or("spectral") {
        "spectral" => Ok(vec![Pipeline::Spectral]),
        "localized" => Ok(vec![Pipeline::Localized]),
        "both" => Ok(vec![Pipeline::Spectral, Pipeline::Localized]),
        other => Err(invalid(format!(
            "pipeline '{other}' is not one of spectral, localized, both"
        ))),
    }
}

pub fn run_reconstruct(cfg: &Config, data_dir: Option<PathBuf>) -> Result<Output> {
    let dir = data_dir
        .or_else(|| cfg.path("data.dir"))
        .ok_or_else(|| invalid("no data directory: set data.dir or pass --data"))?;
    let pipelines = pipelines(cfg)?;
    let q = potential(cfg)?;
    let points = targets(cfg)?;
    let plans = points
        .iter()
        .map(|p| Ok((*p, schedule(cfg, p.y0)?.levels())))
        .collect::<Result<Vec<_>>>()?;
    let mut data = io::read_cauchy(&dir)
        .with_context(|| format!("cannot load Cauchy data from {}", dir.display()))?;
    let noise: f64 = cfg.get_or("noise.amplitude", 0.0)?;
    if noise != 0.0 {
        data = data.with_noise(noise, cfg.get_or("noise.seed", NOISE_SEED)?)?;
    }
    let epsilon: Option<f64> = cfg.get("reconstruct.epsilon")?;

    let mut results: Vec<ReconstructionResult<f64>> = Vec::new();
    for pipeline in pipelines {
        match pipeline {
            Pipeline::Spectral => {
                results.extend(SpectralPlan::new(&q, data.x, data.t, &plans)?.run(&data)?)
            }
            Pipeline::Localized => {
                let evaluator = KernelEvaluator::new(&q)?;
                for (p, levels) in &plans {
                    let eps = epsilon.unwrap_or_else(|| default_epsilon(p, &data.x));
                    results.push(
                        LocalizedPlan::new(&evaluator, data.x, data.t, *p, eps, levels)?
                            .run(&data)?,
                    );
                }
            }
        }
    }

    let mut table = Table::new(
        "results.csv",
        &[
            "x0",
            "y0",
            "t0",
            "value",
            "error_estimate",
            "h_selected",
            "pipeline",
        ],
    );
    let mut levels = Table::new(
        "levels.csv",
        &["x0", "y0", "t0", "pipeline", "level", "h", "value"],
    );
    for r in &results {
        let p = r.target;
        println!(
            "{:>9} ({}, {}, {}): u = {:.9e} +- {:.2e} at h = {:.4e}",
            r.pipeline.name(),
            p.x0,
            p.y0,
            p.t0,
            r.value,
            r.error_estimate,
            r.h_selected()
        );
        let mut row = nums(&[p.x0, p.y0, p.t0, r.value, r.error_estimate, r.h_selected()]);
        row.push(r.pipeline.name().to_owned());
        table.push(row);
        for (m, (h, v)) in r.levels.iter().zip(&r.per_level).enumerate() {
            let mut row = nums(&[p.x0, p.y0, p.t0]);
            row.push(r.pipeline.name().to_owned());
            row.push(m.to_string());
            row.extend(nums(&[*h, *v]));
            levels.push(row);
        }
    }
    let mut out = Output::default();
    out.tables.push(table);
    out.tables.push(levels);
    Ok(out)
}

pub fn run_selftest(cfg: &Config) -> Result<Output> {
    let options = SuiteOptions {
        noise: cfg.get_or("noise.amplitude", SuiteOptions::default().noise)?,
        seed: cfg.get_or("noise.seed", NOISE_SEED)?,
    };
    let reports = run_suite(&options, |r| println!("{r}"));
    let mut table = Table::new("selftest.csv", &["criterion", "title", "passed", "detail"]);
    for r in &reports {
        table.push(vec![
            r.id.to_string(),
            r.title.to_owned(),
            r.passed.to_string(),
            r.detail.clone(),
        ]);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    Ok(Output {
        tables: vec![table],
        cauchy: None,
        failed: passed != reports.len(),
    })
}
