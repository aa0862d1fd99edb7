use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn conewave(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conewave"))
        .args(args)
        .current_dir(dir)
        .env_remove("CONEWAVE_OUT")
        .output()
        .expect("binary runs")
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Data rows of a CSV file, skipping the comment and header lines.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn write_zero_data(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    fs::write(
        dir.join("meta.csv"),
        "x_min,dx,nx,t_min,dt,nt\n-2,0.05,81,0,0.05,41\n",
    )
    .unwrap();
    let header: Vec<String> = (0..81).map(|i| format!("x{i}")).collect();
    let row = vec!["0"; 81].join(",");
    let body = format!("{}\n{}\n", header.join(","), vec![row; 41].join("\n"));
    fs::write(dir.join("f.csv"), &body).unwrap();
    fs::write(dir.join("g.csv"), &body).unwrap();
}

#[test]
fn zero_data_reconstruct_to_zero() {
    let tmp = tempfile::tempdir().unwrap();
    write_zero_data(&tmp.path().join("data"));
    fs::write(
        tmp.path().join("run.conf"),
        "targets = 0 0.5 1; 0.3 0.4 0.9\ndata.dir = data\nreconstruct.pipeline = both\n",
    )
    .unwrap();
    let out = conewave(
        &["reconstruct", "-c", "run.conf", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let results = rows(&tmp.path().join("out/results.csv"));
    assert_eq!(results.len(), 4);
    for r in &results {
        assert_eq!(r[3], "0", "{r:?}");
    }
    assert!(!rows(&tmp.path().join("out/levels.csv")).is_empty());
}

#[test]
fn poschl_teller_spectrum_has_one_bound_state_at_one() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("pt.conf"),
        "potential.kind = poschl-teller\npotential.nu = 1\npotential.support = 12\nspectrum.trials = 4\n",
    )
    .unwrap();
    let out = conewave(&["spectrum", "-c", "pt.conf", "--out", "out"], tmp.path());
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let states = rows(&tmp.path().join("out/bound_states.csv"));
    assert_eq!(states.len(), 1);
    let kappa: f64 = states[0][1].parse().unwrap();
    assert!((0.99999..=1.00001).contains(&kappa), "{kappa}");
    for r in rows(&tmp.path().join("out/scattering.csv")) {
        let flux: f64 = r[9].parse().unwrap();
        assert!((flux - 1.0).abs() < 1e-9);
    }
    for r in rows(&tmp.path().join("out/parseval.csv")) {
        let defect: f64 = r[3].parse().unwrap();
        assert!(defect.abs() < 1e-6);
    }
}

#[test]
fn missing_data_file_is_an_input_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_zero_data(&data);
    fs::remove_file(data.join("g.csv")).unwrap();
    fs::write(
        tmp.path().join("run.conf"),
        "targets = 0 0.5 1\ndata.dir = data\n",
    )
    .unwrap();
    let out = conewave(
        &["reconstruct", "-c", "run.conf", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(status(&out), 2);
    assert!(!tmp.path().join("out").exists());

    let out = conewave(
        &["spectrum", "-c", "absent.conf", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(status(&out), 2);
}

#[test]
fn malformed_data_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_zero_data(&data);
    fs::write(data.join("f.csv"), "x0,x1\n0,0\n").unwrap();
    let out = conewave(
        &["reconstruct", "--data", "data", "--out", "out"],
        tmp.path(),
    );
    // Targets are checked first.
    assert_eq!(status(&out), 1);
    fs::write(tmp.path().join("run.conf"), "targets = 0 0.5 1\n").unwrap();
    let out = conewave(
        &[
            "reconstruct",
            "-c",
            "run.conf",
            "--data",
            "data",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert_eq!(status(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_configuration_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("spectrum", "potential.kind = poschl-teller\npotential.nu = 1\npotential.support = 12\npotential.depth = 3\n"),
        ("spectrum", "potential.kind = square\n"),
        ("kernel", "kernel.h = -1\n"),
        ("simulate", "sim.spacing = 0.1\nsim.dt = 0.2\n"),
        ("simulate", "sim.y_max = 3\n"),
    ];
    for (command, text) in cases {
        fs::write(tmp.path().join("bad.conf"), text).unwrap();
        let out = conewave(&[command, "-c", "bad.conf", "--out", "out"], tmp.path());
        assert_eq!(
            status(&out),
            1,
            "{command} with {text:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!tmp.path().join("out").exists());
    }
    let out = conewave(
        &[
            "reconstruct",
            "--pipeline",
            "fourier",
            "--data",
            "x",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert_eq!(status(&out), 1);
    let out = conewave(&["frobnicate"], tmp.path());
    assert_eq!(status(&out), 1);
    let out = conewave(&["--help"], tmp.path());
    assert_eq!(status(&out), 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("k.conf"),
        "potential.kind = gaussian\npotential.amplitude = -2\npotential.support = 4\nkernel.nx = 9\nkernel.nt = 5\nspectrum.trials = 3\n",
    )
    .unwrap();
    for command in ["kernel", "spectrum"] {
        for out in ["a", "b"] {
            let r = conewave(
                &[command, "-c", "k.conf", "--out", out, "--workers", "2"],
                tmp.path(),
            );
            assert_eq!(status(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
        }
    }
    let mut names: Vec<_> = fs::read_dir(tmp.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in names {
        let a = fs::read(tmp.path().join("a").join(&name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
        assert!(a.starts_with(b"# config-hash: "));
    }
}

#[test]
fn simulated_data_round_trip_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = "\
sim.x_min = -3
sim.x_max = 3
sim.y_max = 4
sim.y_below = 2
sim.store_y_max = 0.8
sim.spacing = 0.02
sim.t_final = 1.8
pulse.x = 0
pulse.y = 1.3
pulse.radius = 0.8
targets = 0 0.4 0.9
data.dir = run
";
    fs::write(tmp.path().join("sim.conf"), config).unwrap();
    let out = conewave(&["simulate", "-c", "sim.conf", "--out", "run"], tmp.path());
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let truth: f64 = rows(&tmp.path().join("run/truth.csv"))[0][3]
        .parse()
        .unwrap();
    let out = conewave(
        &["reconstruct", "-c", "sim.conf", "--out", "run"],
        tmp.path(),
    );
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let result = &rows(&tmp.path().join("run/results.csv"))[0];
    let value: f64 = result[3].parse().unwrap();
    let estimate: f64 = result[4].parse().unwrap();
    assert!(truth.abs() > 0.05, "{truth}");
    assert!(
        (value - truth).abs() < 0.02 * truth.abs(),
        "{value} vs {truth}"
    );
    assert!(estimate > 0.0);
}
