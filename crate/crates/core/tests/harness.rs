use std::path::{Path, PathBuf};
use std::process::Command;

use mqbsim::harness::{exit_code, run, run_with, validate_model, RunConfig, RunOptions};
use mqbsim::Error;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn config(text: &str, out: &Path) -> RunConfig {
    let ov = vec![format!("output_dir={}", toml_str(out))];
    RunConfig::from_toml(text, &ov, data("")).unwrap()
}

fn toml_str(p: &Path) -> String {
    format!("{:?}", p.to_string_lossy())
}

/// Non-comment CSV rows split on commas, header first.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const UNCOUPLED: &str = r#"
units = "eV"
d = 2
N = 1
omega = [0.1]
c0 = [[-0.1, 0.0], [0.0, 0.1]]
c1 = [[[0.0, 0.0], [0.0, 0.0]]]
"#;

#[test]
fn uncoupled_model_keeps_populations() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("free.toml");
    std::fs::write(&model, UNCOUPLED).unwrap();
    let cfg = config(
        &format!(
            "experiment = \"propagate\"\nmodel = {}\ntruncations = [4]\n[time]\nt_final = 20.0\ndt = 2.0\n",
            toml_str(&model)
        ),
        dir.path(),
    );
    let report = run(&cfg).unwrap();
    let rows = csv_rows(&report.files[0]);
    assert_eq!(rows[0][..3], ["time_fs", "pop_0", "pop_1"]);
    assert_eq!(rows.len(), 12);
    for r in &rows[1..] {
        assert!(r[1].parse::<f64>().unwrap().abs() < 1e-14);
        assert!((r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn outputs_are_reproducible_and_headed() {
    let text = "experiment = \"propagate\"\nrandom_model = { d = 2, modes = 2 }\nseed = 5\ntruncations = [5]\n[time]\nt_final = 10.0\ndt = 1.0\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = run(&config(text, a.path())).unwrap().files[0].clone();
    let cb = config(text, b.path());
    let fb = run_with(&cb, RunOptions { timestamps: true }).unwrap().files[0].clone();
    let sa = std::fs::read_to_string(fa).unwrap();
    let sb = std::fs::read_to_string(fb).unwrap();
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&sa), body(&sb));
    assert!(sa.starts_with(&format!("# mqbsim {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(sa.contains("# config_sha256 "));
    assert!(!sa.contains("created_unix"));
    assert!(sb.contains("# created_unix "));

    let c = tempfile::tempdir().unwrap();
    let other = config(&text.replace("seed = 5", "seed = 6"), c.path());
    let fc = run(&other).unwrap().files[0].clone();
    assert_ne!(body(&sa), body(&std::fs::read_to_string(fc).unwrap()));
}

#[test]
fn trotter_scan_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "experiment = \"trotter-scan\"\nrandom_model = { d = 2, modes = 2 }\nseed = 21\ntruncations = [6]\n\
         [time]\nt_final = 20.0\n[trotter]\ndt_list = [0.05, 0.1, 0.25, 0.5]\n",
        dir.path(),
    );
    let report = run(&cfg).unwrap();
    let rows = csv_rows(&report.files[0]);
    assert_eq!(rows[0], ["dt_fs", "max_pop_error", "min_fidelity", "fitted_order"]);
    assert_eq!(rows.len(), 5);
    let order: f64 = rows[1][3].parse().unwrap();
    assert!((1.7..=2.3).contains(&order), "{order}");
}

#[test]
fn infeasible_hardware_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "experiment = \"feasibility\"\nmodel = \"pyrazine.toml\"\nhardware = \"ion_trap_short_coherence.toml\"\n",
        dir.path(),
    );
    let err = run(&cfg).unwrap_err();
    assert_eq!(exit_code(&err), 4);
    let msg = err.to_string();
    assert!(msg.contains("F_min") && msg.contains("> F_max"), "{msg}");
    assert!(dir.path().join("feasibility.csv").is_file());

    let ok = config(
        "experiment = \"feasibility\"\nmodel = \"pyrazine.toml\"\nhardware = \"ion_trap.toml\"\n",
        dir.path(),
    );
    run(&ok).unwrap();
}

#[test]
fn map_and_resources_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "experiment = \"map\"\nmodel = \"pyrazine.toml\"\nhardware = \"ion_trap.toml\"\n[bath]\ngamma0 = [0.06]\ntemperature = 300.0\n",
        dir.path(),
    );
    let report = run(&cfg).unwrap();
    let names: Vec<_> = report.files.iter().map(|f| f.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(names, ["mqb_params.csv", "drives.csv", "cooling.csv"]);
    let rows = csv_rows(&report.files[0]);
    let kinds: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(kinds, ["delta", "delta", "theta_prime", "theta_prime", "omega_prime", "chi", "chi"]);

    let cfg = config("experiment = \"resources\"\nmodel = \"pyrazine.toml\"\n[resources]\nmodes = [3, 60]\n", dir.path());
    let report = run(&cfg).unwrap();
    let rows = csv_rows(&report.files[0]);
    assert_eq!(rows[1][..6], ["3", "2", "25", "1", "2", "1"]);
    assert_eq!(rows[2][5], "3");
    let rows = csv_rows(&report.files[1]);
    assert_eq!(rows[1], ["1", "6", "3"]);
}

#[test]
fn model_validation() {
    let ok = validate_model(&data("pyrazine.toml")).unwrap();
    assert!(ok.is_valid(), "{:?}", ok.issues);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, UNCOUPLED.replace("[[0.0, 0.0], [0.0, 0.0]]]", "[[0.0, 0.1], [0.2, 0.0]]]")).unwrap();
    let r = validate_model(&bad).unwrap();
    assert!(!r.is_valid());
    assert!(r.issues[0].contains("c1[0][0][1]") && r.issues[0].contains("c1[0][1][0]"), "{:?}", r.issues);

    std::fs::write(&bad, UNCOUPLED.replace("units = \"eV\"\n", "")).unwrap();
    let r = validate_model(&bad).unwrap();
    assert!(r.issues.iter().any(|i| i.contains("units")));

    std::fs::write(&bad, UNCOUPLED.replace("omega = [0.1]", "omega = [-0.1]")).unwrap();
    assert!(!validate_model(&bad).unwrap().is_valid());

    std::fs::write(&bad, "d = ").unwrap();
    assert!(matches!(validate_model(&bad), Err(Error::Parse { .. })));
}

fn mqbsim(args: &[&str], cwd: &Path) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mqbsim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn command_line_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let pyr = data("pyrazine.toml");
    let pyr = pyr.to_str().unwrap();

    let (code, stdout, _) = mqbsim(&["validate", pyr], cwd);
    assert_eq!(code, 0);
    assert!(stdout.contains("ok:"));

    let (code, stdout, _) = mqbsim(&["resources", "--model", pyr, "--out", "res", "--override", "resources.modes=[3]"], cwd);
    assert_eq!(code, 0, "{stdout}");
    assert!(cwd.join("res/resources.csv").is_file());

    let (code, _, _) = mqbsim(&["map", "--model", pyr, "--out", "map", "--threads", "1"], cwd);
    assert_eq!(code, 0);
    assert!(cwd.join("map/mqb_params.csv").is_file());

    let cfg = data("configs/feasibility.toml");
    let short = data("ion_trap_short_coherence.toml");
    let (code, _, stderr) = mqbsim(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--override",
            &format!("hardware={:?}", short.to_str().unwrap()),
            "--out",
            "feas",
        ],
        cwd,
    );
    assert_eq!(code, 4);
    let line = stderr.lines().last().unwrap();
    assert!(line.starts_with("error code=4 kind=infeasible reason="), "{stderr}");

    std::fs::write(cwd.join("broken.toml"), "experiment = [").unwrap();
    let (code, _, stderr) = mqbsim(&["run", "--config", "broken.toml"], cwd);
    assert_eq!(code, 2);
    assert!(stderr.trim_end().lines().last().unwrap().starts_with("error code=2 kind=parse"));

    let (code, _, _) = mqbsim(&["run", "--config", cfg.to_str().unwrap(), "--override", "time.t_final=-1"], cwd);
    assert_eq!(code, 2);
}
