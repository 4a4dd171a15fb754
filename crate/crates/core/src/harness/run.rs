use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{Experiment, RunConfig};
use crate::closed::{
    compare_schemes, mqb_partition, propagate_exact_with, time_grid, trotter_error_scan, Scheme, TrotterPlan,
};
use crate::error::{Error, Result};
use crate::mapping::{
    auto_roles, interaction_count, laser_drive_requirements, map_to_mqb, resource_estimate_with_basis,
    scale_factor_bounds, solve_cooling_params, BathSpec, HardwareSpec, ModeRole, MqbParams,
};
use crate::open::{broadband_cooling_approx, ohmic_couplings, propagate_lindblad_pure};
use crate::ops::{ExpmOptions, SpaceLayout};
use crate::trajectory::{Observer, Trajectory};
use crate::vibronic::{build_hamiltonian, displace_state, franck_condon_state, random_lvc, ModelFile, VCModel};
use crate::{C64, HBAR_EV_S};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Add a creation time to output headers.
    pub timestamps: bool,
}

/// Files written by a run and one-line findings.
#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// Runs `cfg` with default options.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    run_with(cfg, RunOptions::default())
}

pub fn run_with(cfg: &RunConfig, opts: RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let mut out = Artifacts::new(cfg, opts)?;
    match cfg.experiment {
        Experiment::Propagate => propagate(cfg, &mut out)?,
        Experiment::TrotterScan => scan(cfg, &mut out)?,
        Experiment::CompareSchemes => schemes(cfg, &mut out)?,
        Experiment::OpenSystem => open_system(cfg, &mut out)?,
        Experiment::Map => map(cfg, &mut out)?,
        Experiment::Feasibility => feasibility(cfg, &mut out)?,
        Experiment::Resources => resources(cfg, &mut out)?,
    }
    Ok(out.report)
}

/// Process exit code: 2 for input errors, 4 for infeasible targets, 3 for
/// everything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Config(_)
        | Error::InvalidModel(_)
        | Error::Asymmetric { .. }
        | Error::InvalidTruncation(_) => 2,
        Error::Infeasible(_) | Error::UnreachableTarget(_) | Error::Validity(_) => 4,
        _ => 3,
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        2 => "parse",
        4 => "infeasible",
        _ => match e {
            Error::Io(_) | Error::Csv(_) => "io",
            _ => "numeric",
        },
    }
}

/// Single-line, machine-readable description of `e`.
pub fn error_line(e: &Error) -> String {
    format!("error code={} kind={} reason={:?}", exit_code(e), error_kind(e), e.to_string())
}

/// Outcome of [`validate_model`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub path: PathBuf,
    /// Violations; empty means the model is valid.
    pub issues: Vec<String>,
    /// Informational lines (mode roles, missing source).
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks a model file: shape, symmetry, positive frequencies, the `eV`
/// units tag and whether every mode has a role.
pub fn validate_model(path: &Path) -> Result<ValidationReport> {
    let file = ModelFile::load(path)?;
    let mut issues = file.check();
    let mut notes = Vec::new();
    if file.source.is_none() {
        notes.push("no literature source recorded".into());
    }
    if issues.is_empty() {
        match file.into_model() {
            Ok(model) => {
                for (j, role) in auto_roles(&model).iter().enumerate() {
                    let label = &model.mode_labels()[j];
                    let c1 = &model.c1()[j];
                    if c1.is_zero() {
                        notes.push(format!("mode {j} ({label}) has no linear coupling"));
                    } else {
                        notes.push(format!("mode {j} ({label}): {}", role_name(*role)));
                    }
                }
            }
            Err(e) => issues.push(e.to_string()),
        }
    }
    Ok(ValidationReport {
        path: path.to_owned(),
        issues,
        notes,
    })
}

fn role_name(r: ModeRole) -> &'static str {
    match r {
        ModeRole::Tuning => "tuning",
        ModeRole::Coupling => "coupling",
        ModeRole::Both => "tuning and coupling",
    }
}

struct Artifacts {
    dir: PathBuf,
    header: Vec<String>,
    report: RunReport,
}

impl Artifacts {
    fn new(cfg: &RunConfig, opts: RunOptions) -> Result<Self> {
        std::fs::create_dir_all(&cfg.output_dir)?;
        let mut header = vec![
            format!("# mqbsim {TOOL_VERSION}"),
            format!("# experiment {}", cfg.experiment.name()),
            format!("# config_sha256 {}", cfg.hash()),
        ];
        if opts.timestamps {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            header.push(format!("# created_unix {secs}"));
        }
        Ok(Self {
            dir: cfg.output_dir.clone(),
            header,
            report: RunReport::default(),
        })
    }

    fn csv(&mut self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        for line in &self.header {
            writeln!(w, "{line}")?;
        }
        body(&mut w)?;
        w.flush()?;
        self.report.files.push(path);
        Ok(())
    }

    fn trajectory(&mut self, name: &str, tr: &Trajectory) -> Result<()> {
        self.csv(name, |w| tr.write_csv(w))?;
        if !tr.snapshots.is_empty() {
            let snap = self.dir.join(name.replace(".csv", ".snap"));
            tr.save_snapshots(&snap)?;
            self.report.files.push(snap);
        }
        Ok(())
    }

    fn table(&mut self, name: &str, head: &[&str], rows: &[Vec<String>]) -> Result<()> {
        self.csv(name, |w| {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(head)?;
            for r in rows {
                c.write_record(r)?;
            }
            c.flush()?;
            Ok(())
        })
    }

    fn note(&mut self, s: String) {
        self.report.summary.push(s);
    }
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn load_model(cfg: &RunConfig) -> Result<VCModel> {
    match (&cfg.random_model, cfg.model_path()) {
        (Some(r), _) => Ok(random_lvc(r.d, r.modes, cfg.seed)),
        (None, Some(p)) => VCModel::load(p),
        (None, None) => Err(Error::Config("no model given".into())),
    }
}

fn roles(cfg: &RunConfig, model: &VCModel) -> Result<Vec<ModeRole>> {
    match &cfg.roles {
        Some(r) if r.len() != model.n_modes() => Err(Error::Config(format!(
            "{} roles given for {} modes",
            r.len(),
            model.n_modes()
        ))),
        Some(r) => Ok(r.clone()),
        None => Ok(auto_roles(model)),
    }
}

struct Setup {
    model: VCModel,
    layout: SpaceLayout,
    psi0: Vec<C64>,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let model = load_model(cfg)?;
    let layout = SpaceLayout::new(model.d(), cfg.truncations_for(model.n_modes())?)?;
    let mut psi0 = franck_condon_state(&layout, cfg.initial.electronic)?;
    if cfg.initial.displacements.len() > model.n_modes() {
        return Err(Error::Config(format!(
            "{} displacements given for {} modes",
            cfg.initial.displacements.len(),
            model.n_modes()
        )));
    }
    for (k, &beta) in cfg.initial.displacements.iter().enumerate() {
        psi0 = displace_state(&psi0, k, beta, &layout)?;
    }
    Ok(Setup { model, layout, psi0 })
}

fn plan(cfg: &RunConfig, s: &Setup) -> Result<TrotterPlan> {
    let params = map_to_mqb(&s.model, 1.0, &roles(cfg, &s.model)?)?;
    let (h0, parts) = mqb_partition(&params, &s.layout, cfg.trotter.stark_split.as_deref())?;
    TrotterPlan::new(h0, parts, cfg.trotter.scheme, cfg.trotter.dt)
}

fn propagate(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let s = setup(cfg)?;
    let h = build_hamiltonian(&s.model, &s.layout)?;
    let times = time_grid(cfg.time.t_final, cfg.time.dt)?;
    let obs = Observer::new(&s.layout)?.with_snapshots(cfg.snapshots.clone());
    let tr = propagate_exact_with(&h, &s.psi0, &times, &obs, ExpmOptions::default())?;
    out.note(format!("max population-sum error {:.3e}", tr.max_population_sum_error()));
    out.trajectory("trajectory.csv", &tr)
}

fn scan(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let s = setup(cfg)?;
    let p = plan(cfg, &s)?;
    let res = trotter_error_scan(&p, &cfg.trotter.dt_list, cfg.time.t_final, &s.psi0, &s.layout)?;
    match res.fitted_order {
        Some(o) => out.note(format!("fitted order {o:.4}")),
        None => out.note("fitted order undefined (infidelity at round-off)".into()),
    }
    out.csv("trotter_scan.csv", |w| res.write_csv(w))
}

fn schemes(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let s = setup(cfg)?;
    let p = plan(cfg, &s)?;
    let res = p.with_scheme(Scheme::Rescaling);
    let rew = p.with_scheme(Scheme::Rewinding);
    let cmp = compare_schemes(&res, &rew, &s.psi0, cfg.time.t_final, &s.layout)?;
    out.note(format!("max fidelity difference {:.4e}", cmp.max_abs_difference));
    out.csv("schemes.csv", |w| cmp.write_csv(w))
}

fn bath_for(cfg: &RunConfig, model: &VCModel, gamma0: Option<f64>) -> Result<BathSpec> {
    let gamma = match (&cfg.bath.gamma, gamma0) {
        (Some(g), _) => g.clone(),
        (None, Some(g0)) => ohmic_couplings(g0, cfg.bath.omega_cut, model.omega())?,
        (None, None) => return Err(Error::Config("bath needs `gamma0` or `gamma`".into())),
    };
    if cfg.bath.temperature > 0.0 {
        BathSpec::thermal(gamma, model.omega(), cfg.bath.temperature)
    } else {
        BathSpec::zero_temperature(gamma)
    }
}

fn open_system(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let s = setup(cfg)?;
    let h = build_hamiltonian(&s.model, &s.layout)?;
    let times = time_grid(cfg.time.t_final, cfg.time.dt)?;
    let points: Vec<Option<f64>> = if cfg.bath.gamma.is_some() {
        vec![None]
    } else if cfg.bath.gamma0.is_empty() {
        return Err(Error::Config("open-system needs `bath.gamma0` or `bath.gamma`".into()));
    } else {
        cfg.bath.gamma0.iter().map(|&g| Some(g)).collect()
    };
    let obs = Observer::new(&s.layout)?.with_snapshots(cfg.snapshots.clone());
    let results = points
        .par_iter()
        .map(|&g0| {
            let bath = bath_for(cfg, &s.model, g0)?;
            let full = propagate_lindblad_pure(&s.psi0, &h, &bath, &times, &obs)?;
            let approx = if cfg.bath.broadband {
                let a = broadband_cooling_approx(&bath);
                if !a.valid {
                    log::warn!("broadband approximation used with n̄ >= 1");
                }
                Some(propagate_lindblad_pure(&s.psi0, &h, &a.bath, &times, &obs)?)
            } else {
                None
            };
            Ok((g0, bath, full, approx))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, (g0, bath, full, approx)) in results.iter().enumerate() {
        out.trajectory(&format!("open_{i}.csv"), full)?;
        let diff = match approx {
            Some(a) => {
                out.trajectory(&format!("open_{i}_broadband.csv"), a)?;
                Some(full.max_population_difference(a)?)
            }
            None => None,
        };
        let purity = full.purity.as_deref().unwrap_or(&[]);
        let trace = full.trace_error.as_deref().unwrap_or(&[]);
        rows.push(vec![
            i.to_string(),
            g0.map(num).unwrap_or_default(),
            bath.gamma.iter().map(|g| num(*g)).collect::<Vec<_>>().join(" "),
            bath.nbar.iter().map(|n| num(*n)).collect::<Vec<_>>().join(" "),
            num(purity.last().copied().unwrap_or(1.0)),
            num(trace.iter().copied().fold(0.0, f64::max)),
            diff.map(num).unwrap_or_default(),
        ]);
        if let Some(d) = diff {
            out.note(format!("point {i}: broadband max population difference {d:.3e}"));
        }
    }
    out.table(
        "open_sweep.csv",
        &[
            "index",
            "gamma0",
            "gamma_per_fs",
            "nbar",
            "final_purity",
            "max_trace_error",
            "broadband_max_pop_diff",
        ],
        &rows,
    )
}

fn hardware(cfg: &RunConfig) -> Result<Option<HardwareSpec>> {
    cfg.hardware_path().map(HardwareSpec::load).transpose()
}

/// Trotter parts needed: modes with any linear coupling.
fn active_modes(model: &VCModel) -> usize {
    model.c1().iter().filter(|b| !b.is_zero()).count().max(1)
}

fn map(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let model = load_model(cfg)?;
    let hw = hardware(cfg)?;
    let f = match (cfg.map.scale_factor, &hw) {
        (Some(f), _) => f,
        (None, Some(hw)) => {
            scale_factor_bounds(cfg.time.t_final, hw, active_modes(&model), &model, cfg.trotter.dt)?.recommended
        }
        (None, None) => 1.0,
    };
    let params = map_to_mqb(&model, f, &roles(cfg, &model)?)?;
    out.note(format!("scale factor {f:.6e}"));
    out.table(
        "mqb_params.csv",
        &["quantity", "state_n", "state_m", "mode", "value_ev", "value_rad_s"],
        &param_rows(&params),
    )?;
    let Some(hw) = hw else { return Ok(()) };
    let drives = laser_drive_requirements(&params, &hw)?;
    let mut rows = Vec::new();
    for (j, row) in drives.theta.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            if v != 0.0 {
                rows.push(vec!["theta".into(), n.to_string(), n.to_string(), j.to_string(), num(v), num(v / HBAR_EV_S)]);
            }
        }
    }
    for (k, b) in drives.omega.iter().enumerate() {
        for n in 0..b.d() {
            for m in n + 1..b.d() {
                let v = b.get(n, m);
                if v != 0.0 {
                    rows.push(vec!["omega".into(), n.to_string(), m.to_string(), k.to_string(), num(v), num(v / HBAR_EV_S)]);
                }
            }
        }
    }
    out.table("drives.csv", &["quantity", "state_n", "state_m", "mode", "value_ev", "value_rad_s"], &rows)?;

    let g0 = cfg.bath.gamma0.first().copied();
    if cfg.bath.gamma.is_none() && g0.is_none() {
        return Ok(());
    }
    let bath = bath_for(cfg, &model, g0)?;
    let rates = bath.simulator_rates(f);
    let mut rows = Vec::new();
    for (j, (&g, &nb)) in rates.iter().zip(&bath.nbar).enumerate() {
        let mut row = vec![j.to_string(), num(g), num(nb)];
        match solve_cooling_params(g, nb, &hw, j) {
            Ok(sol) => {
                row.extend([sol.params.detuning, sol.params.linewidth, sol.params.rabi].map(num));
                row.push("ok".into());
            }
            Err(e) => {
                row.extend([String::new(), String::new(), String::new()]);
                row.push(e.to_string());
            }
        }
        rows.push(row);
    }
    out.table(
        "cooling.csv",
        &["mode", "gamma_per_s", "nbar", "detuning_rad_s", "linewidth_rad_s", "rabi_rad_s", "status"],
        &rows,
    )
}

fn param_rows(p: &MqbParams) -> Vec<Vec<String>> {
    let row = |q: &str, n: String, m: String, j: String, v: f64| vec![q.to_string(), n, m, j, num(v), num(v / HBAR_EV_S)];
    let mut rows = Vec::new();
    for (j, &d) in p.delta.iter().enumerate() {
        rows.push(row("delta", String::new(), String::new(), j.to_string(), d));
    }
    for (j, r) in p.theta_prime.iter().enumerate() {
        for (n, &v) in r.iter().enumerate() {
            if v != 0.0 {
                rows.push(row("theta_prime", n.to_string(), n.to_string(), j.to_string(), v));
            }
        }
    }
    for (k, b) in p.omega_prime.iter().enumerate() {
        for n in 0..b.d() {
            for m in n + 1..b.d() {
                if b.get(n, m) != 0.0 {
                    rows.push(row("omega_prime", n.to_string(), m.to_string(), k.to_string(), b.get(n, m)));
                }
            }
        }
    }
    for (n, &c) in p.chi.iter().enumerate() {
        rows.push(row("chi", n.to_string(), n.to_string(), String::new(), c));
    }
    rows
}

fn feasibility(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let model = load_model(cfg)?;
    let hw = hardware(cfg)?.ok_or_else(|| Error::Config("feasibility needs a `hardware` file".into()))?;
    let m = active_modes(&model);
    let b = scale_factor_bounds(cfg.time.t_final, &hw, m, &model, cfg.trotter.dt)?;
    out.table(
        "feasibility.csv",
        &["parts", "t_max_fs", "f_min", "f_max1", "f_max2", "recommended", "feasible"],
        &[vec![
            m.to_string(),
            num(cfg.time.t_final),
            num(b.f_min),
            num(b.f_max1),
            num(b.f_max2),
            num(b.recommended),
            b.feasible.to_string(),
        ]],
    )?;
    if !b.feasible {
        return Err(Error::Infeasible(format!(
            "F_min = {:.3e} > F_max = {:.3e}",
            b.f_min, b.recommended
        )));
    }
    out.note(format!("feasible: F in [{:.3e}, {:.3e}]", b.f_min, b.recommended));
    Ok(())
}

fn resources(cfg: &RunConfig, out: &mut Artifacts) -> Result<()> {
    let model = if cfg.model.is_some() || cfg.random_model.is_some() {
        Some(load_model(cfg)?)
    } else {
        None
    };
    let d = cfg.resources.d.or(model.as_ref().map(VCModel::d)).unwrap_or(2);
    let mut rows = Vec::new();
    for &n in &cfg.resources.modes {
        let r = resource_estimate_with_basis(n, d, cfg.resources.basis)?;
        rows.push(vec![
            r.n_modes.to_string(),
            r.d.to_string(),
            r.qubits.to_string(),
            r.ions.to_string(),
            r.ions_with_carrier.to_string(),
            r.resonators.to_string(),
            r.basis_size.to_string(),
            format!("{:.6}", r.classical_bytes_log10),
            r.classical_bytes_sci(),
        ]);
    }
    out.table(
        "resources.csv",
        &[
            "n_modes",
            "d",
            "qubits",
            "ions",
            "ions_with_carrier",
            "resonators",
            "basis_size",
            "classical_bytes_log10",
            "classical_bytes",
        ],
        &rows,
    )?;
    if let Some(model) = model {
        let orders: &[usize] = if model.is_linear() { &[1] } else { &[1, 2] };
        let rows = orders
            .iter()
            .map(|&k| {
                let c = interaction_count(&model, k)?;
                Ok(vec![k.to_string(), c.formula.to_string(), c.actual.to_string()])
            })
            .collect::<Result<Vec<_>>>()?;
        out.table("interactions.csv", &["order", "formula", "actual"], &rows)?;
    }
    Ok(())
}
