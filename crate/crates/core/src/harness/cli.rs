use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{Experiment, RunConfig};
use super::run::{error_line, exit_code, run_with, validate_model, RunOptions};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "mqbsim", version, about = "Vibronic dynamics and mixed qudit-boson simulator mapping")]
pub struct Cli {
    /// Worker threads for sweeps and large matrix products.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run(RunArgs),
    /// Check a model file.
    Validate {
        model: PathBuf,
    },
    /// Map a model to simulator parameters.
    Map(RunArgs),
    /// Tabulate hardware resources and interaction counts.
    Resources(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Model file; overrides `model` in the config.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Dotted config key, e.g. `trotter.dt=0.25`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory; overrides `output_dir`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for random models; overrides `seed`.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Add a creation time to output headers.
    #[arg(long)]
    pub timestamps: bool,
}

fn quoted(p: &std::path::Path) -> String {
    toml::Value::String(p.to_string_lossy().into_owned()).to_string()
}

impl RunArgs {
    /// Builds the config; `force` fixes the experiment kind.
    pub fn config(&self, force: Option<Experiment>) -> Result<RunConfig> {
        let mut ov = Vec::new();
        if let Some(e) = force {
            ov.push(format!("experiment=\"{}\"", e.name()));
        }
        if let Some(m) = &self.model {
            ov.push(format!("model={}", quoted(&std::path::absolute(m)?)));
        }
        ov.extend(self.overrides.iter().cloned());
        if let Some(o) = &self.out {
            ov.push(format!("output_dir={}", quoted(o)));
        }
        if let Some(s) = self.seed {
            ov.push(format!("seed={s}"));
        }
        match &self.config {
            Some(p) => RunConfig::load(p, &ov),
            None if force.is_some() => RunConfig::from_table(toml::Table::new(), &ov, PathBuf::from(".")),
            None => Err(Error::Config("--config is required".into())),
        }
    }
}

/// Runs the command line; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    let (args, force) = match cmd {
        Command::Validate { model } => {
            let r = validate_model(&model)?;
            for n in &r.notes {
                println!("note: {n}");
            }
            for i in &r.issues {
                println!("issue: {i}");
            }
            if r.is_valid() {
                println!("ok: {}", model.display());
                return Ok(0);
            }
            eprintln!(
                "error code=2 kind=invalid-model reason={:?}",
                format!("{} issue(s): {}", r.issues.len(), r.issues.join("; "))
            );
            return Ok(2);
        }
        Command::Run(a) => (a, None),
        Command::Map(a) => (a, Some(Experiment::Map)),
        Command::Resources(a) => (a, Some(Experiment::Resources)),
    };
    let cfg = args.config(force)?;
    let report = run_with(&cfg, RunOptions { timestamps: args.timestamps })?;
    for s in &report.summary {
        println!("{s}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(0)
}
