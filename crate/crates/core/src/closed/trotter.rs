use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::exact::{fidelity, normalized_state, step_count};
use crate::error::{Error, Result};
use crate::mapping::MqbParams;
use crate::ops::{ExpmOptions, OperatorMatrix, Propagator, SpaceLayout};
use crate::trajectory::{Observer, Trajectory};
use crate::HBAR_EV_FS;

/// First-order analog Trotter schemes for an always-on `H0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `Π_k exp(-i(H0/M + H_k)dt)`.
    Rescaling,
    /// `exp(-iH0 dt) Π_k (exp(+iH0 dt) exp(-i(H0 + H_k)dt))`.
    Rewinding,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rescaling" => Ok(Self::Rescaling),
            "rewinding" => Ok(Self::Rewinding),
            other => Err(Error::InvalidParameter(format!(
                "unknown Trotter scheme '{other}', expected rescaling or rewinding"
            ))),
        }
    }
}

/// `H = H0 + Σ_k H_k` split for Trotterization, energies in eV, `dt` in fs.
#[derive(Clone, Debug)]
pub struct TrotterPlan {
    h0: OperatorMatrix,
    parts: Vec<OperatorMatrix>,
    pub scheme: Scheme,
    dt: f64,
    pub expm: ExpmOptions,
}

impl TrotterPlan {
    pub fn new(h0: OperatorMatrix, parts: Vec<OperatorMatrix>, scheme: Scheme, dt: f64) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("a Trotter plan needs at least one part".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("Trotter step must be positive, got {dt}")));
        }
        h0.ensure_hermitian()?;
        for (k, p) in parts.iter().enumerate() {
            if p.dim() != h0.dim() {
                return Err(Error::Layout(format!(
                    "part {} has dimension {} but H0 has {}",
                    k + 1,
                    p.dim(),
                    h0.dim()
                )));
            }
            p.ensure_hermitian()?;
        }
        Ok(Self {
            h0,
            parts,
            scheme,
            dt,
            expm: ExpmOptions::default(),
        })
    }

    pub fn h0(&self) -> &OperatorMatrix {
        &self.h0
    }

    pub fn parts(&self) -> &[OperatorMatrix] {
        &self.parts
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        let mut p = Self::new(self.h0.clone(), self.parts.clone(), self.scheme, dt)?;
        p.expm = self.expm;
        Ok(p)
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self { scheme, ..self.clone() }
    }

    /// `H0 + Σ_k H_k`.
    pub fn total(&self) -> Result<OperatorMatrix> {
        let mut terms = vec![(1.0, &self.h0)];
        terms.extend(self.parts.iter().map(|p| (1.0, p)));
        OperatorMatrix::linear_combination(self.dim(), &terms)?.into_hermitian()
    }

    /// Factors of one step, in the order they act on the state.
    pub fn step_factors(&self) -> Result<Vec<Propagator>> {
        let t = self.dt / HBAR_EV_FS;
        let m = self.parts.len() as f64;
        let mut out = Vec::new();
        match self.scheme {
            Scheme::Rescaling => {
                for p in &self.parts {
                    let h = self.h0.scale_real(1.0 / m).add(p)?.into_hermitian()?;
                    out.push(Propagator::new(&h, t, self.expm)?);
                }
            }
            Scheme::Rewinding => {
                let rewind = Propagator::new(&self.h0, -t, self.expm)?;
                for (k, p) in self.parts.iter().enumerate() {
                    if k > 0 {
                        out.push(rewind.clone());
                    }
                    let h = self.h0.add(p)?.into_hermitian()?;
                    out.push(Propagator::new(&h, t, self.expm)?);
                }
            }
        }
        Ok(out)
    }

    /// Whether two plans share `H0`, parts and `dt`.
    pub fn same_partition(&self, other: &Self) -> bool {
        let eq = |a: &OperatorMatrix, b: &OperatorMatrix| {
            a.dim() == b.dim() && a.add_scaled(b, C64::new(-1.0, 0.0)).map(|d| d.max_abs() == 0.0).unwrap_or(false)
        };
        self.dt == other.dt
            && self.parts.len() == other.parts.len()
            && eq(&self.h0, &other.h0)
            && self.parts.iter().zip(&other.parts).all(|(a, b)| eq(a, b))
    }
}

/// Splits simulator parameters into `H0 = Σ δ_j a†a` and one part per mode
/// holding that mode's drive terms plus a share of the traceless Stark term.
///
/// `stark_split` gives each part's share (default equal, `Δχ/M` each for
/// two levels); shares must sum to 1. Modes without drive terms are omitted
/// unless they carry a Stark share.
pub fn mqb_partition(
    params: &MqbParams,
    layout: &SpaceLayout,
    stark_split: Option<&[f64]>,
) -> Result<(OperatorMatrix, Vec<OperatorMatrix>)> {
    let mean = params.chi.iter().sum::<f64>() / params.d() as f64;
    let groups = params.term_groups(layout, mean)?;
    let dim = layout.dim();
    let combine = |terms: &[(f64, OperatorMatrix)], scale: f64| -> Result<OperatorMatrix> {
        let refs: Vec<(f64, &OperatorMatrix)> = terms.iter().map(|(c, o)| (c * scale, o)).collect();
        OperatorMatrix::linear_combination(dim, &refs)
    };
    let h0 = combine(&groups[0], 1.0)?.into_hermitian()?;
    let stark = combine(&groups[1], 1.0)?;
    let modes = &groups[2..];
    let n = modes.len();
    let shares: Vec<f64> = match stark_split {
        Some(s) => {
            if s.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "Stark split has {} shares for {n} parts",
                    s.len()
                )));
            }
            if (s.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter("Stark split shares must sum to 1".into()));
            }
            s.to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    let mut parts = Vec::new();
    for (g, share) in modes.iter().zip(shares) {
        if g.is_empty() && share == 0.0 {
            continue;
        }
        let part = combine(g, 1.0)?.add_scaled(&stark, C64::new(share, 0.0))?;
        parts.push(part.into_hermitian()?);
    }
    Ok((h0, parts))
}

/// Trotterized propagation to `t_final` (fs), observables at step boundaries.
pub fn propagate_trotter(plan: &TrotterPlan, psi0: &[C64], t_final: f64, layout: &SpaceLayout) -> Result<Trajectory> {
    let obs = Observer::new(layout)?;
    let (traj, _) = run_trotter(plan, psi0, t_final, &obs, false)?;
    Ok(traj)
}

/// Trotterized run together with the exact run on the same grid; the first
/// trajectory carries the fidelity with the second.
pub fn trotter_vs_exact(
    plan: &TrotterPlan,
    psi0: &[C64],
    t_final: f64,
    layout: &SpaceLayout,
) -> Result<(Trajectory, Trajectory)> {
    let obs = Observer::new(layout)?;
    let (traj, exact) = run_trotter(plan, psi0, t_final, &obs, true)?;
    Ok((traj, exact.expect("exact run requested")))
}

pub(crate) fn run_trotter(
    plan: &TrotterPlan,
    psi0: &[C64],
    t_final: f64,
    obs: &Observer,
    with_exact: bool,
) -> Result<(Trajectory, Option<Trajectory>)> {
    if plan.dim() != obs.layout().dim() || psi0.len() != plan.dim() {
        return Err(Error::Layout(format!(
            "plan dimension {}, state length {}, layout dimension {}",
            plan.dim(),
            psi0.len(),
            obs.layout().dim()
        )));
    }
    let steps = step_count(t_final, plan.dt)?;
    let factors = plan.step_factors()?;
    let exact_prop = if with_exact {
        Some(Propagator::new(&plan.total()?, plan.dt / HBAR_EV_FS, plan.expm)?)
    } else {
        None
    };
    let mut psi = normalized_state(psi0)?;
    let mut reference = psi.clone();
    let mut traj = Trajectory::default();
    let mut exact = with_exact.then(Trajectory::default);
    let mut fid = Vec::new();
    for k in 0..=steps {
        if k > 0 {
            for f in &factors {
                f.apply_in_place(&mut psi);
            }
            if let Some(p) = &exact_prop {
                p.apply_in_place(&mut reference);
            }
        }
        let t = k as f64 * plan.dt;
        obs.record_state(&mut traj, t, &psi);
        if let Some(e) = exact.as_mut() {
            obs.record_state(e, t, &reference);
            fid.push(fidelity(&reference, &psi)?);
        }
    }
    if with_exact {
        traj.fidelity = Some(fid);
    }
    Ok((traj, exact))
}
