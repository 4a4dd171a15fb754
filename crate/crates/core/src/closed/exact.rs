use log::warn;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ops::expm::norm2;
use crate::ops::{ExpmOptions, OperatorMatrix, Propagator, SpaceLayout};
use crate::trajectory::{Observer, Trajectory};
use crate::HBAR_EV_FS;

/// Returns a unit-norm copy of `psi`; small deviations (< 1e-6) are
/// corrected with a warning, larger ones rejected.
pub fn normalized_state(psi: &[C64]) -> Result<Vec<C64>> {
    if !psi.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let n = norm2(psi);
    let dev = (n - 1.0).abs();
    if dev > 1e-6 {
        return Err(Error::Unnormalized(n));
    }
    if dev > 1e-12 {
        warn!("initial state norm {n} renormalized");
        return Ok(psi.iter().map(|z| z / n).collect());
    }
    Ok(psi.to_vec())
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(psi_a: &[C64], psi_b: &[C64]) -> Result<f64> {
    if psi_a.len() != psi_b.len() {
        return Err(Error::Layout(format!(
            "state dimensions differ: {} vs {}",
            psi_a.len(),
            psi_b.len()
        )));
    }
    let overlap: C64 = psi_a.iter().zip(psi_b).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm_sqr())
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    if !times.iter().all(|t| t.is_finite()) {
        return Err(Error::NonFinite("time grid"));
    }
    if times[0] < 0.0 {
        return Err(Error::InvalidParameter(format!("time grid starts at {} < 0", times[0])));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("time grid must be ascending".into()));
    }
    Ok(())
}

/// Uniform grid `0, dt, …, t_final` (fs).
pub fn time_grid(t_final: f64, dt: f64) -> Result<Vec<f64>> {
    let steps = step_count(t_final, dt)?;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Number of steps of size `dt` in `t_final`, which must be an integer
/// multiple of `dt` to within 1e-9 relative.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("final time must be non-negative, got {t_final}")));
    }
    let r = t_final / dt;
    let n = r.round();
    if (r - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "final time {t_final} fs is not a multiple of the step {dt} fs"
        )));
    }
    Ok(n as usize)
}

/// `ψ(t) = exp(-iHt/ħ) ψ0` sampled on `times` (fs), `H` in eV.
pub fn propagate_exact(h: &OperatorMatrix, psi0: &[C64], times: &[f64], layout: &SpaceLayout) -> Result<Trajectory> {
    propagate_exact_with(h, psi0, times, &Observer::new(layout)?, ExpmOptions::default())
}

pub fn propagate_exact_with(
    h: &OperatorMatrix,
    psi0: &[C64],
    times: &[f64],
    observer: &Observer,
    opts: ExpmOptions,
) -> Result<Trajectory> {
    h.ensure_hermitian()?;
    if h.dim() != observer.layout().dim() || psi0.len() != h.dim() {
        return Err(Error::Layout(format!(
            "Hamiltonian dimension {}, state length {}, layout dimension {}",
            h.dim(),
            psi0.len(),
            observer.layout().dim()
        )));
    }
    check_times(times)?;
    let mut psi = normalized_state(psi0)?;
    let mut traj = Trajectory::default();
    let mut cached: Option<(f64, Propagator)> = None;
    let mut t_prev = 0.0;
    for &t in times {
        let step = t - t_prev;
        if step > 0.0 {
            let reuse = matches!(&cached, Some((s, _)) if (s - step).abs() <= 1e-12 * step);
            if !reuse {
                cached = Some((step, Propagator::new(h, step / HBAR_EV_FS, opts)?));
            }
            cached.as_ref().expect("propagator cached").1.apply_in_place(&mut psi);
        }
        observer.record_state(&mut traj, t, &psi);
        t_prev = t;
    }
    Ok(traj)
}
