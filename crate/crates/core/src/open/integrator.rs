use log::warn;
use num_complex::Complex64 as C64;

use super::{DensityOperator, Liouvillian};
use crate::closed::normalized_state;
use crate::error::{Error, Result};
use crate::mapping::BathSpec;
use crate::ops::OperatorMatrix;
use crate::trajectory::{Observer, Trajectory};

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct LindbladOptions {
    pub atol: f64,
    pub rtol: f64,
    /// First trial step (fs); estimated from the generator when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Log a warning when `ρ` develops eigenvalues below -1e-8 at an output time.
    pub monitor_positivity: bool,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-8,
            initial_step: None,
            max_steps: 10_000_000,
            monitor_positivity: false,
        }
    }
}

/// Integrates the master equation from `rho0` and records observables at
/// `times` (fs, ascending, starting at or after 0).
pub fn propagate_lindblad(
    rho0: &DensityOperator,
    h: &OperatorMatrix,
    bath: &BathSpec,
    times: &[f64],
) -> Result<Trajectory> {
    let obs = Observer::new(rho0.layout())?;
    propagate_lindblad_with(rho0, h, bath, times, &obs, LindbladOptions::default())
}

/// Convenience: starts from the pure state `psi0`.
pub fn propagate_lindblad_pure(
    psi0: &[C64],
    h: &OperatorMatrix,
    bath: &BathSpec,
    times: &[f64],
    obs: &Observer,
) -> Result<Trajectory> {
    let psi = normalized_state(psi0)?;
    let rho = DensityOperator::pure(obs.layout(), &psi)?;
    propagate_lindblad_with(&rho, h, bath, times, obs, LindbladOptions::default())
}

pub fn propagate_lindblad_with(
    rho0: &DensityOperator,
    h: &OperatorMatrix,
    bath: &BathSpec,
    times: &[f64],
    obs: &Observer,
    opts: LindbladOptions,
) -> Result<Trajectory> {
    crate::closed::check_times(times)?;
    if obs.layout() != rho0.layout() {
        return Err(Error::Layout("observer and density operator use different layouts".into()));
    }
    let l = Liouvillian::new(h, bath, rho0.layout())?;
    let n = l.dim();
    let len = n * n;
    let zero = C64::new(0.0, 0.0);
    let mut y = rho0.as_slice().to_vec();
    let mut k: Vec<Vec<C64>> = vec![vec![zero; len]; 7];
    let mut stage = vec![zero; len];
    let mut y_new = vec![zero; len];
    let mut scratch = vec![zero; 2 * len];
    let mut traj = Trajectory::default();

    let mut t = 0.0;
    l.apply(&y, &mut k[0], &mut scratch);
    let mut h_step = opts.initial_step.unwrap_or_else(|| initial_step(&y, &k[0], opts));
    let mut steps = 0usize;

    for &t_out in times {
        while t_out - t > 1e-12 * t_out.abs().max(1.0) {
            if steps >= opts.max_steps {
                return Err(Error::StepSize { t, h: h_step, err: f64::NAN });
            }
            let remaining = t_out - t;
            let hit = h_step >= remaining;
            let hs = if hit { remaining } else { h_step };
            for s in 1..7 {
                for (i, v) in stage.iter_mut().enumerate() {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s][j];
                        if a != 0.0 {
                            acc += kj[i] * (hs * a);
                        }
                    }
                    *v = acc;
                }
                l.apply(&stage, &mut k[s], &mut scratch);
            }
            // stage 6 holds the fifth-order solution (FSAL row)
            y_new.copy_from_slice(&stage);
            let mut err: f64 = 0.0;
            for i in 0..len {
                let mut e = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        e += kj[i] * E[j];
                    }
                }
                let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max((e * hs).norm() / scale);
            }
            steps += 1;
            if err <= 1.0 {
                t = if hit { t_out } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                let last = k.pop().expect("seven stages");
                k.insert(0, last);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !hit || grow < 1.0 {
                    h_step = hs * grow;
                }
            } else {
                h_step = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h_step < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSize { t, h: h_step, err });
                }
            }
        }
        obs.record_density(&mut traj, t_out, &y);
        if opts.monitor_positivity {
            let rho = DensityOperator::from_matrix(rho0.layout(), y.clone());
            if let Ok(rho) = rho {
                let ev = rho.min_eigenvalue();
                if ev < -1e-8 {
                    warn!("density matrix eigenvalue {ev:.3e} at t = {t_out} fs");
                }
            }
        }
    }
    Ok(traj)
}

fn initial_step(y: &[C64], f0: &[C64], opts: LindbladOptions) -> f64 {
    let d0 = y
        .iter()
        .map(|z| z.norm() / (opts.atol + opts.rtol * z.norm()))
        .fold(0.0, f64::max);
    let d1 = y
        .iter()
        .zip(f0)
        .map(|(z, f)| f.norm() / (opts.atol + opts.rtol * z.norm()))
        .fold(0.0, f64::max);
    if d1 <= 1e-10 {
        1.0
    } else {
        (0.01 * d0 / d1).clamp(1e-6, 1.0)
    }
}
