//! Action of `exp(-iHt)` on a state vector.
//!
//! Uses a shifted, scaled Taylor series applied directly to the vector: the
//! mean diagonal is taken out as a phase, the interval is split into `s`
//! substeps with `‖H - μ‖∞·|t|/s <= THETA`, and each substep sums terms until
//! two consecutive ones fall below the tolerance. The full matrix exponential
//! is never formed. Diagonal operators are applied as exact phases.

use num_complex::Complex64 as C64;

use super::OperatorMatrix;
use crate::error::{Error, Result};

/// Default relative error target for one application.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Maximum scaled norm per Taylor substep.
const THETA: f64 = 2.0;

const MAX_TERMS: usize = 60;

#[derive(Clone, Copy, Debug)]
pub struct ExpmOptions {
    /// Relative error target of the result.
    pub tol: f64,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL }
    }
}

pub(crate) fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_state(h: &OperatorMatrix, state: &[C64]) -> Result<()> {
    if state.len() != h.dim() {
        return Err(Error::Layout(format!(
            "state length {} does not match operator dimension {}",
            state.len(),
            h.dim()
        )));
    }
    if !state.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("state vector"));
    }
    Ok(())
}

/// Returns `exp(-i H t) · state` with the default tolerance.
pub fn matrix_exponential_apply(h: &OperatorMatrix, state: &[C64], t: f64) -> Result<Vec<C64>> {
    expm_apply_with(h, state, t, ExpmOptions::default())
}

pub fn expm_apply_with(
    h: &OperatorMatrix,
    state: &[C64],
    t: f64,
    opts: ExpmOptions,
) -> Result<Vec<C64>> {
    let prop = Propagator::new(h, t, opts)?;
    check_state(h, state)?;
    let mut out = state.to_vec();
    prop.apply_in_place(&mut out);
    Ok(out)
}

/// A reusable `exp(-iHt)` for fixed `H` and `t`.
///
/// Validation and norm estimation happen once, so repeated Trotter steps only
/// pay for the matrix–vector products.
#[derive(Clone, Debug)]
pub struct Propagator {
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Identity,
    Phases(Vec<C64>),
    Taylor {
        h: OperatorMatrix,
        shift: f64,
        /// `-i t / s`
        step: C64,
        substeps: usize,
        /// `exp(-i shift t)`
        phase: C64,
        tol: f64,
    },
}

impl Propagator {
    pub fn new(h: &OperatorMatrix, t: f64, opts: ExpmOptions) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::NonFinite("propagation time"));
        }
        if !h.all_finite() {
            return Err(Error::NonFinite("Hamiltonian"));
        }
        h.ensure_hermitian()?;
        if t == 0.0 || h.nnz() == 0 {
            return Ok(Self { kind: Kind::Identity });
        }
        if h.is_diagonal() {
            let phases = h
                .diagonal_values()
                .into_iter()
                .map(|e| C64::new(0.0, -e.re * t).exp())
                .collect();
            return Ok(Self {
                kind: Kind::Phases(phases),
            });
        }
        let n = h.dim();
        let shift = h.trace().re / n as f64;
        let shifted_norm = (0..n)
            .map(|i| {
                let mut diag_seen = false;
                let mut s: f64 = h
                    .row(i)
                    .map(|(j, v)| {
                        if j == i {
                            diag_seen = true;
                            (v - shift).norm()
                        } else {
                            v.norm()
                        }
                    })
                    .sum();
                if !diag_seen {
                    s += shift.abs();
                }
                s
            })
            .fold(0.0, f64::max);
        let substeps = ((shifted_norm * t.abs()) / THETA).ceil().max(1.0) as usize;
        Ok(Self {
            kind: Kind::Taylor {
                h: h.clone(),
                shift,
                step: C64::new(0.0, -t / substeps as f64),
                substeps,
                phase: C64::new(0.0, -shift * t).exp(),
                tol: opts.tol / substeps as f64,
            },
        })
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::Identity => None,
            Kind::Phases(p) => Some(p.len()),
            Kind::Taylor { h, .. } => Some(h.dim()),
        }
    }

    pub fn apply(&self, state: &[C64]) -> Vec<C64> {
        let mut out = state.to_vec();
        self.apply_in_place(&mut out);
        out
    }

    pub fn apply_in_place(&self, v: &mut [C64]) {
        match &self.kind {
            Kind::Identity => {}
            Kind::Phases(p) => {
                for (x, ph) in v.iter_mut().zip(p) {
                    *x *= ph;
                }
            }
            Kind::Taylor {
                h,
                shift,
                step,
                substeps,
                phase,
                tol,
            } => {
                let n = v.len();
                let mut term = vec![C64::new(0.0, 0.0); n];
                let mut scratch = vec![C64::new(0.0, 0.0); n];
                for _ in 0..*substeps {
                    term.copy_from_slice(v);
                    let mut prev = f64::INFINITY;
                    for k in 1..=MAX_TERMS {
                        h.apply_into(&term, &mut scratch);
                        let c = step / k as f64;
                        for (t, s) in term.iter_mut().zip(&scratch) {
                            *t = (s - *t * shift) * c;
                        }
                        for (x, t) in v.iter_mut().zip(&term) {
                            *x += t;
                        }
                        let tn = norm2(&term);
                        let bound = tol * norm2(v);
                        if tn <= bound && prev <= bound {
                            break;
                        }
                        prev = tn;
                    }
                }
                for x in v.iter_mut() {
                    *x *= phase;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::fock::{position_q, sigma_x};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = OperatorMatrix::zeros(3);
        let psi = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
        assert_eq!(matrix_exponential_apply(&h, &psi, 5.0).unwrap(), psi);
    }

    #[test]
    fn diagonal_gives_phases() {
        let e = [0.3, -1.2, 2.5];
        let h = OperatorMatrix::diagonal(&e);
        let psi = vec![C64::new(1.0 / 3f64.sqrt(), 0.0); 3];
        let t = 1.7;
        let out = matrix_exponential_apply(&h, &psi, t).unwrap();
        for k in 0..3 {
            let expect = psi[k] * C64::new(0.0, -e[k] * t).exp();
            assert!((out[k] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn rabi_quarter_period() {
        // exp(-i σx π/2)|0⟩ = -i|1⟩
        let psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let out = matrix_exponential_apply(&sigma_x(), &psi, FRAC_PI_2).unwrap();
        assert!(out[0].norm() < 1e-12);
        assert!((out[1] - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn rabi_oscillation_closed_form() {
        let psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        for &t in &[0.1, 1.0, 7.3, 40.0] {
            let out = matrix_exponential_apply(&sigma_x(), &psi, t).unwrap();
            assert!((out[0] - C64::new(t.cos(), 0.0)).norm() < 1e-10);
            assert!((out[1] - C64::new(0.0, -t.sin())).norm() < 1e-10);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = OperatorMatrix::from_triplets(2, [(0, 1, C64::new(1.0, 0.0))]);
        let psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(
            matrix_exponential_apply(&h, &psi, 1.0),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn non_finite_rejected() {
        let h = OperatorMatrix::diagonal(&[f64::NAN, 1.0]);
        let psi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(
            matrix_exponential_apply(&h, &psi, 1.0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn norm_preserved_for_large_argument() {
        let q = position_q(30).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); 30];
        psi[0] = C64::new(1.0, 0.0);
        let out = matrix_exponential_apply(&q, &psi, 25.0).unwrap();
        assert!((norm2(&out) - 1.0).abs() < 1e-9);
    }
}
