use std::fmt;

use crate::error::{Error, Result};
use crate::vibronic::VCModel;

/// Qubits per simulated mode in a digital encoding.
pub const QUBITS_PER_MODE: usize = 8;
/// Motional modes hosted per trapped ion.
pub const MODES_PER_ION: usize = 3;
/// Modes per microwave resonator.
pub const MODES_PER_RESONATOR: usize = 20;
/// Default Fock basis size per mode for the classical estimate.
pub const DEFAULT_BASIS: usize = 20;

/// Hardware and memory needed to simulate `n_modes` modes and `d` states.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceReport {
    pub n_modes: usize,
    pub d: usize,
    pub qubits: usize,
    /// Ions hosting the modes alone.
    pub ions: usize,
    /// Ions when the qudit gets a dedicated carrier ion.
    pub ions_with_carrier: usize,
    pub resonators: usize,
    pub basis_size: usize,
    /// `log10` of `16 · d · b^N` bytes for a dense complex wavefunction.
    pub classical_bytes_log10: f64,
}

impl ResourceReport {
    /// Classical memory in bytes; infinite when it overflows `f64`.
    pub fn classical_bytes(&self) -> f64 {
        10f64.powf(self.classical_bytes_log10)
    }

    /// Classical memory as `m.mmme±x` bytes, valid beyond `f64` range.
    pub fn classical_bytes_sci(&self) -> String {
        let e = self.classical_bytes_log10.floor();
        let mut mant = 10f64.powf(self.classical_bytes_log10 - e);
        let mut e = e as i64;
        if mant >= 9.9995 {
            mant /= 10.0;
            e += 1;
        }
        format!("{mant:.3}e{e}")
    }
}

impl fmt::Display for ResourceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modes N = {}, electronic states d = {}", self.n_modes, self.d)?;
        writeln!(f, "digital qubits ({QUBITS_PER_MODE} per mode + qudit): {}", self.qubits)?;
        writeln!(f, "trapped ions ({MODES_PER_ION} modes per ion): {}", self.ions)?;
        writeln!(f, "trapped ions with a separate qudit carrier: {}", self.ions_with_carrier)?;
        writeln!(f, "microwave resonators ({MODES_PER_RESONATOR} modes each): {}", self.resonators)?;
        write!(
            f,
            "classical memory (basis {} per mode): {} bytes",
            self.basis_size,
            self.classical_bytes_sci()
        )
    }
}

pub fn resource_estimate(n_modes: usize, d: usize) -> Result<ResourceReport> {
    resource_estimate_with_basis(n_modes, d, DEFAULT_BASIS)
}

pub fn resource_estimate_with_basis(n_modes: usize, d: usize, basis: usize) -> Result<ResourceReport> {
    if n_modes == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need at least two electronic states, got {d}")));
    }
    if basis < 2 {
        return Err(Error::InvalidTruncation(basis));
    }
    let ions = n_modes.div_ceil(MODES_PER_ION);
    Ok(ResourceReport {
        n_modes,
        d,
        qubits: QUBITS_PER_MODE * n_modes + (d as f64).log2().ceil() as usize,
        ions,
        ions_with_carrier: ions + 1,
        resonators: n_modes.div_ceil(MODES_PER_RESONATOR),
        basis_size: basis,
        classical_bytes_log10: (16.0 * d as f64).log10() + n_modes as f64 * (basis as f64).log10(),
    })
}

/// Dense upper bound and actual number of nonzero electronic coupling terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InteractionCount {
    /// `N^k d (d + 1) / 2`.
    pub formula: usize,
    /// Nonzero `c^{(n,m)}` with `n <= m`, over ordered mode tuples.
    pub actual: usize,
}

pub fn interaction_count(model: &VCModel, order: usize) -> Result<InteractionCount> {
    let (d, n) = (model.d(), model.n_modes());
    let upper = |b: &crate::vibronic::CoefMatrix| {
        (0..d).flat_map(|i| (i..d).map(move |k| (i, k))).filter(|&(i, k)| b.get(i, k) != 0.0).count()
    };
    let actual = match order {
        1 => model.c1().iter().map(upper).sum(),
        2 => model.c2().iter().flatten().map(upper).sum(),
        k => return Err(Error::Unsupported(format!("interaction order {k}; only 1 and 2 exist"))),
    };
    Ok(InteractionCount {
        formula: n.pow(order as u32) * d * (d + 1) / 2,
        actual,
    })
}
