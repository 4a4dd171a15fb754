use num_complex::Complex64 as C64;

use super::DensityOperator;
use crate::error::{Error, Result};
use crate::mapping::BathSpec;
use crate::ops::fock::mode_annihilation;
use crate::ops::{OperatorMatrix, SpaceLayout};
use crate::HBAR_EV_FS;

/// Right-hand side of the master equation
/// `dρ/dt = -i[H, ρ]/ħ + Σ_j γ_j ((n̄_j + 1) D[a_j] + n̄_j D[a_j†]) ρ`,
/// `H` in eV, `γ_j` in 1/fs.
///
/// Written as `Gρ + (Gρ)† + Σ r L ρ L†` with the non-Hermitian generator
/// `G = -iH/ħ - ½ Σ r L†L`, which holds for Hermitian `ρ`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    generator: OperatorMatrix,
    jumps: Vec<(f64, OperatorMatrix)>,
}

impl Liouvillian {
    pub fn new(h: &OperatorMatrix, bath: &BathSpec, layout: &SpaceLayout) -> Result<Self> {
        h.ensure_hermitian()?;
        bath.validate()?;
        let dim = layout.dim();
        if h.dim() != dim {
            return Err(Error::Layout(format!(
                "Hamiltonian dimension {} does not match layout dimension {dim}",
                h.dim()
            )));
        }
        if bath.n_modes() != layout.n_modes() {
            return Err(Error::Layout(format!(
                "bath has {} modes, layout has {}",
                bath.n_modes(),
                layout.n_modes()
            )));
        }
        let mut jumps = Vec::new();
        let mut decay = vec![0.0; dim];
        for j in 0..layout.n_modes() {
            let (g, nb) = (bath.gamma[j], bath.nbar[j]);
            if g == 0.0 {
                continue;
            }
            let a = mode_annihilation(layout, j)?;
            let ad = a.adjoint();
            let n_op = ad.matmul(&a)?;
            let m_op = a.matmul(&ad)?;
            let (down, up) = (g * (nb + 1.0), g * nb);
            for (i, d) in decay.iter_mut().enumerate() {
                *d += down * n_op.get(i, i).re + up * m_op.get(i, i).re;
            }
            jumps.push((down, a));
            if up > 0.0 {
                jumps.push((up, ad));
            }
        }
        let k = OperatorMatrix::diagonal(&decay);
        let generator = h
            .scale(C64::new(0.0, -1.0 / HBAR_EV_FS))
            .add_scaled(&k, C64::new(-0.5, 0.0))?;
        Ok(Self { dim, generator, jumps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `dρ/dt` into `out`; `scratch` needs `2 dim²` entries.
    pub fn apply(&self, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let n = self.dim;
        let nn = n * n;
        let (x, y) = scratch.split_at_mut(nn);
        self.generator.apply_to_dense(rho, x);
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = x[i * n + j] + x[j * n + i].conj();
            }
        }
        for (rate, l) in &self.jumps {
            l.apply_to_dense(rho, x);
            // y = (Lρ)† = ρ L†
            for i in 0..n {
                for j in 0..n {
                    y[i * n + j] = x[j * n + i].conj();
                }
            }
            l.apply_to_dense(y, x);
            // symmetrised so the result stays exactly Hermitian in floating point
            for i in 0..n {
                for j in i..n {
                    let v = (x[i * n + j] + x[j * n + i].conj()) * (0.5 * rate);
                    out[i * n + j] += v;
                    if j != i {
                        out[j * n + i] += v.conj();
                    }
                }
            }
        }
    }
}

/// One evaluation of the master-equation right-hand side.
pub fn lindblad_rhs(
    rho: &DensityOperator,
    h: &OperatorMatrix,
    bath: &BathSpec,
) -> Result<Vec<C64>> {
    let l = Liouvillian::new(h, bath, rho.layout())?;
    let n = l.dim();
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    let mut scratch = vec![C64::new(0.0, 0.0); 2 * n * n];
    l.apply(rho.as_slice(), &mut out, &mut scratch);
    Ok(out)
}
