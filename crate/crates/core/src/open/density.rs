use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ops::SpaceLayout;

/// Dense row-major density matrix on a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    layout: SpaceLayout,
    data: Vec<C64>,
}

impl DensityOperator {
    /// Wraps a row-major matrix after checking Hermiticity (1e-10) and unit
    /// trace (1e-8).
    pub fn from_matrix(layout: &SpaceLayout, data: Vec<C64>) -> Result<Self> {
        let n = layout.dim();
        if data.len() != n * n {
            return Err(Error::Layout(format!(
                "density matrix has {} entries, layout needs {}",
                data.len(),
                n * n
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let rho = Self {
            layout: layout.clone(),
            data,
        };
        let dev = rho.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::Unnormalized(tr));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(layout: &SpaceLayout, psi: &[C64]) -> Result<Self> {
        let n = layout.dim();
        if psi.len() != n {
            return Err(Error::Layout(format!("state length {} for dimension {n}", psi.len())));
        }
        let data = (0..n * n).map(|k| psi[k / n] * psi[k % n].conj()).collect();
        Self::from_matrix(layout, data)
    }

    /// Electronic state `electronic` times a product of truncated thermal
    /// states with mean occupations `nbar` (renormalized on the truncation).
    pub fn thermal_modes(layout: &SpaceLayout, electronic: usize, nbar: &[f64]) -> Result<Self> {
        if nbar.len() != layout.n_modes() {
            return Err(Error::Layout(format!(
                "{} occupations for {} modes",
                nbar.len(),
                layout.n_modes()
            )));
        }
        if electronic >= layout.d() {
            return Err(Error::out_of_range("electronic state", electronic, layout.d()));
        }
        let weights: Vec<Vec<f64>> = nbar
            .iter()
            .zip(layout.truncations())
            .map(|(&nb, &nmax)| {
                let r = if nb > 0.0 { nb / (nb + 1.0) } else { 0.0 };
                let w: Vec<f64> = (0..nmax).map(|k| r.powi(k as i32)).collect();
                let z: f64 = w.iter().sum();
                w.into_iter().map(|x| x / z).collect()
            })
            .collect();
        let n = layout.dim();
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for idx in 0..n {
            let (q, occ) = layout.decompose(idx);
            if q == electronic {
                let p: f64 = occ.iter().zip(&weights).map(|(&o, w)| w[o]).product();
                data[idx * n + idx] = C64::new(p, 0.0);
            }
        }
        Self::from_matrix(layout, data)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn trace(&self) -> f64 {
        let n = self.dim();
        (0..n).map(|i| self.data[i * n + i].re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        dev
    }

    /// Smallest eigenvalue, for positivity monitoring.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let a = self.data[i * n + j];
            let b = self.data[j * n + i].conj();
            (a + b) * 0.5
        });
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}
