use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Operators with dimension below this are stored dense.
pub const DENSE_THRESHOLD: usize = 64;

/// Relative tolerance of the Hermiticity check, `max|H - H†| <= tol * max|H|`.
pub const HERMITIAN_RTOL: f64 = 1e-12;

/// Row count above which sparse × dense products are split across threads.
const PAR_ROWS: usize = 256;

#[derive(Clone, Debug, PartialEq)]
struct Csr {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Row-major `dim * dim`.
    Dense(Vec<C64>),
    Sparse(Csr),
}

/// Square complex operator.
///
/// Immutable once built. Small operators are stored dense, larger ones in
/// compressed-row form. The Hermitian flag is only ever set after a numerical
/// check (or by operations that provably preserve it).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    storage: Storage,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "triplet ({i}, {j}) outside dimension {dim}");
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut iter = row.into_iter().peekable();
            while let Some((j, mut v)) = iter.next() {
                while let Some(&(j2, v2)) = iter.peek() {
                    if j2 != j {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                if v != C64::new(0.0, 0.0) {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        let csr = Csr {
            indptr,
            indices,
            values,
        };
        Self::from_csr(dim, csr)
    }

    fn from_csr(dim: usize, csr: Csr) -> Self {
        let storage = if dim < DENSE_THRESHOLD {
            let mut dense = vec![C64::new(0.0, 0.0); dim * dim];
            for i in 0..dim {
                for p in csr.indptr[i]..csr.indptr[i + 1] {
                    dense[i * dim + csr.indices[p]] = csr.values[p];
                }
            }
            Storage::Dense(dense)
        } else {
            Storage::Sparse(csr)
        };
        Self {
            dim,
            storage,
            hermitian: false,
        }
    }

    /// Builds from a row-major dense array.
    pub fn from_dense(dim: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), dim * dim);
        Self::from_triplets(
            dim,
            data.iter()
                .enumerate()
                .map(|(k, &v)| (k / dim, k % dim, v)),
        )
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, std::iter::empty()).with_flag(true)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    /// Real diagonal operator (Hermitian by construction).
    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_triplets(
            values.len(),
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, i, C64::new(v, 0.0))),
        )
        .with_flag(true)
    }

    pub(crate) fn with_flag(mut self, hermitian: bool) -> Self {
        self.hermitian = hermitian;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Whether the Hermitian flag is set (verified, not assumed).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.iter().filter(|v| **v != C64::new(0.0, 0.0)).count(),
            Storage::Sparse(s) => s.values.len(),
        }
    }

    /// Nonzero entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> Box<dyn Iterator<Item = (usize, C64)> + '_> {
        match &self.storage {
            Storage::Dense(d) => Box::new(
                d[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                    .map(|(j, &v)| (j, v)),
            ),
            Storage::Sparse(s) => Box::new(
                (s.indptr[i]..s.indptr[i + 1]).map(move |p| (s.indices[p], s.values[p])),
            ),
        }
    }

    /// All nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        (0..self.dim)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.dim + j],
            Storage::Sparse(s) => {
                let cols = &s.indices[s.indptr[i]..s.indptr[i + 1]];
                match cols.binary_search(&j) {
                    Ok(p) => s.values[s.indptr[i] + p],
                    Err(_) => C64::new(0.0, 0.0),
                }
            }
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for (i, j, v) in self.triplets() {
            out[i * self.dim + j] = v;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets().iter().map(|t| t.2.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.row(i).all(|(j, _)| j == i))
    }

    pub fn diagonal_values(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.triplets()
            .iter()
            .all(|t| t.2.re.is_finite() && t.2.im.is_finite())
    }

    /// `max|H - H†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.adjoint();
        self.add_scaled(&adj, C64::new(-1.0, 0.0))
            .map(|d| d.max_abs())
            .unwrap_or(f64::INFINITY)
    }

    /// Verifies Hermiticity to [`HERMITIAN_RTOL`] and sets the flag.
    pub fn into_hermitian(self) -> Result<Self> {
        if self.hermitian {
            return Ok(self);
        }
        let dev = self.hermiticity_deviation();
        if dev <= HERMITIAN_RTOL * self.max_abs() {
            Ok(self.with_flag(true))
        } else {
            Err(Error::NotHermitian(dev))
        }
    }

    /// Errors unless the operator is (verifiably) Hermitian.
    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.hermitian {
            return Ok(());
        }
        let dev = self.hermiticity_deviation();
        if dev <= HERMITIAN_RTOL * self.max_abs() {
            Ok(())
        } else {
            Err(Error::NotHermitian(dev))
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.dim,
            self.triplets().into_iter().map(|(i, j, v)| (j, i, v.conj())),
        )
        .with_flag(self.hermitian)
    }

    pub fn scale(&self, c: C64) -> Self {
        let keeps = self.hermitian && c.im == 0.0;
        Self::from_triplets(
            self.dim,
            self.triplets().into_iter().map(|(i, j, v)| (i, j, v * c)),
        )
        .with_flag(keeps)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: C64) -> Result<Self> {
        self.check_same_dim(other)?;
        let keeps = self.hermitian && other.hermitian && c.im == 0.0;
        let trip = self
            .triplets()
            .into_iter()
            .chain(other.triplets().into_iter().map(|(i, j, v)| (i, j, v * c)));
        Ok(Self::from_triplets(self.dim, trip).with_flag(keeps))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    /// Sum of real-weighted operators; Hermiticity is kept when all terms are.
    pub fn linear_combination(dim: usize, terms: &[(f64, &OperatorMatrix)]) -> Result<Self> {
        let mut trip = Vec::new();
        let mut herm = true;
        for (c, op) in terms {
            if op.dim != dim {
                return Err(Error::Layout(format!(
                    "operator dimension {} does not match {dim}",
                    op.dim
                )));
            }
            herm &= op.hermitian;
            trip.extend(
                op.triplets()
                    .into_iter()
                    .map(|(i, j, v)| (i, j, v * *c)),
            );
        }
        Ok(Self::from_triplets(dim, trip).with_flag(herm))
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = vec![C64::new(0.0, 0.0); n];
        let mut touched = vec![false; n];
        let mut cols = Vec::new();
        let mut trip = Vec::new();
        for i in 0..n {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &cols {
                trip.push((i, j, acc[j]));
                acc[j] = C64::new(0.0, 0.0);
                touched[j] = false;
            }
            cols.clear();
        }
        Ok(Self::from_triplets(n, trip))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add_scaled(&ba, C64::new(-1.0, 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let m = other.dim;
        let a = self.triplets();
        let b = other.triplets();
        let trip = a.iter().flat_map(|&(i, j, x)| {
            b.iter()
                .map(move |&(k, l, y)| (i * m + k, j * m + l, x * y))
        });
        Self::from_triplets(self.dim * m, trip.collect::<Vec<_>>())
            .with_flag(self.hermitian && other.hermitian)
    }

    /// `out = self * x`.
    pub fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        match &self.storage {
            Storage::Dense(d) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &d[i * self.dim..(i + 1) * self.dim];
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            Storage::Sparse(s) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for p in s.indptr[i]..s.indptr[i + 1] {
                        acc += s.values[p] * x[s.indices[p]];
                    }
                    *o = acc;
                }
            }
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// `out = self * m` for a row-major dense `dim × dim` matrix `m`.
    pub fn apply_to_dense(&self, m: &[C64], out: &mut [C64]) {
        let n = self.dim;
        debug_assert_eq!(m.len(), n * n);
        debug_assert_eq!(out.len(), n * n);
        let row_kernel = |(i, orow): (usize, &mut [C64])| {
            orow.fill(C64::new(0.0, 0.0));
            for (k, a) in self.row(i) {
                let mrow = &m[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(mrow) {
                    *o += a * b;
                }
            }
        };
        if n >= PAR_ROWS {
            out.par_chunks_mut(n).enumerate().for_each(row_kernel);
        } else {
            out.chunks_mut(n).enumerate().for_each(row_kernel);
        }
    }

    /// `⟨ψ|self|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let hpsi = self.apply(psi);
        psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum()
    }

    /// `Tr(self * ρ)` for a row-major dense `ρ`.
    pub fn trace_with(&self, rho: &[C64]) -> C64 {
        let n = self.dim;
        (0..n)
            .flat_map(|i| self.row(i).map(move |(k, v)| v * rho[k * n + i]))
            .sum()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Layout(format!(
                "operator dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = OperatorMatrix::from_triplets(
            2,
            vec![(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 0, c(0.0, 0.0))],
        );
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn storage_switches_at_threshold() {
        assert!(!OperatorMatrix::identity(DENSE_THRESHOLD - 1).is_sparse());
        assert!(OperatorMatrix::identity(DENSE_THRESHOLD).is_sparse());
    }

    #[test]
    fn sparse_and_dense_agree() {
        let trip: Vec<_> = (0..70)
            .flat_map(|i| {
                [(i, i, c(i as f64, 0.0)), (i, (i + 3) % 70, c(0.5, -0.25))]
            })
            .collect();
        let big = OperatorMatrix::from_triplets(70, trip.clone());
        assert!(big.is_sparse());
        let x: Vec<C64> = (0..70).map(|k| c(k as f64 * 0.1, 1.0)).collect();
        let y = big.apply(&x);
        let dense = big.to_dense();
        for i in 0..70 {
            let expect: C64 = (0..70).map(|j| dense[i * 70 + j] * x[j]).sum();
            assert!((expect - y[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_flag_requires_check() {
        let m = OperatorMatrix::from_triplets(2, vec![(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))]);
        assert!(!m.is_hermitian());
        let h = m.into_hermitian().unwrap();
        assert!(h.is_hermitian());
        let bad = OperatorMatrix::from_triplets(2, vec![(0, 1, c(1.0, 0.0))]);
        assert!(matches!(bad.into_hermitian(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_scaling_drops_flag() {
        let id = OperatorMatrix::identity(3);
        assert!(id.scale_real(2.0).is_hermitian());
        assert!(!id.scale(c(0.0, 1.0)).is_hermitian());
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = OperatorMatrix::from_triplets(2, vec![(0, 1, c(1.0, 0.0))]);
        let b = OperatorMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.get(2, 5), c(3.0, 0.0));
        assert_eq!(k.nnz(), 3);
    }

    #[test]
    fn dense_product_matches_column_products() {
        let a = OperatorMatrix::from_triplets(
            3,
            vec![(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.5)), (1, 1, c(3.0, 0.0))],
        );
        let m: Vec<C64> = (0..9).map(|k| c(k as f64, -(k as f64) * 0.5)).collect();
        let mut out = vec![C64::default(); 9];
        a.apply_to_dense(&m, &mut out);
        for col in 0..3 {
            let x: Vec<C64> = (0..3).map(|r| m[r * 3 + col]).collect();
            let y = a.apply(&x);
            for r in 0..3 {
                assert!((y[r] - out[r * 3 + col]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn mismatched_dimensions_error() {
        let a = OperatorMatrix::identity(2);
        let b = OperatorMatrix::identity(3);
        assert!(a.add(&b).is_err());
        assert!(a.matmul(&b).is_err());
    }
}
