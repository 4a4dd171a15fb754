use crate::error::{Error, Result};

/// Tensor-factor layout of the qudit ⊗ mode₁ ⊗ … ⊗ mode_N space.
///
/// Factor 0 is the qudit, factors `1..=N` are the bosonic modes in ascending
/// order. The last factor varies fastest in the flattened basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    d: usize,
    truncations: Vec<usize>,
}

impl SpaceLayout {
    pub fn new(d: usize, truncations: Vec<usize>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Layout("qudit must have at least one level".into()));
        }
        if let Some(&bad) = truncations.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidTruncation(bad));
        }
        Ok(Self { d, truncations })
    }

    /// Same truncation for every mode.
    pub fn uniform(d: usize, n_modes: usize, n_max: usize) -> Result<Self> {
        Self::new(d, vec![n_max; n_modes])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_modes(&self) -> usize {
        self.truncations.len()
    }

    pub fn truncations(&self) -> &[usize] {
        &self.truncations
    }

    pub fn n_factors(&self) -> usize {
        1 + self.truncations.len()
    }

    pub fn factor_dim(&self, factor: usize) -> Result<usize> {
        match factor {
            0 => Ok(self.d),
            f if f <= self.truncations.len() => Ok(self.truncations[f - 1]),
            f => Err(Error::out_of_range("factor", f, self.n_factors())),
        }
    }

    pub fn dim(&self) -> usize {
        self.d * self.mode_dim()
    }

    /// Dimension of the bosonic part alone.
    pub fn mode_dim(&self) -> usize {
        self.truncations.iter().product()
    }

    /// Flattened index of `|n⟩ ⊗ |v₁⟩ ⊗ … ⊗ |v_N⟩`.
    pub fn index(&self, qudit: usize, occupations: &[usize]) -> Result<usize> {
        if qudit >= self.d {
            return Err(Error::out_of_range("qudit level", qudit, self.d));
        }
        if occupations.len() != self.n_modes() {
            return Err(Error::Layout(format!(
                "expected {} occupations, got {}",
                self.n_modes(),
                occupations.len()
            )));
        }
        let mut idx = qudit;
        for (&v, &n) in occupations.iter().zip(&self.truncations) {
            if v >= n {
                return Err(Error::out_of_range("Fock level", v, n));
            }
            idx = idx * n + v;
        }
        Ok(idx)
    }

    /// Inverse of [`SpaceLayout::index`].
    pub fn decompose(&self, mut idx: usize) -> (usize, Vec<usize>) {
        let mut occ = vec![0; self.n_modes()];
        for (slot, &n) in occ.iter_mut().zip(&self.truncations).rev() {
            *slot = idx % n;
            idx /= n;
        }
        (idx, occ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_is_product() {
        let l = SpaceLayout::new(3, vec![4, 5]).unwrap();
        assert_eq!(l.dim(), 60);
        assert_eq!(l.mode_dim(), 20);
        assert_eq!(l.factor_dim(0).unwrap(), 3);
        assert_eq!(l.factor_dim(2).unwrap(), 5);
        assert!(l.factor_dim(3).is_err());
    }

    #[test]
    fn rejects_short_truncation() {
        assert!(matches!(
            SpaceLayout::new(2, vec![5, 1]),
            Err(Error::InvalidTruncation(1))
        ));
        assert!(SpaceLayout::new(0, vec![3]).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let l = SpaceLayout::new(2, vec![3, 4]).unwrap();
        for idx in 0..l.dim() {
            let (n, occ) = l.decompose(idx);
            assert_eq!(l.index(n, &occ).unwrap(), idx);
        }
        assert_eq!(l.index(1, &[0, 0]).unwrap(), 12);
        assert!(l.index(2, &[0, 0]).is_err());
        assert!(l.index(0, &[3, 0]).is_err());
    }
}
