use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real `d × d` electronic coefficient block, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefMatrix {
    d: usize,
    data: Vec<f64>,
}

impl CoefMatrix {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![0.0; d * d],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidModel(format!(
                "coefficient block is not square ({d} rows, row lengths {:?})",
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Ok(Self {
            d,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Diagonal block.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (n, &v) in values.iter().enumerate() {
            m.set(n, n, v);
        }
        m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.data[n * self.d + m]
    }

    pub fn set(&mut self, n: usize, m: usize, v: f64) {
        self.data[n * self.d + m] = v;
    }

    /// Sets `(n, m)` and `(m, n)`.
    pub fn set_sym(&mut self, n: usize, m: usize, v: f64) {
        self.set(n, m, v);
        self.set(m, n, v);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|n| self.get(n, n)).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    /// First `(n, m)` with `|c[n][m] - c[m][n]|` above `tol`.
    fn asymmetry(&self, tol: f64) -> Option<(usize, usize)> {
        for n in 0..self.d {
            for m in n + 1..self.d {
                if (self.get(n, m) - self.get(m, n)).abs() > tol {
                    return Some((n, m));
                }
            }
        }
        None
    }
}

/// Vibronic-coupling model truncated at second order.
///
/// `H = Σ_j ω_j (Q_j² + P_j²)/2 + Σ_{n,m} C_{nm} |n⟩⟨m|` with
/// `C_{nm} = c0[n][m] + Σ_j c1[j][n][m] Q_j + Σ_{j,k} c2[j][k][n][m] Q_j Q_k`.
/// Coefficients in eV. Zero entries mean the term is absent.
#[derive(Clone, Debug, PartialEq)]
pub struct VCModel {
    omega: Vec<f64>,
    c0: CoefMatrix,
    c1: Vec<CoefMatrix>,
    c2: Vec<Vec<CoefMatrix>>,
    state_labels: Vec<String>,
    mode_labels: Vec<String>,
}

impl VCModel {
    /// Validates frequencies and symmetries. `c2` may be `None` for an LVC model.
    pub fn new(
        omega: Vec<f64>,
        c0: CoefMatrix,
        c1: Vec<CoefMatrix>,
        c2: Option<Vec<Vec<CoefMatrix>>>,
    ) -> Result<Self> {
        let d = c0.d();
        let n = omega.len();
        if d == 0 {
            return Err(Error::InvalidModel("at least one electronic state is required".into()));
        }
        for (j, &w) in omega.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "mode {j} frequency must be positive, got {w}"
                )));
            }
        }
        if c1.len() != n {
            return Err(Error::InvalidModel(format!(
                "c1 has {} mode blocks but there are {n} modes",
                c1.len()
            )));
        }
        let c2 = c2.unwrap_or_else(|| vec![vec![CoefMatrix::zeros(d); n]; n]);
        if c2.len() != n || c2.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel("c2 must be N × N blocks".into()));
        }
        let blocks = std::iter::once(&c0)
            .chain(&c1)
            .chain(c2.iter().flatten());
        if blocks.clone().any(|b| b.d() != d) {
            return Err(Error::InvalidModel(format!(
                "all coefficient blocks must be {d} × {d}"
            )));
        }
        if blocks.clone().any(|b| b.data.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite("model coefficients"));
        }
        if let Some((a, b)) = c0.asymmetry(0.0) {
            return Err(Error::Asymmetric {
                tensor: "c0",
                detail: format!("c0[{a}][{b}] = {} but c0[{b}][{a}] = {}", c0.get(a, b), c0.get(b, a)),
            });
        }
        for (j, blk) in c1.iter().enumerate() {
            if let Some((a, b)) = blk.asymmetry(0.0) {
                return Err(Error::Asymmetric {
                    tensor: "c1",
                    detail: format!(
                        "c1[{j}][{a}][{b}] = {} but c1[{j}][{b}][{a}] = {}",
                        blk.get(a, b),
                        blk.get(b, a)
                    ),
                });
            }
        }
        for j in 0..n {
            for k in 0..n {
                if let Some((a, b)) = c2[j][k].asymmetry(0.0) {
                    return Err(Error::Asymmetric {
                        tensor: "c2",
                        detail: format!("c2[{j}][{k}] not symmetric in states ({a}, {b})"),
                    });
                }
                if c2[j][k] != c2[k][j] {
                    return Err(Error::Asymmetric {
                        tensor: "c2",
                        detail: format!("c2[{j}][{k}] differs from c2[{k}][{j}]"),
                    });
                }
            }
        }
        Ok(Self {
            state_labels: (0..d).map(|n| format!("S{n}")).collect(),
            mode_labels: (1..=n).map(|j| format!("mode{j}")).collect(),
            omega,
            c0,
            c1,
            c2,
        })
    }

    pub fn with_labels(mut self, states: Vec<String>, modes: Vec<String>) -> Result<Self> {
        if states.len() != self.d() || modes.len() != self.n_modes() {
            return Err(Error::InvalidModel("label count does not match model size".into()));
        }
        self.state_labels = states;
        self.mode_labels = modes;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.c0.d()
    }

    pub fn n_modes(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn c0(&self) -> &CoefMatrix {
        &self.c0
    }

    pub fn c1(&self) -> &[CoefMatrix] {
        &self.c1
    }

    pub fn c2(&self) -> &[Vec<CoefMatrix>] {
        &self.c2
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn mode_labels(&self) -> &[String] {
        &self.mode_labels
    }

    pub fn is_linear(&self) -> bool {
        self.c2.iter().flatten().all(CoefMatrix::is_zero)
    }

    /// `Σ_j ω_j / 2`.
    pub fn zero_point_energy(&self) -> f64 {
        self.omega.iter().sum::<f64>() / 2.0
    }

    /// Mean diagonal constant `Tr(c0)/d`.
    pub fn trace_constant(&self) -> f64 {
        self.c0.trace() / self.d() as f64
    }

    /// Largest |linear or quadratic coupling coefficient|.
    pub fn max_coupling(&self) -> f64 {
        self.c1
            .iter()
            .chain(self.c2.iter().flatten())
            .flat_map(|b| b.data.iter())
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut CoefMatrix, &mut Vec<CoefMatrix>, &mut Vec<Vec<CoefMatrix>>) {
        (&mut self.c0, &mut self.c1, &mut self.c2)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ModelFile::load(path.as_ref())?.into_model()
    }

    pub fn to_file(&self) -> ModelFile {
        let mut c2 = Vec::new();
        for j in 0..self.n_modes() {
            for k in j..self.n_modes() {
                let blk = &self.c2[j][k];
                for n in 0..self.d() {
                    for m in n..self.d() {
                        let v = blk.get(n, m);
                        if v != 0.0 {
                            c2.push(C2Entry { j, k, n, m, value: v });
                        }
                    }
                }
            }
        }
        ModelFile {
            units: Some("eV".into()),
            source: None,
            d: self.d(),
            n: self.n_modes(),
            omega: self.omega.clone(),
            c0: self.c0.rows(),
            c1: self.c1.iter().map(CoefMatrix::rows).collect(),
            c2,
            state_labels: self.state_labels.clone(),
            mode_labels: self.mode_labels.clone(),
        }
    }
}

/// Sparse second-order coefficient `c2[j][k][n][m]` (0-based indices).
/// The symmetric partners `(k, j)` and `(m, n)` are implied.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct C2Entry {
    pub j: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub value: f64,
}

/// On-disk model description (TOML).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega: Vec<f64>,
    pub c0: Vec<Vec<f64>>,
    pub c1: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c2: Vec<C2Entry>,
    #[serde(default)]
    pub state_labels: Vec<String>,
    #[serde(default)]
    pub mode_labels: Vec<String>,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_owned(),
            reason: e.message().to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    /// Every problem found, in a stable order. Empty means valid.
    pub fn check(&self) -> Vec<String> {
        let mut issues = Vec::new();
        match self.units.as_deref() {
            None => issues.push("missing units tag (expected units = \"eV\")".to_string()),
            Some("eV") => {}
            Some(u) => issues.push(format!("unsupported units \"{u}\" (expected \"eV\")")),
        }
        let (d, n) = (self.d, self.n);
        if d == 0 {
            issues.push("d must be at least 1".into());
        }
        if self.omega.len() != n {
            issues.push(format!("omega has {} entries, expected N = {n}", self.omega.len()));
        }
        for (j, &w) in self.omega.iter().enumerate() {
            if w <= 0.0 || !w.is_finite() {
                issues.push(format!("omega[{j}] = {w} must be positive"));
            }
        }
        let check_block = |name: String, blk: &Vec<Vec<f64>>, issues: &mut Vec<String>| {
            if blk.len() != d || blk.iter().any(|r| r.len() != d) {
                issues.push(format!("{name} must be {d} x {d}"));
                return;
            }
            for a in 0..d {
                for b in a + 1..d {
                    if blk[a][b] != blk[b][a] {
                        issues.push(format!(
                            "asymmetric {name}: {name}[{a}][{b}] = {} but {name}[{b}][{a}] = {}",
                            blk[a][b], blk[b][a]
                        ));
                    }
                }
            }
        };
        check_block("c0".into(), &self.c0, &mut issues);
        if self.c1.len() != n {
            issues.push(format!("c1 has {} mode blocks, expected N = {n}", self.c1.len()));
        }
        for (j, blk) in self.c1.iter().enumerate() {
            check_block(format!("c1[{j}]"), blk, &mut issues);
        }
        let mut seen: Vec<((usize, usize, usize, usize), f64)> = Vec::new();
        for (i, e) in self.c2.iter().enumerate() {
            if e.j >= n || e.k >= n || e.n >= d || e.m >= d {
                issues.push(format!("c2 entry {i} has an index out of range"));
                continue;
            }
            let key = (e.j.min(e.k), e.j.max(e.k), e.n.min(e.m), e.n.max(e.m));
            match seen.iter().find(|(k, _)| *k == key) {
                Some((_, v)) if *v != e.value => issues.push(format!(
                    "asymmetric c2: entries for (j,k,n,m) = {key:?} disagree ({v} vs {})",
                    e.value
                )),
                Some(_) => {}
                None => seen.push((key, e.value)),
            }
        }
        if !self.state_labels.is_empty() && self.state_labels.len() != d {
            issues.push(format!("state_labels has {} entries, expected {d}", self.state_labels.len()));
        }
        if !self.mode_labels.is_empty() && self.mode_labels.len() != n {
            issues.push(format!("mode_labels has {} entries, expected {n}", self.mode_labels.len()));
        }
        issues
    }

    pub fn into_model(self) -> Result<VCModel> {
        let issues = self.check();
        if let Some(first) = issues.first() {
            return Err(if first.starts_with("asymmetric") {
                Error::Asymmetric {
                    tensor: if first.contains("c2") {
                        "c2"
                    } else if first.contains("c1") {
                        "c1"
                    } else {
                        "c0"
                    },
                    detail: first.clone(),
                }
            } else {
                Error::InvalidModel(issues.join("; "))
            });
        }
        let (d, n) = (self.d, self.n);
        let c0 = CoefMatrix::from_rows(&self.c0)?;
        let c1 = self
            .c1
            .iter()
            .map(|b| CoefMatrix::from_rows(b))
            .collect::<Result<Vec<_>>>()?;
        let mut c2 = vec![vec![CoefMatrix::zeros(d); n]; n];
        for e in &self.c2 {
            for (j, k) in [(e.j, e.k), (e.k, e.j)] {
                c2[j][k].set_sym(e.n, e.m, e.value);
            }
        }
        let model = VCModel::new(self.omega, c0, c1, Some(c2))?;
        let states = if self.state_labels.is_empty() {
            model.state_labels().to_vec()
        } else {
            self.state_labels
        };
        let modes = if self.mode_labels.is_empty() {
            model.mode_labels().to_vec()
        } else {
            self.mode_labels
        };
        model.with_labels(states, modes)
    }
}

/// Random LVC model with zero off-diagonal constants (directly mappable).
///
/// Frequencies in [0.05, 0.15] eV, state energies in [-0.4, 0.4] eV, linear
/// couplings in [-0.1, 0.1] eV.
pub fn random_lvc(d: usize, n_modes: usize, seed: u64) -> VCModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega: Vec<f64> = (0..n_modes).map(|_| rng.random_range(0.05..0.15)).collect();
    let energies: Vec<f64> = (0..d).map(|_| rng.random_range(-0.4..0.4)).collect();
    let c0 = CoefMatrix::diag(&energies);
    let c1 = (0..n_modes)
        .map(|_| {
            let mut b = CoefMatrix::zeros(d);
            for n in 0..d {
                for m in n..d {
                    b.set_sym(n, m, rng.random_range(-0.1..0.1));
                }
            }
            b
        })
        .collect();
    VCModel::new(omega, c0, c1, None).expect("random LVC model is valid")
}

/// Random QVC model: an LVC model plus off-diagonal constants and small
/// quadratic terms (|c2| <= 0.1 · min ω, keeping the potential bounded below).
pub fn random_qvc(d: usize, n_modes: usize, seed: u64) -> VCModel {
    let base = random_lvc(d, n_modes, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let wmin = base.omega().iter().cloned().fold(f64::INFINITY, f64::min);
    let mut c0 = base.c0().clone();
    for n in 0..d {
        for m in n + 1..d {
            c0.set_sym(n, m, rng.random_range(-0.05..0.05));
        }
    }
    let mut c2 = vec![vec![CoefMatrix::zeros(d); n_modes]; n_modes];
    for j in 0..n_modes {
        for k in j..n_modes {
            let mut b = CoefMatrix::zeros(d);
            for n in 0..d {
                for m in n..d {
                    b.set_sym(n, m, rng.random_range(-0.1..0.1) * wmin);
                }
            }
            c2[j][k] = b.clone();
            c2[k][j] = b;
        }
    }
    VCModel::new(base.omega().to_vec(), c0, base.c1().to_vec(), Some(c2))
        .expect("random QVC model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_file() -> ModelFile {
        ModelFile {
            units: Some("eV".into()),
            source: None,
            d: 2,
            n: 1,
            omega: vec![0.1],
            c0: vec![vec![0.0, 0.0], vec![0.0, 0.5]],
            c1: vec![vec![vec![-0.05, 0.02], vec![0.02, 0.07]]],
            c2: vec![],
            state_labels: vec![],
            mode_labels: vec![],
        }
    }

    #[test]
    fn zero_frequency_rejected() {
        let r = VCModel::new(vec![0.0], CoefMatrix::zeros(1), vec![CoefMatrix::zeros(1)], None);
        assert!(matches!(r, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn asymmetric_linear_block_names_indices() {
        let mut f = two_state_file();
        f.c1[0][0][1] = 0.03;
        let issues = f.check();
        assert_eq!(issues.len(), 1);
        assert!(issues[0].contains("c1[0][0][1]"), "{}", issues[0]);
        assert!(matches!(f.into_model(), Err(Error::Asymmetric { tensor: "c1", .. })));
    }

    #[test]
    fn missing_units_reported() {
        let mut f = two_state_file();
        f.units = None;
        assert!(f.check()[0].contains("units"));
        assert!(f.into_model().is_err());
    }

    #[test]
    fn negative_frequency_reported() {
        let mut f = two_state_file();
        f.omega[0] = -0.1;
        assert!(f.check().iter().any(|s| s.contains("omega[0]")));
    }

    #[test]
    fn c2_entries_are_symmetrized() {
        let mut f = two_state_file();
        f.n = 2;
        f.omega.push(0.2);
        f.c1.push(vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        f.c2.push(C2Entry { j: 0, k: 1, n: 0, m: 1, value: 0.01 });
        let m = f.clone().into_model().unwrap();
        assert_eq!(m.c2()[1][0].get(1, 0), 0.01);
        assert!(!m.is_linear());
        // conflicting duplicate
        f.c2.push(C2Entry { j: 1, k: 0, n: 1, m: 0, value: 0.02 });
        assert!(matches!(f.into_model(), Err(Error::Asymmetric { tensor: "c2", .. })));
    }

    #[test]
    fn toml_roundtrip() {
        let m = random_qvc(3, 2, 7);
        let text = m.to_file().to_toml();
        let back: ModelFile = toml::from_str(&text).unwrap();
        let m2 = back.into_model().unwrap();
        assert_eq!(m.omega(), m2.omega());
        assert_eq!(m.c1(), m2.c1());
        assert_eq!(m.c2(), m2.c2());
    }
}
