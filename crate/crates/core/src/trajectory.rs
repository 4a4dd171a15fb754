//! Time series of observables recorded during propagation.

use std::io::{Read, Write};
use std::path::Path;

use log::warn;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ops::fock::{mode_p, mode_q};
use crate::ops::{OperatorMatrix, SpaceLayout, LEAKAGE_WARN};

/// Magic header of the binary snapshot format.
pub const SNAPSHOT_MAGIC: &[u8; 8] = b"MQBSNAP1";

/// Observables sampled on a time grid (fs).
///
/// Series are indexed `[time][state]` and `[time][mode]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
    pub q_expect: Vec<Vec<f64>>,
    pub p_expect: Vec<Vec<f64>>,
    /// Overlap with a reference trajectory, when one was supplied.
    pub fidelity: Option<Vec<f64>>,
    /// Largest top-Fock-level population over all modes.
    pub leakage: Vec<f64>,
    /// `Tr ρ²`, open runs only.
    pub purity: Option<Vec<f64>>,
    /// `|Tr ρ - 1|`, open runs only.
    pub trace_error: Option<Vec<f64>>,
    pub snapshots: Vec<(f64, Vec<C64>)>,
    /// Set when leakage exceeded the warning threshold at some time.
    pub leakage_flagged: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_states(&self) -> usize {
        self.populations.first().map_or(0, Vec::len)
    }

    pub fn n_modes(&self) -> usize {
        self.q_expect.first().map_or(0, Vec::len)
    }

    /// Population of one electronic state over time.
    pub fn population(&self, state: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[state]).collect()
    }

    /// Largest `|Σ_n P_n(t) - 1|` over the run.
    pub fn max_population_sum_error(&self) -> f64 {
        self.populations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.len() != other.len()
            || self.n_states() != other.n_states()
            || self.n_modes() != other.n_modes()
        {
            return Err(Error::Layout("trajectories have different shapes".into()));
        }
        if let Some((a, b)) = self.times.iter().zip(&other.times).find(|(a, b)| (*a - *b).abs() > 1e-9) {
            return Err(Error::Layout(format!("time grids differ: {a} vs {b}")));
        }
        Ok(())
    }

    /// Largest population difference at matched times.
    pub fn max_population_difference(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(max_abs_diff(&self.populations, &other.populations))
    }

    /// Largest difference in populations, `⟨Q⟩` and `⟨P⟩` at matched times.
    pub fn max_observable_difference(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(max_abs_diff(&self.populations, &other.populations)
            .max(max_abs_diff(&self.q_expect, &other.q_expect))
            .max(max_abs_diff(&self.p_expect, &other.p_expect)))
    }

    pub fn min_fidelity(&self) -> Option<f64> {
        self.fidelity.as_ref().map(|f| f.iter().cloned().fold(1.0, f64::min))
    }

    /// Column names of [`Trajectory::write_csv`].
    pub fn csv_header(&self) -> Vec<String> {
        let mut cols = vec!["time_fs".to_string()];
        cols.extend((0..self.n_states()).map(|n| format!("pop_{n}")));
        cols.extend((1..=self.n_modes()).map(|j| format!("q_{j}")));
        cols.extend((1..=self.n_modes()).map(|j| format!("p_{j}")));
        cols.push("fidelity".into());
        cols.push("leakage".into());
        if self.purity.is_some() {
            cols.push("purity".into());
            cols.push("trace_error".into());
        }
        cols
    }

    /// Writes one CSV row per time point. A missing fidelity is left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.csv_header())?;
        for i in 0..self.len() {
            let mut row = vec![fmt(self.times[i])];
            row.extend(self.populations[i].iter().map(|&x| fmt(x)));
            row.extend(self.q_expect[i].iter().map(|&x| fmt(x)));
            row.extend(self.p_expect[i].iter().map(|&x| fmt(x)));
            row.push(self.fidelity.as_ref().map_or(String::new(), |f| fmt(f[i])));
            row.push(fmt(self.leakage[i]));
            if let (Some(p), Some(e)) = (&self.purity, &self.trace_error) {
                row.push(fmt(p[i]));
                row.push(fmt(e[i]));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the recorded snapshots in the binary layout:
    /// magic, `u64` dimension, `u64` count, then per snapshot an `f64` time
    /// followed by `dim` little-endian `(re, im)` `f64` pairs.
    pub fn write_snapshots<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = self.snapshots.first().map_or(0, |(_, v)| v.len());
        if self.snapshots.iter().any(|(_, v)| v.len() != dim) {
            return Err(Error::Layout("snapshots have different dimensions".into()));
        }
        out.write_all(SNAPSHOT_MAGIC)?;
        out.write_all(&(dim as u64).to_le_bytes())?;
        out.write_all(&(self.snapshots.len() as u64).to_le_bytes())?;
        for (t, v) in &self.snapshots {
            out.write_all(&t.to_le_bytes())?;
            for z in v {
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save_snapshots(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_snapshots(std::io::BufWriter::new(f))
    }
}

/// Reads a snapshot file written by [`Trajectory::write_snapshots`].
pub fn read_snapshots<R: Read>(mut input: R) -> Result<Vec<(f64, Vec<C64>)>> {
    let bad = |reason: &str| Error::Parse {
        path: "<snapshots>".into(),
        reason: reason.into(),
    };
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(bad("bad magic header"));
    }
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let dim = u64::from_le_bytes(next(&mut input)?) as usize;
    let count = u64::from_le_bytes(next(&mut input)?) as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let t = f64::from_le_bytes(next(&mut input)?);
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re = f64::from_le_bytes(next(&mut input)?);
            let im = f64::from_le_bytes(next(&mut input)?);
            v.push(C64::new(re, im));
        }
        out.push((t, v));
    }
    Ok(out)
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

/// Computes and appends observables for a fixed layout.
#[derive(Clone, Debug)]
pub struct Observer {
    layout: SpaceLayout,
    q: Vec<OperatorMatrix>,
    p: Vec<OperatorMatrix>,
    /// Basis indices at the top Fock level, per mode.
    top: Vec<Vec<usize>>,
    snapshot_times: Vec<f64>,
    leakage_threshold: f64,
}

impl Observer {
    pub fn new(layout: &SpaceLayout) -> Result<Self> {
        let n = layout.n_modes();
        let q = (0..n).map(|j| mode_q(layout, j)).collect::<Result<Vec<_>>>()?;
        let p = (0..n).map(|j| mode_p(layout, j)).collect::<Result<Vec<_>>>()?;
        let mut top = vec![Vec::new(); n];
        for idx in 0..layout.dim() {
            let (_, occ) = layout.decompose(idx);
            for (j, (&o, &nmax)) in occ.iter().zip(layout.truncations()).enumerate() {
                if o + 1 == nmax {
                    top[j].push(idx);
                }
            }
        }
        Ok(Self {
            layout: layout.clone(),
            q,
            p,
            top,
            snapshot_times: Vec::new(),
            leakage_threshold: LEAKAGE_WARN,
        })
    }

    /// Also store the full state at these times (matched to within 1e-9 fs).
    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn with_leakage_threshold(mut self, threshold: f64) -> Self {
        self.leakage_threshold = threshold;
        self
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    fn wants_snapshot(&self, t: f64) -> bool {
        self.snapshot_times.iter().any(|&s| (s - t).abs() <= 1e-9)
    }

    fn note_leakage(&self, traj: &mut Trajectory, t: f64, leak: f64) {
        if leak > self.leakage_threshold && !traj.leakage_flagged {
            warn!("top Fock level population {leak:.3e} at t = {t} fs exceeds {:.1e}; increase the truncation", self.leakage_threshold);
            traj.leakage_flagged = true;
        }
    }

    /// Appends observables of a pure state.
    pub fn record_state(&self, traj: &mut Trajectory, t: f64, psi: &[C64]) {
        let block = self.layout.mode_dim();
        let pops = psi
            .chunks(block)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        let q = self.q.iter().map(|op| op.expectation(psi).re).collect();
        let p = self.p.iter().map(|op| op.expectation(psi).re).collect();
        let leak = self
            .top
            .iter()
            .map(|ix| ix.iter().map(|&i| psi[i].norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        traj.times.push(t);
        traj.populations.push(pops);
        traj.q_expect.push(q);
        traj.p_expect.push(p);
        traj.leakage.push(leak);
        self.note_leakage(traj, t, leak);
        if self.wants_snapshot(t) {
            traj.snapshots.push((t, psi.to_vec()));
        }
    }

    /// Appends observables of a row-major dense density matrix, including
    /// purity and trace error.
    pub fn record_density(&self, traj: &mut Trajectory, t: f64, rho: &[C64]) {
        let n = self.layout.dim();
        let block = self.layout.mode_dim();
        let diag = |i: usize| rho[i * n + i].re;
        let pops = (0..self.layout.d())
            .map(|s| (s * block..(s + 1) * block).map(diag).sum())
            .collect();
        let q = self.q.iter().map(|op| op.trace_with(rho).re).collect();
        let p = self.p.iter().map(|op| op.trace_with(rho).re).collect();
        let leak = self
            .top
            .iter()
            .map(|ix| ix.iter().map(|&i| diag(i)).sum::<f64>())
            .fold(0.0, f64::max);
        let trace: f64 = (0..n).map(diag).sum();
        let purity = rho.iter().map(|z| z.norm_sqr()).sum();
        traj.times.push(t);
        traj.populations.push(pops);
        traj.q_expect.push(q);
        traj.p_expect.push(p);
        traj.leakage.push(leak);
        traj.purity.get_or_insert_with(Vec::new).push(purity);
        traj.trace_error.get_or_insert_with(Vec::new).push((trace - 1.0).abs());
        self.note_leakage(traj, t, leak);
        if self.wants_snapshot(t) {
            traj.snapshots.push((t, rho.to_vec()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(layout: &SpaceLayout, qudit: usize, occ: &[usize]) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); layout.dim()];
        v[layout.index(qudit, occ).unwrap()] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn pure_and_density_records_agree() {
        let layout = SpaceLayout::new(2, vec![3, 4]).unwrap();
        let a = basis(&layout, 0, &[1, 0]);
        let b = basis(&layout, 1, &[0, 3]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi: Vec<C64> = a.iter().zip(&b).map(|(x, y)| (x + y) * s).collect();
        let n = layout.dim();
        let rho: Vec<C64> = (0..n * n).map(|k| psi[k / n] * psi[k % n].conj()).collect();
        let obs = Observer::new(&layout).unwrap();
        let mut t1 = Trajectory::default();
        let mut t2 = Trajectory::default();
        obs.record_state(&mut t1, 0.0, &psi);
        obs.record_density(&mut t2, 0.0, &rho);
        assert!(t1.populations[0].iter().all(|&x| (x - 0.5).abs() < 1e-15));
        assert!(t1.max_observable_difference(&t2).unwrap() < 1e-15);
        assert!((t1.leakage[0] - 0.5).abs() < 1e-15);
        assert!(t1.leakage_flagged);
        assert!((t2.purity.unwrap()[0] - 1.0).abs() < 1e-14);
        assert!(t2.trace_error.unwrap()[0] < 1e-15);
    }

    #[test]
    fn csv_columns() {
        let layout = SpaceLayout::new(2, vec![3]).unwrap();
        let obs = Observer::new(&layout).unwrap();
        let mut t = Trajectory::default();
        obs.record_state(&mut t, 0.0, &basis(&layout, 1, &[0]));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "time_fs,pop_0,pop_1,q_1,p_1,fidelity,leakage");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 7);
        assert_eq!(row[5], "");
    }

    #[test]
    fn snapshot_roundtrip() {
        let layout = SpaceLayout::new(2, vec![2]).unwrap();
        let obs = Observer::new(&layout).unwrap().with_snapshots(vec![1.0]);
        let mut t = Trajectory::default();
        obs.record_state(&mut t, 0.0, &basis(&layout, 0, &[0]));
        let psi = vec![
            C64::new(0.5, 0.5),
            C64::new(0.0, -0.5),
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.0),
        ];
        obs.record_state(&mut t, 1.0, &psi);
        let mut buf = Vec::new();
        t.write_snapshots(&mut buf).unwrap();
        assert_eq!(&buf[..8], SNAPSHOT_MAGIC);
        assert_eq!(buf.len(), 8 + 16 + 8 + 4 * 16);
        let back = read_snapshots(&buf[..]).unwrap();
        assert_eq!(back, vec![(1.0, psi)]);
        assert!(read_snapshots(&b"NOTMAGIC........"[..]).is_err());
    }

    #[test]
    fn mismatched_grids_rejected() {
        let layout = SpaceLayout::new(2, vec![2]).unwrap();
        let obs = Observer::new(&layout).unwrap();
        let (mut a, mut b) = (Trajectory::default(), Trajectory::default());
        obs.record_state(&mut a, 0.0, &basis(&layout, 0, &[0]));
        obs.record_state(&mut b, 0.5, &basis(&layout, 0, &[0]));
        assert!(a.max_population_difference(&b).is_err());
    }
}
