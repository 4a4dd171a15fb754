//! Single-factor operators and their embedding into the full product space.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use super::{OperatorMatrix, SpaceLayout};
use crate::error::{Error, Result};

fn check_truncation(n_max: usize) -> Result<()> {
    if n_max < 2 {
        Err(Error::InvalidTruncation(n_max))
    } else {
        Ok(())
    }
}

/// Truncated annihilation operator: `√n` at `(n-1, n)`.
pub fn annihilation(n_max: usize) -> Result<OperatorMatrix> {
    check_truncation(n_max)?;
    Ok(OperatorMatrix::from_triplets(
        n_max,
        (1..n_max).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    ))
}

pub fn creation(n_max: usize) -> Result<OperatorMatrix> {
    Ok(annihilation(n_max)?.adjoint())
}

/// `a†a`, diagonal `0, 1, …, n_max-1`.
pub fn number(n_max: usize) -> Result<OperatorMatrix> {
    check_truncation(n_max)?;
    let diag: Vec<f64> = (0..n_max).map(|n| n as f64).collect();
    Ok(OperatorMatrix::diagonal(&diag))
}

/// Dimensionless position `Q = (a† + a)/√2`.
pub fn position_q(n_max: usize) -> Result<OperatorMatrix> {
    check_truncation(n_max)?;
    let trip = (1..n_max).flat_map(|n| {
        let v = C64::new((n as f64).sqrt() * FRAC_1_SQRT_2, 0.0);
        [(n - 1, n, v), (n, n - 1, v)]
    });
    Ok(OperatorMatrix::from_triplets(n_max, trip.collect::<Vec<_>>()).with_flag(true))
}

/// Dimensionless momentum `P = i(a† - a)/√2`.
pub fn momentum_p(n_max: usize) -> Result<OperatorMatrix> {
    check_truncation(n_max)?;
    let trip = (1..n_max).flat_map(|n| {
        let s = (n as f64).sqrt() * FRAC_1_SQRT_2;
        // ⟨n|P|n-1⟩ = i√n/√2, ⟨n-1|P|n⟩ = -i√n/√2
        [(n, n - 1, C64::new(0.0, s)), (n - 1, n, C64::new(0.0, -s))]
    });
    Ok(OperatorMatrix::from_triplets(n_max, trip.collect::<Vec<_>>()).with_flag(true))
}

/// `|n⟩⟨m|` on a `d`-level qudit.
pub fn qudit_projector(n: usize, m: usize, d: usize) -> Result<OperatorMatrix> {
    if n >= d {
        return Err(Error::out_of_range("qudit level", n, d));
    }
    if m >= d {
        return Err(Error::out_of_range("qudit level", m, d));
    }
    Ok(OperatorMatrix::from_triplets(d, [(n, m, C64::new(1.0, 0.0))]).with_flag(n == m))
}

/// `σz = |0⟩⟨0| - |1⟩⟨1|`.
pub fn sigma_z() -> OperatorMatrix {
    OperatorMatrix::diagonal(&[1.0, -1.0])
}

/// `σx = |0⟩⟨1| + |1⟩⟨0|`.
pub fn sigma_x() -> OperatorMatrix {
    let one = C64::new(1.0, 0.0);
    OperatorMatrix::from_triplets(2, [(0, 1, one), (1, 0, one)]).with_flag(true)
}

/// Embeds a single-factor operator as `1 ⊗ … ⊗ op ⊗ … ⊗ 1`.
///
/// `factor_index` 0 is the qudit, `1..=N` the modes.
pub fn embed(op: &OperatorMatrix, factor_index: usize, layout: &SpaceLayout) -> Result<OperatorMatrix> {
    embed_product(&[(factor_index, op)], layout)
}

/// Embeds a product of operators acting on distinct factors.
pub fn embed_product(
    factors: &[(usize, &OperatorMatrix)],
    layout: &SpaceLayout,
) -> Result<OperatorMatrix> {
    let nf = layout.n_factors();
    let mut slots: Vec<Option<&OperatorMatrix>> = vec![None; nf];
    for &(f, op) in factors {
        let fdim = layout.factor_dim(f)?;
        if op.dim() != fdim {
            return Err(Error::Layout(format!(
                "operator of dimension {} cannot act on factor {f} of dimension {fdim}",
                op.dim()
            )));
        }
        if slots[f].is_some() {
            return Err(Error::Layout(format!("factor {f} given twice")));
        }
        slots[f] = Some(op);
    }

    // Expand factor by factor; identities only widen the index strides.
    let mut trip: Vec<(usize, usize, C64)> = vec![(0, 0, C64::new(1.0, 0.0))];
    let mut herm = true;
    for (f, slot) in slots.iter().enumerate() {
        let fdim = layout.factor_dim(f)?;
        match slot {
            Some(op) => {
                herm &= op.is_hermitian();
                let entries = op.triplets();
                trip = trip
                    .iter()
                    .flat_map(|&(i, j, x)| {
                        entries
                            .iter()
                            .map(move |&(k, l, y)| (i * fdim + k, j * fdim + l, x * y))
                    })
                    .collect();
            }
            None => {
                trip = trip
                    .iter()
                    .flat_map(|&(i, j, x)| (0..fdim).map(move |k| (i * fdim + k, j * fdim + k, x)))
                    .collect();
            }
        }
    }
    Ok(OperatorMatrix::from_triplets(layout.dim(), trip).with_flag(herm))
}

/// Position operator of `mode` (0-based) embedded in the full space.
pub fn mode_q(layout: &SpaceLayout, mode: usize) -> Result<OperatorMatrix> {
    let n = *layout
        .truncations()
        .get(mode)
        .ok_or_else(|| Error::out_of_range("mode", mode, layout.n_modes()))?;
    embed(&position_q(n)?, mode + 1, layout)
}

pub fn mode_p(layout: &SpaceLayout, mode: usize) -> Result<OperatorMatrix> {
    let n = *layout
        .truncations()
        .get(mode)
        .ok_or_else(|| Error::out_of_range("mode", mode, layout.n_modes()))?;
    embed(&momentum_p(n)?, mode + 1, layout)
}

pub fn mode_number(layout: &SpaceLayout, mode: usize) -> Result<OperatorMatrix> {
    let n = *layout
        .truncations()
        .get(mode)
        .ok_or_else(|| Error::out_of_range("mode", mode, layout.n_modes()))?;
    embed(&number(n)?, mode + 1, layout)
}

pub fn mode_annihilation(layout: &SpaceLayout, mode: usize) -> Result<OperatorMatrix> {
    let n = *layout
        .truncations()
        .get(mode)
        .ok_or_else(|| Error::out_of_range("mode", mode, layout.n_modes()))?;
    embed(&annihilation(n)?, mode + 1, layout)
}
