//! Ladder operators on a truncated Fock space, embedding into a qudit-boson
//! product space, and the canonical commutator away from the truncation edge.

use mqbsim::ops::{annihilation, creation, embed, number, position_q, qudit_projector};
use mqbsim::{OperatorMatrix, SpaceLayout, C64};

fn main() -> mqbsim::Result<()> {
    let n = 6;
    let a = annihilation(n)?;
    let ad = creation(n)?;
    let comm = a.commutator(&ad)?;
    println!("[a, a†] diagonal: {:?}", comm.diagonal_values().iter().map(|z| z.re).collect::<Vec<_>>());

    let n_op = number(n)?;
    let ada = ad.matmul(&a)?;
    let diff = n_op.add_scaled(&ada, C64::new(-1.0, 0.0))?;
    println!("max |n - a†a| = {:.1e}", diff.max_abs());

    // qudit d = 3 with two modes of 4 levels each
    let layout = SpaceLayout::new(3, vec![4, 4])?;
    let q1 = embed(&position_q(4)?, 2, &layout)?;
    let proj = embed(&qudit_projector(1, 1, 3)?, 0, &layout)?;
    let coupling = proj.matmul(&q1)?;
    println!(
        "dim {}, |1><1| Q_1: nnz {}, sparse {}, hermiticity deviation {:.1e}",
        layout.dim(),
        coupling.nnz(),
        coupling.is_sparse(),
        coupling.hermiticity_deviation()
    );
    let id = OperatorMatrix::identity(layout.dim());
    println!("trace of identity {}", id.trace().re);
    Ok(())
}
