//! Qubit, ion and resonator counts against the classical memory of a dense
//! wavefunction, and interaction counts of the bundled model.

use std::path::Path;

use mqbsim::mapping::{interaction_count, resource_estimate};
use mqbsim::VCModel;

fn main() -> mqbsim::Result<()> {
    println!("{:>4} {:>7} {:>5} {:>10} {:>12}", "N", "qubits", "ions", "resonators", "bytes");
    for n in [3, 10, 20, 40, 60] {
        let r = resource_estimate(n, 2)?;
        println!("{n:>4} {:>7} {:>5} {:>10} {:>12}", r.qubits, r.ions, r.resonators, r.classical_bytes_sci());
    }
    let model = VCModel::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pyrazine.toml"))?;
    let c = interaction_count(&model, 1)?;
    println!("pyrazine linear couplings: {} of {} possible", c.actual, c.formula);
    Ok(())
}
