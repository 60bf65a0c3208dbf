//! Builds the recursive Fourier circuit and compares it with the dense QFT.

use heisenberg_hsp::group::GroupParams;
use heisenberg_hsp::qft_circuit::build_circuit;
use heisenberg_hsp::reps::{max_deviation, qft_dense};

fn main() -> heisenberg_hsp::Result<()> {
    for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
        let g = GroupParams::new(p, n)?;
        let c = build_circuit(&g);
        let dev = max_deviation(&c.unitary()?, &qft_dense(&g)?);
        println!("p={p} n={n}: {} gates on {} wires, max deviation {dev:.2e}", c.gates().len(), c.wires());
    }
    let c = build_circuit(&GroupParams::new(3, 2)?);
    println!("\ngate list for p=3, n=2:\n{}", c.dump());
    Ok(())
}
