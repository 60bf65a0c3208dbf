//! Block structure of the Clebsch-Gordan transform for every label pair.

use heisenberg_hsp::group::GroupParams;
use heisenberg_hsp::simulator::dense::cg_block_deviation;

fn main() -> heisenberg_hsp::Result<()> {
    for p in [3u32, 5] {
        let g = GroupParams::new(p, 1)?;
        println!("p = {p}");
        for k in 1..p {
            for l in 1..p {
                let kind = if (k + l) % p == 0 { "one-dim irreps once" } else { "copies of rho(k+l)" };
                println!("  k={k} l={l}: {kind:<20} deviation {:.2e}", cg_block_deviation(&g, k, l)?);
            }
        }
    }
    Ok(())
}
