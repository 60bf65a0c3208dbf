//! The p = 2 branch on every subgroup of the 8-element group.

use heisenberg_hsp::group::{GroupParams, Subgroup};
use heisenberg_hsp::oracle::HiddenFunction;
use heisenberg_hsp::recovery::{run_full, RecoveryConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> heisenberg_hsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = GroupParams::new(2, 1)?;
    let mut all: Vec<Subgroup> = Vec::new();
    for a in g.elements() {
        for b in g.elements() {
            let h = Subgroup::new(g, vec![a.clone(), b])?;
            let h = Subgroup::new(g, h.canonical_generators())?;
            if !all.contains(&h) {
                all.push(h);
            }
        }
    }
    for h in &all {
        let f = HiddenFunction::new(h.clone());
        let r = run_full(&f, &RecoveryConfig::default(), &mut rng)?;
        println!("{:<24} {:<8} -> {:<24} ok={} queries={}", h.to_string(), h.class().as_str(), r.subgroup.to_string(), r.subgroup == *h, r.stats.queries);
    }
    Ok(())
}
