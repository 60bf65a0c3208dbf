//! Exact Plancherel masses against sampled label frequencies.

use std::collections::BTreeMap;

use heisenberg_hsp::group::{random_subgroup, GroupParams, SubgroupClass};
use heisenberg_hsp::reps::{plancherel, LabelSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> heisenberg_hsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = GroupParams::new(3, 1)?;
    for class in [SubgroupClass::AbelianNonCentral, SubgroupClass::NormalContainsCenter] {
        let h = random_subgroup(g, class, Some(1), &mut rng);
        let dist = plancherel(&h);
        println!("H = {h} ({})", class.as_str());
        println!("  one-dim total {}, sum {}", dist.one_dim_total(), dist.total());
        let sampler = LabelSampler::new(&h);
        let draws = 10_000;
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for _ in 0..draws {
            *counts.entry(sampler.sample(&mut rng).to_string()).or_default() += 1;
        }
        for (label, mass) in &dist.entries {
            if *mass.numer() == 0 {
                continue;
            }
            let seen = counts.get(&label.to_string()).copied().unwrap_or(0);
            println!("  {label:<10} exact {mass:<5} observed {:.4}", seen as f64 / draws as f64);
        }
    }
    Ok(())
}
