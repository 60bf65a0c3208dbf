//! Recovers a planted abelian subgroup at odd p with each backend.

use heisenberg_hsp::group::{random_subgroup, GroupParams, SubgroupClass};
use heisenberg_hsp::oracle::HiddenFunction;
use heisenberg_hsp::recovery::{run_full, RecoveryConfig};
use heisenberg_hsp::simulator::{Backend, SumZeroPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> heisenberg_hsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = GroupParams::new(5, 1)?;
    let h = random_subgroup(g, SubgroupClass::AbelianNonCentral, Some(1), &mut rng);
    println!("planted {h}");
    for backend in [Backend::Analytic, Backend::Structured, Backend::Dense] {
        let f = HiddenFunction::new(h.clone());
        let config = RecoveryConfig { backend, policy: SumZeroPolicy::NegateFirst };
        let r = run_full(&f, &config, &mut rng)?;
        let s = &r.stats;
        println!(
            "{:<10} recovered {} (match {}), conjugator {:?}, rounds {} accepted {}, queries {}",
            backend.as_str(),
            r.subgroup,
            r.subgroup == h,
            r.conjugator.map(|c| c.xy()),
            s.rounds,
            s.accepted_rounds,
            s.queries
        );
    }
    Ok(())
}
