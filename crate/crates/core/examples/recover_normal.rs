//! Normal subgroups: only one-dimensional labels appear.

use heisenberg_hsp::group::{random_subgroup, GroupParams, SubgroupClass};
use heisenberg_hsp::oracle::HiddenFunction;
use heisenberg_hsp::recovery::{detect_case, run_full, RecoveryConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> heisenberg_hsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = GroupParams::new(3, 2)?;
    for _ in 0..5 {
        let h = random_subgroup(g, SubgroupClass::NormalContainsCenter, None, &mut rng);
        let f = HiddenFunction::new(h.clone());
        let case = detect_case(&f);
        let r = run_full(&f, &RecoveryConfig::default(), &mut rng)?;
        println!(
            "{h} detected {} -> dim S_H {}, recovered {}, samples {}",
            case.as_str(),
            r.s_basis.dim(),
            r.subgroup == h,
            r.stats.single_samples
        );
    }
    Ok(())
}
