//! The relabelling u -> alpha u turns rho_k(H) into rho_{k/alpha^2}(phi_alpha(H)).

use heisenberg_hsp::group::{random_subgroup, GroupParams, SubgroupClass};
use heisenberg_hsp::simulator::{choose_alpha, verify_label_change_theorem, SumZeroPolicy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> heisenberg_hsp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = GroupParams::new(7, 1)?;
    let f = g.field();
    for _ in 0..6 {
        let h = random_subgroup(g, SubgroupClass::AbelianNonCentral, None, &mut rng);
        let (k, l) = (rng.gen_range(1..7), rng.gen_range(1..7));
        match choose_alpha(f, k, l, SumZeroPolicy::NegateFirst) {
            Ok(alpha) => {
                let dev = verify_label_change_theorem(&g, k, alpha, &h)?;
                let target = f.mul(k, f.inv(f.mul(alpha, alpha))?);
                println!("H={h} k={k} l={l} alpha={alpha}: new label {target} = -l, deviation {dev:.2e}");
            }
            Err(outcome) => println!("H={h} k={k} l={l}: {outcome}"),
        }
    }
    Ok(())
}
