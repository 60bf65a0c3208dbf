//! Group law, conjugation and subgroup classification.

use heisenberg_hsp::group::{canonical_h0, GroupParams, Subgroup};
use heisenberg_hsp::zp::{Fp, SubspaceBasis};

fn main() -> heisenberg_hsp::Result<()> {
    let g = GroupParams::new(5, 2)?;
    let a = g.element(&[1, 2], &[3, 4], 0)?;
    let b = g.element(&[0, 1], &[1, 0], 2)?;
    println!("a = {a}, b = {b}");
    println!("ab = {}, ba = {}", g.mul(&a, &b), g.mul(&b, &a));
    println!("a^-1 = {}, a^5 = {}", g.inverse(&a), g.power(&a, 5));
    println!("b^-1 a b = {}", g.conjugate(&a, &b)?);

    let h: Subgroup = "5,2;gen=1,0|0,2|3;gen=0,1|2,0|1".parse()?;
    println!("\nH = {h}");
    println!("class {:?}, order {}, S_H {:?}", h.class(), h.order(), h.s_basis().rows());
    let c = h.conjugator()?;
    let f = Fp::new(5)?;
    let h0 = canonical_h0(&SubspaceBasis::span(f, 4, h.s_basis().rows()), g)?;
    println!("conjugator {:?}, g^-1 H g == H_0: {}", c.xy(), h.conjugate_by(&c.element()) == h0);

    let n: Subgroup = "5,2;gen=1,1|0,0|0;gen=0,0|0,0|1".parse()?;
    println!("\nN = {n}: class {:?}, order {}", n.class(), n.order());
    Ok(())
}
