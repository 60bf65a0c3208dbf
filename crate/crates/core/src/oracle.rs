//! The hiding function `f : G → S`, constant and distinct on left cosets.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::group::{GroupElement, GroupParams, Subgroup};

/// Canonical left-coset representative in fixed-width text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel(String);

impl CosetLabel {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug)]
pub struct HiddenFunction {
    hidden: Subgroup,
    queries: AtomicU64,
    width: usize,
}

impl HiddenFunction {
    pub fn new(h: Subgroup) -> Self {
        let width = (h.params().p() - 1).to_string().len();
        HiddenFunction { hidden: h, queries: AtomicU64::new(0), width }
    }

    pub fn params(&self) -> GroupParams {
        self.hidden.params()
    }

    /// Only the simulated quantum device sees the subgroup itself.
    pub(crate) fn hidden(&self) -> &Subgroup {
        &self.hidden
    }

    pub fn query(&self, g: &GroupElement) -> CosetLabel {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.label(g)
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Counts one query without evaluating, as when preparing a coset state.
    pub(crate) fn charge(&self) {
        self.queries.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn representative(&self, g: &GroupElement) -> GroupElement {
        let h = &self.hidden;
        let pr = h.params();
        let v = g.xy();
        let reduced = h.s_basis().reduce(&v);
        if h.contains_center() {
            return pr.from_xy(&reduced, 0);
        }
        // g·h with h ∈ H above reduced − v.
        let shift = pr.field().sub_vec(&reduced, &v);
        let lift = h.lift_of(&shift).expect("difference lies in S_H");
        pr.mul(g, &lift)
    }

    fn label(&self, g: &GroupElement) -> CosetLabel {
        let r = self.representative(g);
        let w = self.width;
        let join = |v: &[u32]| v.iter().map(|e| format!("{e:0w$}")).collect::<Vec<_>>().join(",");
        CosetLabel(format!("{}|{}|{:0w$}", join(&r.x), join(&r.y), r.z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_subgroup, SubgroupClass};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashMap};

    fn gp(p: u32, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    /// Coset partition by enumeration: `f(g)` is the sorted set `gH`.
    fn brute_labels(h: &Subgroup) -> HashMap<GroupElement, BTreeSet<GroupElement>> {
        let pr = h.params();
        let elems = h.elements().unwrap();
        pr.elements()
            .map(|g| {
                let coset: BTreeSet<GroupElement> = elems.iter().map(|e| pr.mul(&g, e)).collect();
                (g, coset)
            })
            .collect()
    }

    #[test]
    fn trivial_subgroup_is_injective() {
        let pr = gp(3, 1);
        let f = HiddenFunction::new(Subgroup::trivial(pr));
        let labels: BTreeSet<CosetLabel> = pr.elements().map(|g| f.query(&g)).collect();
        assert_eq!(labels.len(), 27);
        assert_eq!(f.query_count(), 27);
    }

    #[test]
    fn center_ignores_z() {
        let pr = gp(3, 1);
        let f = HiddenFunction::new(Subgroup::center(pr));
        for g in pr.elements() {
            let mut h = g.clone();
            h.z = (h.z + 1) % 3;
            assert_eq!(f.query(&g), f.query(&h));
        }
        let labels: BTreeSet<CosetLabel> = pr.elements().map(|g| f.query(&g)).collect();
        assert_eq!(labels.len(), 9);
    }

    #[test]
    fn matches_enumerated_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(p, n) in &[(3u32, 1usize), (2, 1), (2, 2), (5, 1)] {
            let pr = gp(p, n);
            for class in [SubgroupClass::AbelianNonCentral, SubgroupClass::NormalContainsCenter] {
                for _ in 0..10 {
                    let h = random_subgroup(pr, class, None, &mut rng);
                    let f = HiddenFunction::new(h.clone());
                    let brute = brute_labels(&h);
                    let all: Vec<GroupElement> = pr.elements().collect();
                    for a in &all {
                        assert!(brute[a].contains(&f.representative(a)));
                        for b in &all {
                            assert_eq!(f.label(a) == f.label(b), brute[a] == brute[b]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coset_law_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pr = gp(7, 3);
        for class in [SubgroupClass::AbelianNonCentral, SubgroupClass::NormalContainsCenter] {
            let h = random_subgroup(pr, class, None, &mut rng);
            let f = HiddenFunction::new(h.clone());
            for _ in 0..1000 {
                let g = pr.random_element(&mut rng);
                let other = pr.random_element(&mut rng);
                let same_coset = h.contains(&pr.mul(&pr.inverse(&g), &other));
                assert_eq!(f.query(&g) == f.query(&other), same_coset);
                let inside = if rng.gen_bool(0.5) && !h.generators().is_empty() {
                    h.generators()[rng.gen_range(0..h.generators().len())].clone()
                } else {
                    other.clone()
                };
                assert_eq!(f.query(&g) == f.query(&pr.mul(&g, &inside)), h.contains(&inside));
            }
            assert_eq!(f.query_count(), 4000);
        }
    }

    #[test]
    fn identity_and_members_share_label() {
        let pr = gp(3, 1);
        let h: Subgroup = "3,1;gen=1|1|2".parse().unwrap();
        let f = HiddenFunction::new(h.clone());
        for e in h.elements().unwrap() {
            assert_eq!(f.query(&pr.identity()), f.query(&e));
        }
        assert_eq!(f.query(&pr.identity()).as_str(), "0|0|0");
    }

    #[test]
    fn labels_are_fixed_width() {
        let pr = gp(11, 2);
        let f = HiddenFunction::new(Subgroup::trivial(pr));
        let g = pr.element(&[1, 10], &[3, 0], 7).unwrap();
        assert_eq!(f.query(&g).as_str(), "01,10|03,00|07");
    }
}
