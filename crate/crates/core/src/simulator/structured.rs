//! Exact symbolic density operators.
//!
//! A state is a finite sum of terms `c · ω^e · O` with `c` rational. Over
//! the group register `O` is an outer product `|g⟩⟨g'|`; over qupit
//! registers `O` is a Weyl operator `W(a, b) = Σ_u ω^{b·u} |u + a⟩⟨u|`.
//! Weyl operators stay Weyl operators under linear permutations and
//! Fourier transforms, so the whole two-register pipeline is exact.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{HspError, Result};
use crate::group::{GroupParams, Subgroup};
use crate::reps::{ComplexMatrix, Omega, DENSE_MATRIX_CAP};
use crate::zp::{inv_mod, vec_from_index, vec_index, Fp, MatZp, VecZp};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `C[G]`, indexed like the columns of the Fourier transform.
    Group(GroupParams),
    /// `registers` copies of `(C^p)^{⊗n}`, register 0 most significant.
    Qupits { field: Fp, n: usize, registers: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operator {
    Outer { ket: usize, bra: usize },
    /// Concatenated over registers.
    Weyl { shift: VecZp, mult: VecZp },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub phase: u32,
    pub op: Operator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredState {
    space: Space,
    terms: Vec<Term>,
}

/// Row-major flat index of a concatenated register vector.
pub fn multi_index(p: u32, n: usize, v: &[u32]) -> usize {
    let pn = (p as usize).pow(n as u32);
    v.chunks(n.max(1)).fold(0usize, |acc, r| acc * pn + vec_index(r, p))
}

pub fn multi_from_index(p: u32, n: usize, registers: usize, mut idx: usize) -> VecZp {
    let pn = (p as usize).pow(n as u32);
    let mut chunks = Vec::with_capacity(registers);
    for _ in 0..registers {
        chunks.push(vec_from_index(idx % pn, p, n));
        idx /= pn;
    }
    chunks.into_iter().rev().flatten().collect()
}

/// Block matrix `[[a, b], [c, d]] ⊗ I_n` acting on two registers.
pub fn two_register_map(field: Fp, n: usize, a: u32, b: u32, c: u32, d: u32) -> MatZp {
    let mut m = MatZp::zeros(field, 2 * n, 2 * n);
    for i in 0..n {
        m.set(i, i, a);
        m.set(i, n + i, b);
        m.set(n + i, i, c);
        m.set(n + i, n + i, d);
    }
    m
}

impl StructuredState {
    pub fn new(space: Space, terms: Vec<Term>) -> Self {
        StructuredState { space, terms }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn field(&self) -> Fp {
        match self.space {
            Space::Group(pr) => pr.field(),
            Space::Qupits { field, .. } => field,
        }
    }

    pub fn dim(&self) -> u64 {
        match self.space {
            Space::Group(pr) => pr.order(),
            Space::Qupits { field, n, registers } => (field.p() as u64).pow((n * registers) as u32),
        }
    }

    fn qupits(&self) -> Result<(Fp, usize, usize)> {
        match self.space {
            Space::Qupits { field, n, registers } => Ok((field, n, registers)),
            Space::Group(_) => Err(HspError::ParamsMismatch),
        }
    }

    /// `ρ_k(H)/r_k(H) = p^{-n} Σ_{h∈H} ω^{kz} W(x, k y)` for abelian
    /// non-central `H`.
    pub fn irrep_state(k: u32, h: &Subgroup) -> Result<Self> {
        let pr = h.params();
        let f = pr.field();
        let k = k % pr.p();
        if k == 0 {
            return Err(HspError::ZeroLabel);
        }
        if h.contains_center() {
            return Err(HspError::ZeroState);
        }
        let coeff = Rational::new(1, pr.pn() as i64);
        let terms = h
            .elements()?
            .into_iter()
            .map(|e| Term {
                coeff,
                phase: f.mul(k, e.z),
                op: Operator::Weyl { shift: e.x.clone(), mult: f.scale_vec(k, &e.y) },
            })
            .collect();
        Ok(StructuredState { space: Space::Qupits { field: f, n: pr.n(), registers: 1 }, terms })
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let f = self.field();
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                phase: f.neg(t.phase),
                op: match &t.op {
                    Operator::Outer { ket, bra } => Operator::Outer { ket: *ket, bra: *bra },
                    Operator::Weyl { shift, mult } => Operator::Weyl { shift: shift.clone(), mult: f.neg_vec(mult) },
                },
            })
            .collect();
        StructuredState { space: self.space, terms }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let (f, n, r1) = self.qupits()?;
        let (f2, n2, r2) = other.qupits()?;
        if f != f2 || n != n2 {
            return Err(HspError::ParamsMismatch);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let (Operator::Weyl { shift: sa, mult: ma }, Operator::Weyl { shift: sb, mult: mb }) = (&a.op, &b.op)
                else {
                    return Err(HspError::ParamsMismatch);
                };
                let mut shift = sa.clone();
                shift.extend_from_slice(sb);
                let mut mult = ma.clone();
                mult.extend_from_slice(mb);
                terms.push(Term { coeff: a.coeff * b.coeff, phase: f.add(a.phase, b.phase), op: Operator::Weyl { shift, mult } });
            }
        }
        Ok(StructuredState { space: Space::Qupits { field: f, n, registers: r1 + r2 }, terms })
    }

    /// Conjugation by `P|u⟩ = |Au⟩`: `W(a, b) ↦ W(Aa, A^{-T} b)`.
    pub fn apply_linear(&self, a: &MatZp) -> Result<Self> {
        let (_, n, regs) = self.qupits()?;
        if a.rows() != n * regs || a.cols() != n * regs {
            return Err(HspError::ParamsMismatch);
        }
        let inv_t = a
            .inverse()
            .ok_or_else(|| HspError::ConfigInvalid("linear map is not invertible".into()))?
            .transpose();
        let terms = self
            .terms
            .iter()
            .map(|t| match &t.op {
                Operator::Weyl { shift, mult } => Term {
                    coeff: t.coeff,
                    phase: t.phase,
                    op: Operator::Weyl { shift: a.mul_vec(shift), mult: inv_t.mul_vec(mult) },
                },
                Operator::Outer { .. } => unreachable!("qupit states hold Weyl terms"),
            })
            .collect();
        Ok(StructuredState { space: self.space, terms })
    }

    /// Conjugation by `F_c|s⟩ = p^{-n/2} Σ_w ω^{c s·w} |w⟩` on one register:
    /// `W(a, b) ↦ ω^{-a·b} W(-b/c, c a)`.
    pub fn apply_fourier(&self, register: usize, c: u32) -> Result<Self> {
        let (f, n, regs) = self.qupits()?;
        if register >= regs {
            return Err(HspError::ParamsMismatch);
        }
        let c = c % f.p();
        let cinv = inv_mod(c, f)?;
        let range = register * n..(register + 1) * n;
        let terms = self
            .terms
            .iter()
            .map(|t| match &t.op {
                Operator::Weyl { shift, mult } => {
                    let a = &shift[range.clone()];
                    let b = &mult[range.clone()];
                    let mut s = shift.clone();
                    let mut m = mult.clone();
                    s.splice(range.clone(), f.scale_vec(f.neg(cinv), b));
                    m.splice(range.clone(), f.scale_vec(c, a));
                    Term { coeff: t.coeff, phase: f.sub(t.phase, f.dot(a, b)), op: Operator::Weyl { shift: s, mult: m } }
                }
                Operator::Outer { .. } => unreachable!("qupit states hold Weyl terms"),
            })
            .collect();
        Ok(StructuredState { space: self.space, terms })
    }

    /// `U_α : |u, ..⟩ ↦ |αu, ..⟩` on register 0.
    pub fn apply_u_alpha(&self, alpha: u32) -> Result<Self> {
        let (f, n, regs) = self.qupits()?;
        let alpha = alpha % f.p();
        if alpha == 0 {
            return Err(HspError::ZeroAlpha);
        }
        let mut a = MatZp::identity(f, n * regs);
        for i in 0..n {
            a.set(i, i, alpha);
        }
        self.apply_linear(&a)
    }

    /// Clebsch-Gordan transform for `ρ_k ⊗ ρ_l` on two registers.
    pub fn clebsch_gordan(&self, k: u32, l: u32) -> Result<Self> {
        let (f, n, regs) = self.qupits()?;
        if regs != 2 {
            return Err(HspError::ParamsMismatch);
        }
        let (k, l) = (k % f.p(), l % f.p());
        if k == 0 || l == 0 {
            return Err(HspError::ZeroLabel);
        }
        let p = f.p();
        if p == 2 {
            return self.apply_linear(&two_register_map(f, n, 1, 1, 0, 1))?.apply_fourier(1, 1);
        }
        let s = f.add(k, l);
        if s == 0 {
            let half = f.div(l, 2);
            self.apply_linear(&two_register_map(f, n, 1, p - 1, 1, 1))?.apply_fourier(1, half)
        } else {
            let sinv = inv_mod(s, f)?;
            self.apply_linear(&two_register_map(f, n, 1, p - 1, f.mul(k, sinv), f.mul(l, sinv)))
        }
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let dim = self.dim();
        if dim > DENSE_MATRIX_CAP {
            return Err(HspError::TooLarge { dim, cap: DENSE_MATRIX_CAP });
        }
        let f = self.field();
        let omega = Omega::new(f.p());
        let d = dim as usize;
        let mut m = ComplexMatrix::zeros(d, d);
        let (n, regs) = match self.space {
            Space::Qupits { n, registers, .. } => (n, registers),
            Space::Group(_) => (0, 0),
        };
        for t in &self.terms {
            let c = Complex64::new(*t.coeff.numer() as f64 / *t.coeff.denom() as f64, 0.0) * omega.pow(t.phase);
            match &t.op {
                Operator::Outer { ket, bra } => m[(*ket, *bra)] += c,
                Operator::Weyl { shift, mult } => {
                    for col in 0..d {
                        let u = multi_from_index(f.p(), n, regs, col);
                        let row = multi_index(f.p(), n, &f.add_vec(&u, shift));
                        m[(row, col)] += c * omega.pow(f.dot(mult, &u));
                    }
                }
            }
        }
        Ok(m)
    }

    /// Exact diagonal entry at a basis index.
    ///
    /// Collects rational weights `c_j` of `ω^j`. Since `1, ω, .., ω^{p-2}`
    /// are linearly independent over Q and `Σ_j ω^j = 0`, the sum is
    /// rational iff `c_1 = .. = c_{p-1}`, and then equals `c_0 − c_1`.
    pub fn diagonal_entry(&self, idx: usize) -> Result<Rational> {
        let f = self.field();
        let mut weights = vec![Rational::zero(); f.p() as usize];
        match self.space {
            Space::Group(_) => {
                for t in &self.terms {
                    if let Operator::Outer { ket, bra } = t.op {
                        if ket == idx && bra == idx {
                            weights[t.phase as usize] += t.coeff;
                        }
                    }
                }
            }
            Space::Qupits { n, registers, .. } => {
                let u = multi_from_index(f.p(), n, registers, idx);
                for t in &self.terms {
                    if let Operator::Weyl { shift, mult } = &t.op {
                        if shift.iter().all(|&s| s == 0) {
                            weights[f.add(t.phase, f.dot(mult, &u)) as usize] += t.coeff;
                        }
                    }
                }
            }
        }
        cyclotomic_value(&weights)
    }

    /// All diagonal entries. Only terms without shift contribute.
    pub fn diagonal(&self) -> Result<Vec<Rational>> {
        let dim = self.dim() as usize;
        match self.space {
            Space::Group(_) => (0..dim).map(|i| self.diagonal_entry(i)).collect(),
            Space::Qupits { field, n, registers } => {
                let diag_terms: Vec<&Term> = self
                    .terms
                    .iter()
                    .filter(|t| matches!(&t.op, Operator::Weyl { shift, .. } if shift.iter().all(|&s| s == 0)))
                    .collect();
                // Merge terms with equal multiplier.
                let mut merged: HashMap<&VecZp, Vec<Rational>> = HashMap::new();
                for t in diag_terms {
                    let Operator::Weyl { mult, .. } = &t.op else { unreachable!() };
                    let w = merged.entry(mult).or_insert_with(|| vec![Rational::zero(); field.p() as usize]);
                    w[t.phase as usize] += t.coeff;
                }
                (0..dim)
                    .map(|i| {
                        let u = multi_from_index(field.p(), n, registers, i);
                        let mut weights = vec![Rational::zero(); field.p() as usize];
                        for (mult, w) in &merged {
                            let shift = field.dot(mult, &u);
                            for (j, c) in w.iter().enumerate() {
                                if !c.is_zero() {
                                    weights[field.add(j as u32, shift) as usize] += c;
                                }
                            }
                        }
                        cyclotomic_value(&weights)
                    })
                    .collect()
            }
        }
    }

    pub fn trace(&self) -> Result<Rational> {
        Ok(self.diagonal()?.into_iter().fold(Rational::zero(), |a, b| a + b))
    }

    /// Standard-basis measurement with exact rational probabilities.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let diag = self.diagonal()?;
        sample_rational(&diag, rng)
    }
}

fn cyclotomic_value(weights: &[Rational]) -> Result<Rational> {
    if weights.len() == 2 {
        return Ok(weights[0] - weights[1]);
    }
    if weights[2..].iter().any(|w| *w != weights[1]) {
        return Err(HspError::ConfigInvalid("diagonal entry is not rational".into()));
    }
    Ok(weights[0] - weights[1])
}

/// Draws an index with probability proportional to exact nonnegative
/// weights that sum to one.
pub fn sample_rational<R: Rng + ?Sized>(probs: &[Rational], rng: &mut R) -> Result<usize> {
    let total = probs.iter().fold(Rational::zero(), |a, b| a + b);
    if total != Rational::one() || probs.iter().any(|p| *p < Rational::zero()) {
        return Err(HspError::ConfigInvalid(format!("distribution sums to {total}")));
    }
    let denom = probs.iter().fold(1i64, |acc, p| num_integer_lcm(acc, *p.denom()));
    let u = rng.gen_range(0..denom);
    let mut acc = 0i64;
    for (i, p) in probs.iter().enumerate() {
        acc += p.numer() * (denom / p.denom());
        if u < acc {
            return Ok(i);
        }
    }
    unreachable!("weights sum to the common denominator")
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_subgroup, SubgroupClass};
    use crate::reps::{max_deviation, projector, rho, weyl_dense, IrrepLabel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gp(p: u32, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    fn single(field: Fp, n: usize, shift: Vec<u32>, mult: Vec<u32>, regs: usize) -> StructuredState {
        StructuredState::new(
            Space::Qupits { field, n, registers: regs },
            vec![Term { coeff: Rational::one(), phase: 0, op: Operator::Weyl { shift, mult } }],
        )
    }

    fn dense_fourier(p: u32, n: usize, c: u32) -> ComplexMatrix {
        let om = Omega::new(p);
        let d = (p as usize).pow(n as u32);
        let f = Fp::new(p).unwrap();
        ComplexMatrix::from_fn(d, d, |w, s| {
            let sv = vec_from_index(s, p, n);
            let wv = vec_from_index(w, p, n);
            om.pow(f.mul(c, f.dot(&sv, &wv))) / (d as f64).sqrt()
        })
    }

    fn dense_linear(f: Fp, n: usize, regs: usize, a: &MatZp) -> ComplexMatrix {
        let d = (f.p() as usize).pow((n * regs) as u32);
        let mut m = ComplexMatrix::zeros(d, d);
        for col in 0..d {
            let u = multi_from_index(f.p(), n, regs, col);
            m[(multi_index(f.p(), n, &a.mul_vec(&u)), col)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[test]
    fn irrep_state_matches_dense_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pr = gp(3, 2);
        for _ in 0..10 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            for k in 1..3 {
                let s = StructuredState::irrep_state(k, &h).unwrap();
                let r = (pr.pn() / h.order()) as f64;
                let expect = projector(&IrrepLabel::HighDim { k }, &h).unwrap() / Complex64::new(r, 0.0);
                assert!(max_deviation(&s.to_dense().unwrap(), &expect) < 1e-12);
                assert_eq!(s.trace().unwrap(), Rational::one());
                let conj = s.conjugate().to_dense().unwrap();
                let minus = StructuredState::irrep_state(3 - k, &h).unwrap().to_dense().unwrap();
                assert!(max_deviation(&conj, &minus) < 1e-12);
            }
        }
        let center = Subgroup::center(pr);
        assert_eq!(StructuredState::irrep_state(1, &center).unwrap_err(), HspError::ZeroState);
    }

    #[test]
    fn fourier_rule_matches_dense() {
        for &(p, n) in &[(3u32, 1usize), (5, 1), (3, 2), (2, 2)] {
            let f = Fp::new(p).unwrap();
            let om = Omega::new(p);
            let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
            for _ in 0..10 {
                let a = f.random_vec(n, &mut rng);
                let b = f.random_vec(n, &mut rng);
                for c in 1..p {
                    let st = single(f, n, a.clone(), b.clone(), 1).apply_fourier(0, c).unwrap();
                    let fc = dense_fourier(p, n, c);
                    let expect = &fc * weyl_dense(p, &a, &b, &om) * fc.adjoint();
                    assert!(max_deviation(&st.to_dense().unwrap(), &expect) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_rule_matches_dense() {
        let f = Fp::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let maps = [two_register_map(f, 1, 1, 4, 1, 1), two_register_map(f, 1, 1, 4, 2, 4), two_register_map(f, 1, 3, 0, 0, 1)];
        for a in &maps {
            let pm = dense_linear(f, 1, 2, a);
            for _ in 0..10 {
                let s = f.random_vec(2, &mut rng);
                let m = f.random_vec(2, &mut rng);
                let before = single(f, 1, s.clone(), m.clone(), 2);
                let st = before.apply_linear(a).unwrap();
                let expect = &pm * before.to_dense().unwrap() * pm.adjoint();
                assert!(max_deviation(&st.to_dense().unwrap(), &expect) < 1e-12);
            }
        }
    }

    #[test]
    fn u_alpha_relabels() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pr = gp(5, 1);
        let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, Some(1), &mut rng);
        let s = StructuredState::irrep_state(1, &h).unwrap();
        assert_eq!(s.apply_u_alpha(1).unwrap(), s);
        assert_eq!(s.apply_u_alpha(0).unwrap_err(), HspError::ZeroAlpha);
    }

    #[test]
    fn tensor_is_kronecker() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pr = gp(3, 1);
        let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, Some(1), &mut rng);
        let a = StructuredState::irrep_state(1, &h).unwrap();
        let b = StructuredState::irrep_state(2, &h).unwrap();
        let t = a.tensor(&b).unwrap();
        let expect = a.to_dense().unwrap().kronecker(&b.to_dense().unwrap());
        assert!(max_deviation(&t.to_dense().unwrap(), &expect) < 1e-12);
    }

    #[test]
    fn cg_permutation_example() {
        // p=5, k=1, l=2 sends |1,1⟩ to |0,1⟩.
        let f = Fp::new(5).unwrap();
        let a = two_register_map(f, 1, 1, 4, f.mul(1, inv_mod(3, f).unwrap()), f.mul(2, inv_mod(3, f).unwrap()));
        assert_eq!(a.mul_vec(&[1, 1]), vec![0, 1]);
    }

    #[test]
    fn cg_diagonal_is_exact_and_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pr = gp(3, 1);
        for _ in 0..10 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let l = rng.gen_range(1..3);
            let st = StructuredState::irrep_state(3 - l, &h)
                .unwrap()
                .tensor(&StructuredState::irrep_state(l, &h).unwrap())
                .unwrap()
                .clebsch_gordan(3 - l, l)
                .unwrap();
            let diag = st.diagonal().unwrap();
            let dense = st.to_dense().unwrap();
            for (i, d) in diag.iter().enumerate() {
                let exact = *d.numer() as f64 / *d.denom() as f64;
                assert!((dense[(i, i)].re - exact).abs() < 1e-12);
                assert!(dense[(i, i)].im.abs() < 1e-12);
                assert_eq!(st.diagonal_entry(i).unwrap(), *d);
            }
            assert_eq!(st.trace().unwrap(), Rational::one());
        }
    }

    #[test]
    fn group_space_outer_terms() {
        let pr = gp(3, 1);
        let st = StructuredState::new(
            Space::Group(pr),
            vec![
                Term { coeff: Rational::new(1, 2), phase: 0, op: Operator::Outer { ket: 0, bra: 0 } },
                Term { coeff: Rational::new(1, 2), phase: 0, op: Operator::Outer { ket: 5, bra: 5 } },
                Term { coeff: Rational::new(1, 2), phase: 1, op: Operator::Outer { ket: 0, bra: 5 } },
            ],
        );
        assert_eq!(st.trace().unwrap(), Rational::one());
        let m = st.to_dense().unwrap();
        assert!((m[(0, 5)] - Omega::new(3).pow(1) * 0.5).norm() < 1e-15);
    }

    #[test]
    fn rational_sampler_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let probs = vec![Rational::new(1, 3), Rational::zero(), Rational::new(2, 3)];
        let mut counts = [0u32; 3];
        for _ in 0..3000 {
            counts[sample_rational(&probs, &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as i32 - 1000).abs() < 120);
        assert!(sample_rational(&[Rational::new(1, 2)], &mut rng).is_err());
    }

    #[test]
    fn rho_dense_consistency() {
        let pr = gp(3, 1);
        let h = Subgroup::trivial(pr);
        let s = StructuredState::irrep_state(1, &h).unwrap().to_dense().unwrap();
        let r = rho(&pr, 1, &pr.identity()).unwrap() / Complex64::new(3.0, 0.0);
        assert!(max_deviation(&s, &r) < 1e-15);
    }
}
