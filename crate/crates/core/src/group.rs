//! The Weyl-Heisenberg group `G = Z_p^{n+1} ⋊ Z_p^n` and its subgroups.
//!
//! Elements are triples `(x, y, z)` with `x, y ∈ Z_p^n`, `z ∈ Z_p` and the
//! product `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+x'·y)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{HspError, Result};
use crate::zp::{
    random_isotropic, random_subspace, random_totally_singular, vec_from_index, vec_index,
    BilinearForm, Fp, MatZp, SubspaceBasis, VecZp,
};

/// Dense operations refuse groups larger than this.
pub const DENSE_GROUP_CAP: u64 = 1 << 20;

/// Full enumeration of a subgroup is allowed up to this order.
pub const ENUMERATION_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    field: Fp,
    n: usize,
}

impl GroupParams {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        let field = Fp::new(p)?;
        if n == 0 {
            return Err(HspError::ConfigInvalid("n must be at least 1".into()));
        }
        let bits = (p as f64).log2() * (2 * n + 1) as f64;
        if bits >= 62.0 {
            return Err(HspError::ConfigInvalid(format!("group order {p}^{} is too large", 2 * n + 1)));
        }
        Ok(GroupParams { field, n })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.field.p()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
    }

    /// `p^n`, the dimension of the high-dimensional irreps.
    pub fn pn(&self) -> u64 {
        (self.p() as u64).pow(self.n as u32)
    }

    /// `|G| = p^{2n+1}`.
    pub fn order(&self) -> u64 {
        (self.p() as u64).pow(2 * self.n as u32 + 1)
    }

    pub fn symplectic(&self) -> BilinearForm {
        BilinearForm::Symplectic { n: self.n }
    }

    pub fn check_dense(&self) -> Result<()> {
        if self.order() > DENSE_GROUP_CAP {
            return Err(HspError::TooLarge { dim: self.order(), cap: DENSE_GROUP_CAP });
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { x: vec![0; self.n], y: vec![0; self.n], z: 0 }
    }

    /// The generator `(0, 0, 1)` of the center.
    pub fn central(&self, z: u32) -> GroupElement {
        GroupElement { x: vec![0; self.n], y: vec![0; self.n], z: z % self.p() }
    }

    /// Builds an element, reducing entries and checking lengths.
    pub fn element(&self, x: &[u32], y: &[u32], z: u32) -> Result<GroupElement> {
        if x.len() != self.n || y.len() != self.n {
            return Err(HspError::ParamsMismatch);
        }
        let p = self.p();
        Ok(GroupElement {
            x: x.iter().map(|v| v % p).collect(),
            y: y.iter().map(|v| v % p).collect(),
            z: z % p,
        })
    }

    /// Element with projection `v ∈ Z_p^{2n}` and the given center part.
    pub fn from_xy(&self, v: &[u32], z: u32) -> GroupElement {
        debug_assert_eq!(v.len(), 2 * self.n);
        GroupElement { x: v[..self.n].to_vec(), y: v[self.n..].to_vec(), z: z % self.p() }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let f = self.field;
        GroupElement {
            x: f.random_vec(self.n, rng),
            y: f.random_vec(self.n, rng),
            z: rng.gen_range(0..self.p()),
        }
    }

    /// Column index `z·p^{2n} + idx(x)·p^n + idx(y)`.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        let p = self.p();
        let pn = self.pn() as usize;
        g.z as usize * pn * pn + vec_index(&g.x, p) * pn + vec_index(&g.y, p)
    }

    pub fn element_at(&self, idx: usize) -> GroupElement {
        let p = self.p();
        let pn = self.pn() as usize;
        GroupElement {
            x: vec_from_index((idx / pn) % pn, p, self.n),
            y: vec_from_index(idx % pn, p, self.n),
            z: (idx / (pn * pn)) as u32,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        let p = self.p();
        let ok = g.x.len() == self.n
            && g.y.len() == self.n
            && g.z < p
            && g.x.iter().chain(&g.y).all(|&v| v < p);
        if ok {
            Ok(())
        } else {
            Err(HspError::ParamsMismatch)
        }
    }

    /// Checked product.
    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Unchecked product; callers guarantee matching parameters.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let f = self.field;
        let z = f.add(f.add(g.z, h.z), f.dot(&h.x, &g.y));
        GroupElement { x: f.add_vec(&g.x, &h.x), y: f.add_vec(&g.y, &h.y), z }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let f = self.field;
        GroupElement {
            x: f.neg_vec(&g.x),
            y: f.neg_vec(&g.y),
            z: f.add(f.neg(g.z), f.dot(&g.x, &g.y)),
        }
    }

    /// `g^a` for any integer `a`.
    pub fn power(&self, g: &GroupElement, a: i64) -> GroupElement {
        let f = self.field;
        if self.p() == 2 {
            let mut acc = self.identity();
            // g has order dividing 4 when p = 2.
            for _ in 0..a.rem_euclid(4) {
                acc = self.mul(&acc, g);
            }
            return acc;
        }
        let a = f.reduce(a);
        let tri = f.div(f.mul(a, f.sub(a, 1)), 2);
        GroupElement {
            x: f.scale_vec(a, &g.x),
            y: f.scale_vec(a, &g.y),
            z: f.add(f.mul(a, g.z), f.mul(tri, f.dot(&g.x, &g.y))),
        }
    }

    /// `g^{-1} h g = (x, y, z + x'·y − x·y')` with `g = (x', y', z')`.
    pub fn conjugate(&self, h: &GroupElement, g: &GroupElement) -> Result<GroupElement> {
        self.check(h)?;
        self.check(g)?;
        Ok(self.conj(h, g))
    }

    pub(crate) fn conj(&self, h: &GroupElement, g: &GroupElement) -> GroupElement {
        let f = self.field;
        let z = f.sub(f.add(h.z, f.dot(&g.x, &h.y)), f.dot(&h.x, &g.y));
        GroupElement { x: h.x.clone(), y: h.y.clone(), z }
    }

    /// The upper unitriangular `(n+2)×(n+2)` matrix of `g`.
    pub fn matrix_realization(&self, g: &GroupElement) -> MatZp {
        let n = self.n;
        let mut m = MatZp::identity(self.field, n + 2);
        for i in 0..n {
            m.set(0, i + 1, g.y[i]);
            m.set(i + 1, n + 1, g.x[i]);
        }
        m.set(0, n + 1, g.z);
        m
    }

    pub fn apply_phi_alpha(&self, aut: GroupAutomorphism, g: &GroupElement) -> GroupElement {
        let f = self.field;
        let a = aut.alpha;
        GroupElement { x: f.scale_vec(a, &g.x), y: f.scale_vec(a, &g.y), z: f.mul(f.mul(a, a), g.z) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub x: VecZp,
    pub y: VecZp,
    pub z: u32,
}

impl GroupElement {
    /// The projection `(x, y) ∈ Z_p^{2n}`.
    pub fn xy(&self) -> VecZp {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }

    pub fn is_central(&self) -> bool {
        self.x.iter().chain(&self.y).all(|&v| v == 0)
    }
}

fn write_vec(f: &mut fmt::Formatter<'_>, v: &[u32]) -> fmt::Result {
    for (i, e) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for GroupElement {
    /// `x|y|z` with comma-separated vectors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vec(f, &self.x)?;
        f.write_str("|")?;
        write_vec(f, &self.y)?;
        write!(f, "|{}", self.z)
    }
}

/// `φ_α : (x, y, z) ↦ (αx, αy, α²z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupAutomorphism {
    alpha: u32,
}

impl GroupAutomorphism {
    pub fn new(field: Fp, alpha: u32) -> Result<Self> {
        let alpha = alpha % field.p();
        if alpha == 0 {
            return Err(HspError::ZeroAlpha);
        }
        Ok(GroupAutomorphism { alpha })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SubgroupClass {
    #[serde(rename = "abelian")]
    AbelianNonCentral,
    #[serde(rename = "normal")]
    NormalContainsCenter,
}

impl SubgroupClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SubgroupClass::AbelianNonCentral => "abelian",
            SubgroupClass::NormalContainsCenter => "normal",
        }
    }
}

impl FromStr for SubgroupClass {
    type Err = HspError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abelian" | "AbelianNonCentral" => Ok(SubgroupClass::AbelianNonCentral),
            "normal" | "NormalContainsCenter" => Ok(SubgroupClass::NormalContainsCenter),
            other => Err(HspError::Parse(format!("unknown subgroup class `{other}`"))),
        }
    }
}

/// `(x̂, ŷ, 0)`, with `g^{-1} H g = H_0` for `g` the conjugator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Conjugator {
    pub xhat: VecZp,
    pub yhat: VecZp,
}

impl Conjugator {
    pub fn zero(n: usize) -> Self {
        Conjugator { xhat: vec![0; n], yhat: vec![0; n] }
    }

    pub fn from_xy(v: &[u32]) -> Self {
        let n = v.len() / 2;
        Conjugator { xhat: v[..n].to_vec(), yhat: v[n..].to_vec() }
    }

    pub fn xy(&self) -> VecZp {
        let mut v = self.xhat.clone();
        v.extend_from_slice(&self.yhat);
        v
    }

    pub fn element(&self) -> GroupElement {
        GroupElement { x: self.xhat.clone(), y: self.yhat.clone(), z: 0 }
    }

    /// Canonical representative modulo a subspace (normally `S_H^⊥`).
    pub fn reduced(&self, modulo: &SubspaceBasis) -> Self {
        Conjugator::from_xy(&modulo.reduce(&self.xy()))
    }
}

/// A subgroup given by generators, with its structure cached.
#[derive(Debug, Clone)]
pub struct Subgroup {
    params: GroupParams,
    generators: Vec<GroupElement>,
    s_h: SubspaceBasis,
    class: SubgroupClass,
    /// One element of `H` above each echelon row of `S_H`.
    lifts: Vec<GroupElement>,
}

impl Subgroup {
    pub fn new(params: GroupParams, generators: Vec<GroupElement>) -> Result<Self> {
        for g in &generators {
            params.check(g)?;
        }
        let (s_h, lifts, central) = eliminate(&params, &generators);
        let contains_center = central
            || !s_h.is_isotropic(params.n())
            || (params.p() == 2 && lifts.iter().any(|l| params.field().dot(&l.x, &l.y) != 0));
        let class = if contains_center {
            SubgroupClass::NormalContainsCenter
        } else {
            SubgroupClass::AbelianNonCentral
        };
        Ok(Subgroup { params, generators, s_h, class, lifts })
    }

    pub fn trivial(params: GroupParams) -> Self {
        Subgroup::new(params, Vec::new()).expect("empty generator list")
    }

    /// The commutator subgroup `G′ = {(0, 0, z)}`.
    pub fn center(params: GroupParams) -> Self {
        Subgroup::new(params, vec![params.central(1)]).expect("central generator")
    }

    pub fn whole(params: GroupParams) -> Self {
        Subgroup::preimage(params, &SubspaceBasis::full(params.field(), 2 * params.n()))
    }

    /// `{(x, y, z) : (x, y) ∈ S}`.
    pub fn preimage(params: GroupParams, s: &SubspaceBasis) -> Self {
        let mut gens: Vec<GroupElement> = s.rows().iter().map(|r| params.from_xy(r, 0)).collect();
        gens.push(params.central(1));
        Subgroup::new(params, gens).expect("generators built from params")
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn class(&self) -> SubgroupClass {
        self.class
    }

    pub fn s_basis(&self) -> &SubspaceBasis {
        &self.s_h
    }

    pub fn contains_center(&self) -> bool {
        self.class == SubgroupClass::NormalContainsCenter
    }

    pub fn is_abelian(&self) -> bool {
        self.s_h.is_isotropic(self.params.n())
    }

    /// Lifts of the echelon basis of `S_H`, in row order.
    pub fn lifts(&self) -> &[GroupElement] {
        &self.lifts
    }

    pub fn order(&self) -> u64 {
        let base = self.s_h.cardinality();
        if self.contains_center() {
            base * self.params.p() as u64
        } else {
            base
        }
    }

    /// Canonical generating set: one lift per echelon row, plus `(0,0,1)`
    /// in the normal case (where lifts are taken with `z = 0`).
    pub fn canonical_generators(&self) -> Vec<GroupElement> {
        if self.contains_center() {
            let mut g: Vec<GroupElement> =
                self.s_h.rows().iter().map(|r| self.params.from_xy(r, 0)).collect();
            g.push(self.params.central(1));
            g
        } else {
            self.lifts.clone()
        }
    }

    /// The unique element of an abelian non-central `H` above `v ∈ S_H`.
    pub(crate) fn lift_of(&self, v: &[u32]) -> Option<GroupElement> {
        let coeffs = self.s_h.coordinates(v)?;
        let pr = &self.params;
        let mut acc = pr.identity();
        for (l, &c) in self.lifts.iter().zip(&coeffs) {
            if c != 0 {
                acc = pr.mul(&acc, &pr.power(l, c as i64));
            }
        }
        Some(acc)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        if self.params.check(g).is_err() {
            return false;
        }
        let v = g.xy();
        if self.contains_center() {
            return self.s_h.contains(&v);
        }
        match self.lift_of(&v) {
            Some(l) => l.z == g.z,
            None => false,
        }
    }

    /// All elements; refuses subgroups above [`ENUMERATION_CAP`].
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        if self.order() > ENUMERATION_CAP {
            return Err(HspError::TooLarge { dim: self.order(), cap: ENUMERATION_CAP });
        }
        let pr = &self.params;
        if self.contains_center() {
            let mut out = Vec::with_capacity(self.order() as usize);
            for v in self.s_h.elements() {
                for z in 0..pr.p() {
                    out.push(pr.from_xy(&v, z));
                }
            }
            Ok(out)
        } else {
            Ok(self.s_h.elements().map(|v| self.lift_of(&v).expect("v in S_H")).collect())
        }
    }

    /// `g^{-1} H g`.
    pub fn conjugate_by(&self, g: &GroupElement) -> Subgroup {
        let gens = self.generators.iter().map(|h| self.params.conj(h, g)).collect();
        Subgroup::new(self.params, gens).expect("conjugation preserves parameters")
    }

    pub fn apply_phi_alpha(&self, aut: GroupAutomorphism) -> Subgroup {
        let gens = self.generators.iter().map(|h| self.params.apply_phi_alpha(aut, h)).collect();
        Subgroup::new(self.params, gens).expect("automorphism preserves parameters")
    }

    /// A `g = (x̂, ŷ, 0)` with `g^{-1} H g = H_0`. Only for abelian non-central
    /// `H` and odd `p`. Solves `x̂·y − x·ŷ = x·y/2 − z` over the lifts.
    pub fn conjugator(&self) -> Result<Conjugator> {
        if self.params.p() == 2 {
            return Err(HspError::EvenCharacteristic);
        }
        if self.contains_center() {
            return Err(HspError::NotIsotropic);
        }
        let n = self.params.n();
        let f = self.params.field();
        if self.lifts.is_empty() {
            return Ok(Conjugator::zero(n));
        }
        let rows: Vec<VecZp> = self
            .lifts
            .iter()
            .map(|l| {
                let mut r = l.y.clone();
                r.extend(f.neg_vec(&l.x));
                r
            })
            .collect();
        let rhs: Vec<u32> = self
            .lifts
            .iter()
            .map(|l| f.sub(f.div(f.dot(&l.x, &l.y), 2), l.z))
            .collect();
        let m = MatZp::from_rows(f, 2 * n, &rows);
        let sol = m.solve(&rhs).expect("isotropic lifts give a consistent system");
        let perp = self.s_h.complement(self.params.symplectic());
        Ok(Conjugator::from_xy(&sol).reduced(&perp))
    }

    /// Subgroup literal `p,n;gen=x|y|z;gen=...`.
    pub fn to_literal(&self) -> String {
        let mut s = format!("{},{}", self.params.p(), self.params.n());
        for g in &self.generators {
            s.push_str(";gen=");
            s.push_str(&g.to_string());
        }
        s
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.class == other.class
            && self.canonical_generators() == other.canonical_generators()
    }
}

impl Eq for Subgroup {}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

fn parse_vec(s: &str, n: usize) -> Result<VecZp> {
    if n == 0 && s.is_empty() {
        return Ok(Vec::new());
    }
    let v: std::result::Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
    let v = v.map_err(|e| HspError::Parse(format!("bad vector `{s}`: {e}")))?;
    if v.len() != n {
        return Err(HspError::Parse(format!("vector `{s}` has length {}, expected {n}", v.len())));
    }
    Ok(v)
}

impl FromStr for Subgroup {
    type Err = HspError;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(';');
        let head = parts.next().unwrap_or_default();
        let (p, n) = head
            .split_once(',')
            .ok_or_else(|| HspError::Parse(format!("missing `p,n` header in `{s}`")))?;
        let p: u32 = p.trim().parse().map_err(|_| HspError::Parse(format!("bad p `{p}`")))?;
        let n: usize = n.trim().parse().map_err(|_| HspError::Parse(format!("bad n `{n}`")))?;
        let params = GroupParams::new(p, n)?;
        let mut gens = Vec::new();
        for part in parts {
            let body = part
                .strip_prefix("gen=")
                .ok_or_else(|| HspError::Parse(format!("expected `gen=` in `{part}`")))?;
            let fields: Vec<&str> = body.split('|').collect();
            if fields.len() != 3 {
                return Err(HspError::Parse(format!("generator `{body}` needs x|y|z")));
            }
            let x = parse_vec(fields[0], n)?;
            let y = parse_vec(fields[1], n)?;
            let z: u32 = fields[2].trim().parse().map_err(|_| HspError::Parse(format!("bad z `{}`", fields[2])))?;
            if x.iter().chain(&y).any(|&e| e >= p) || z >= p {
                return Err(HspError::Parse(format!("generator `{body}` has entries outside [0,{p})")));
            }
            gens.push(GroupElement { x, y, z });
        }
        Subgroup::new(params, gens)
    }
}

/// Gaussian elimination on generators carried out with group operations.
///
/// Returns the echelon `S_H`, a lift in `H` of each echelon row, and whether
/// the elimination produced a nonzero central element.
fn eliminate(params: &GroupParams, gens: &[GroupElement]) -> (SubspaceBasis, Vec<GroupElement>, bool) {
    let f = params.field();
    let dim = 2 * params.n();
    let mut rows: Vec<GroupElement> = gens.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let coord = |g: &GroupElement| if c < params.n() { g.x[c] } else { g.y[c - params.n()] };
        let Some(piv) = (r..rows.len()).find(|&i| coord(&rows[i]) != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = f.inv(coord(&rows[r])).expect("nonzero pivot");
        rows[r] = params.power(&rows[r], inv as i64);
        for i in 0..rows.len() {
            if i == r {
                continue;
            }
            let e = coord(&rows[i]);
            if e != 0 {
                let step = params.power(&rows[r], (params.p() - e) as i64);
                rows[i] = params.mul(&rows[i], &step);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let central = rows[r..].iter().any(|g| g.z != 0);
    let lifts: Vec<GroupElement> = rows[..r].to_vec();
    let s = SubspaceBasis::span(f, dim, &lifts.iter().map(|g| g.xy()).collect::<Vec<_>>());
    debug_assert_eq!(s.pivots(), pivots.as_slice());
    (s, lifts, central)
}

/// `H_0 = {(x, y, x·y/2) : (x, y) ∈ S}`.
pub fn canonical_h0(s: &SubspaceBasis, params: GroupParams) -> Result<Subgroup> {
    if params.p() == 2 {
        return Err(HspError::EvenCharacteristic);
    }
    if s.ambient() != 2 * params.n() || s.field() != params.field() {
        return Err(HspError::ParamsMismatch);
    }
    if !s.is_isotropic(params.n()) {
        return Err(HspError::NotIsotropic);
    }
    let f = params.field();
    let gens = s
        .rows()
        .iter()
        .map(|r| {
            let (x, y) = r.split_at(params.n());
            params.from_xy(r, f.div(f.dot(x, y), 2))
        })
        .collect();
    Subgroup::new(params, gens)
}

/// Plants a random subgroup of the requested class. `dim` pins `dim S_H`.
pub fn random_subgroup<R: Rng + ?Sized>(
    params: GroupParams,
    class: SubgroupClass,
    dim: Option<usize>,
    rng: &mut R,
) -> Subgroup {
    let n = params.n();
    let f = params.field();
    match class {
        SubgroupClass::AbelianNonCentral => {
            let d = dim.unwrap_or_else(|| rng.gen_range(0..=n)).min(n);
            let s = if params.p() == 2 {
                random_totally_singular(f, n, d, rng)
            } else {
                random_isotropic(f, n, d, rng)
            };
            let gens = s.rows().iter().map(|r| params.from_xy(r, rng.gen_range(0..params.p()))).collect();
            Subgroup::new(params, gens).expect("generators built from params")
        }
        SubgroupClass::NormalContainsCenter => {
            let d = dim.unwrap_or_else(|| rng.gen_range(0..=2 * n)).min(2 * n);
            let s = random_subspace(f, 2 * n, d, rng);
            let mut gens: Vec<GroupElement> =
                s.rows().iter().map(|r| params.from_xy(r, rng.gen_range(0..params.p()))).collect();
            gens.push(params.central(1));
            Subgroup::new(params, gens).expect("generators built from params")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashSet};

    fn gp(p: u32, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    fn el(pr: &GroupParams, x: &[u32], y: &[u32], z: u32) -> GroupElement {
        pr.element(x, y, z).unwrap()
    }

    /// Closure of a generating set by breadth-first multiplication.
    fn closure(pr: &GroupParams, gens: &[GroupElement]) -> BTreeSet<GroupElement> {
        let mut seen = BTreeSet::new();
        seen.insert(pr.identity());
        let mut frontier = vec![pr.identity()];
        while let Some(g) = frontier.pop() {
            for h in gens {
                let gh = pr.mul(&g, h);
                if seen.insert(gh.clone()) {
                    frontier.push(gh);
                }
            }
        }
        seen
    }

    #[test]
    fn multiply_example() {
        let pr = gp(3, 1);
        let g = el(&pr, &[1], &[2], 0);
        let h = el(&pr, &[2], &[1], 1);
        assert_eq!(pr.multiply(&g, &h).unwrap(), el(&pr, &[0], &[0], 2));
        assert_eq!(pr.mul(&g, &pr.identity()), g);
    }

    #[test]
    fn multiply_rejects_mismatch() {
        let pr = gp(3, 1);
        let bad = GroupElement { x: vec![0, 0], y: vec![0, 0], z: 0 };
        assert_eq!(pr.multiply(&pr.identity(), &bad), Err(HspError::ParamsMismatch));
        let out_of_range = GroupElement { x: vec![3], y: vec![0], z: 0 };
        assert_eq!(pr.multiply(&pr.identity(), &out_of_range), Err(HspError::ParamsMismatch));
    }

    #[test]
    fn associativity_exhaustive_p3() {
        let pr = gp(3, 1);
        let all: Vec<GroupElement> = pr.elements().collect();
        for a in &all {
            for b in &all {
                let ab = pr.mul(a, b);
                for c in &all {
                    assert_eq!(pr.mul(&ab, c), pr.mul(a, &pr.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let pr = gp(3, 1);
        let g = el(&pr, &[1], &[2], 0);
        let gi = pr.inverse(&g);
        assert_eq!(gi, el(&pr, &[2], &[1], 2));
        assert_eq!(pr.mul(&g, &gi), pr.identity());
        assert_eq!(pr.inverse(&pr.identity()), pr.identity());
        for g in pr.elements() {
            assert_eq!(pr.inverse(&pr.inverse(&g)), g);
            assert_eq!(pr.mul(&pr.inverse(&g), &g), pr.identity());
        }
    }

    #[test]
    fn power_examples() {
        let pr = gp(3, 1);
        assert_eq!(pr.power(&el(&pr, &[1], &[1], 0), 2), el(&pr, &[2], &[2], 1));
        assert_eq!(pr.power(&el(&pr, &[1], &[1], 0), 0), pr.identity());
        let pr5 = gp(5, 1);
        for g in pr5.elements() {
            assert_eq!(pr5.power(&g, 5), pr5.identity());
        }
    }

    #[test]
    fn power_matches_iteration() {
        for &(p, n) in &[(2u32, 1usize), (2, 2), (3, 1), (5, 1)] {
            let pr = gp(p, n);
            for g in pr.elements() {
                let mut acc = pr.identity();
                for a in 0..(2 * p as i64) {
                    assert_eq!(pr.power(&g, a), acc, "p={p} g={g} a={a}");
                    acc = pr.mul(&acc, &g);
                }
                assert_eq!(pr.mul(&pr.power(&g, -1), &g), pr.identity());
            }
        }
        let pr = gp(2, 1);
        let g = el(&pr, &[1], &[1], 0);
        assert_eq!(pr.power(&g, 2), el(&pr, &[0], &[0], 1));
    }

    #[test]
    fn conjugate_examples() {
        let pr = gp(3, 1);
        let h = el(&pr, &[1], &[0], 0);
        let g = el(&pr, &[0], &[1], 0);
        assert_eq!(pr.conjugate(&h, &g).unwrap(), el(&pr, &[1], &[0], 2));
        assert_eq!(pr.conjugate(&h, &pr.central(2)).unwrap(), h);
    }

    #[test]
    fn conjugate_matches_composition() {
        let pr = gp(5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let h = pr.random_element(&mut rng);
            let g = pr.random_element(&mut rng);
            let direct = pr.mul(&pr.mul(&pr.inverse(&g), &h), &g);
            assert_eq!(pr.conj(&h, &g), direct);
        }
    }

    #[test]
    fn matrix_realization_is_faithful() {
        let pr = gp(3, 1);
        assert_eq!(pr.matrix_realization(&pr.identity()), MatZp::identity(pr.field(), 3));
        let c = pr.matrix_realization(&pr.central(1));
        let mut expect = MatZp::identity(pr.field(), 3);
        expect.set(0, 2, 1);
        assert_eq!(c, expect);
        let all: Vec<GroupElement> = pr.elements().collect();
        for a in &all {
            for b in &all {
                let lhs = pr.matrix_realization(a).mul_mat(&pr.matrix_realization(b));
                assert_eq!(lhs, pr.matrix_realization(&pr.mul(a, b)));
            }
        }
        let pr2 = gp(5, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let a = pr2.random_element(&mut rng);
            let b = pr2.random_element(&mut rng);
            let lhs = pr2.matrix_realization(&a).mul_mat(&pr2.matrix_realization(&b));
            assert_eq!(lhs, pr2.matrix_realization(&pr2.mul(&a, &b)));
        }
    }

    #[test]
    fn s_basis_examples() {
        let pr = gp(3, 1);
        let h = Subgroup::new(pr, vec![el(&pr, &[1], &[1], 2)]).unwrap();
        assert_eq!(h.s_basis().rows(), &[vec![1, 1]]);
        assert_eq!(Subgroup::trivial(pr).s_basis().dim(), 0);
    }

    #[test]
    fn classify_examples() {
        let pr = gp(3, 1);
        assert_eq!(Subgroup::center(pr).class(), SubgroupClass::NormalContainsCenter);
        let h = Subgroup::new(pr, vec![el(&pr, &[1], &[1], 2)]).unwrap();
        assert_eq!(h.class(), SubgroupClass::AbelianNonCentral);
        let k = Subgroup::new(pr, vec![el(&pr, &[1], &[0], 0), el(&pr, &[0], &[1], 0)]).unwrap();
        assert_eq!(k.class(), SubgroupClass::NormalContainsCenter);
        assert!(closure(&pr, k.generators()).contains(&pr.central(1)));
        // Redundant generators whose relation leaves a central residue.
        let r = Subgroup::new(pr, vec![el(&pr, &[1], &[0], 0), el(&pr, &[2], &[0], 1)]).unwrap();
        assert_eq!(r.class(), SubgroupClass::NormalContainsCenter);
        // Over Z_2 a square can be central.
        let pr2 = gp(2, 1);
        let sq = Subgroup::new(pr2, vec![el(&pr2, &[1], &[1], 0)]).unwrap();
        assert_eq!(sq.class(), SubgroupClass::NormalContainsCenter);
        assert_eq!(sq.order(), 4);
    }

    #[test]
    fn order_and_membership_match_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &(p, n) in &[(2u32, 1usize), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let pr = gp(p, n);
            for _ in 0..40 {
                let m = rng.gen_range(0..4);
                let gens: Vec<GroupElement> = (0..m).map(|_| pr.random_element(&mut rng)).collect();
                let h = Subgroup::new(pr, gens.clone()).unwrap();
                let brute = closure(&pr, &gens);
                assert_eq!(h.order(), brute.len() as u64, "{h}");
                assert_eq!(h.contains_center(), brute.contains(&pr.central(1)));
                let listed: BTreeSet<GroupElement> = h.elements().unwrap().into_iter().collect();
                assert_eq!(listed, brute);
                for g in pr.elements() {
                    assert_eq!(h.contains(&g), brute.contains(&g));
                }
            }
        }
    }

    #[test]
    fn conjugation_preserves_s_h() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pr = gp(5, 2);
        for class in [SubgroupClass::AbelianNonCentral, SubgroupClass::NormalContainsCenter] {
            for _ in 0..30 {
                let h = random_subgroup(pr, class, None, &mut rng);
                let g = pr.random_element(&mut rng);
                assert_eq!(h.conjugate_by(&g).s_basis(), h.s_basis());
            }
        }
    }

    #[test]
    fn conjugacy_orbit_size() {
        let pr = gp(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let orbit: HashSet<Vec<GroupElement>> =
                pr.elements().map(|g| h.conjugate_by(&g).canonical_generators()).collect();
            assert_eq!(orbit.len() as u64, h.s_basis().cardinality());
        }
    }

    #[test]
    fn h0_examples() {
        let pr = gp(3, 1);
        let s = SubspaceBasis::span(pr.field(), 2, &[vec![1, 1]]);
        let h0 = canonical_h0(&s, pr).unwrap();
        assert_eq!(h0.generators(), &[el(&pr, &[1], &[1], 2)]);
        assert_eq!(canonical_h0(&SubspaceBasis::empty(pr.field(), 2), pr).unwrap(), Subgroup::trivial(pr));
        let pr2 = gp(2, 1);
        assert_eq!(
            canonical_h0(&SubspaceBasis::empty(pr2.field(), 2), pr2).unwrap_err(),
            HspError::EvenCharacteristic
        );
        let full = SubspaceBasis::full(pr.field(), 2);
        assert_eq!(canonical_h0(&full, pr).unwrap_err(), HspError::NotIsotropic);
    }

    #[test]
    fn h0_closed_at_p5() {
        let pr = gp(5, 1);
        for v in [vec![1u32, 0], vec![1, 3], vec![0, 1]] {
            let s = SubspaceBasis::span(pr.field(), 2, &[v]);
            let h0 = canonical_h0(&s, pr).unwrap();
            let f = pr.field();
            let elems = h0.elements().unwrap();
            for a in &elems {
                assert_eq!(a.z, f.div(f.dot(&a.x, &a.y), 2));
                for b in &elems {
                    assert!(h0.contains(&pr.mul(a, b)));
                }
            }
            assert_eq!(h0.s_basis(), &s);
        }
    }

    #[test]
    fn h0_is_conjugate_by_search() {
        let pr = gp(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let h0 = canonical_h0(h.s_basis(), pr).unwrap();
            let found = pr.elements().filter(|g| g.z == 0).any(|g| h.conjugate_by(&g) == h0);
            assert!(found);
            let c = h.conjugator().unwrap();
            assert_eq!(h.conjugate_by(&c.element()), h0);
        }
    }

    #[test]
    fn phi_alpha_examples() {
        let pr = gp(5, 1);
        let a2 = GroupAutomorphism::new(pr.field(), 2).unwrap();
        assert_eq!(pr.apply_phi_alpha(a2, &el(&pr, &[1], &[1], 1)), el(&pr, &[2], &[2], 4));
        let a1 = GroupAutomorphism::new(pr.field(), 1).unwrap();
        for g in pr.elements() {
            assert_eq!(pr.apply_phi_alpha(a1, &g), g);
        }
        assert_eq!(GroupAutomorphism::new(pr.field(), 5), Err(HspError::ZeroAlpha));
    }

    #[test]
    fn phi_alpha_homomorphism() {
        let pr = gp(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let aut = GroupAutomorphism::new(pr.field(), rng.gen_range(1..5)).unwrap();
            let g = pr.random_element(&mut rng);
            let h = pr.random_element(&mut rng);
            let lhs = pr.apply_phi_alpha(aut, &pr.mul(&g, &h));
            let rhs = pr.mul(&pr.apply_phi_alpha(aut, &g), &pr.apply_phi_alpha(aut, &h));
            assert_eq!(lhs, rhs);
        }
        let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, Some(1), &mut rng);
        let aut = GroupAutomorphism::new(pr.field(), 3).unwrap();
        assert_eq!(h.apply_phi_alpha(aut).s_basis(), h.s_basis());
    }

    #[test]
    fn random_subgroup_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let pr = gp(3, 1);
        assert_eq!(
            random_subgroup(pr, SubgroupClass::AbelianNonCentral, Some(0), &mut rng),
            Subgroup::trivial(pr)
        );
        for &(p, n) in &[(2u32, 1usize), (2, 3), (3, 2), (5, 1)] {
            let pr = gp(p, n);
            for _ in 0..50 {
                let a = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
                assert_eq!(a.class(), SubgroupClass::AbelianNonCentral);
                assert!(!a.contains(&pr.central(1)));
                assert_eq!(a.order(), a.s_basis().cardinality());
                let b = random_subgroup(pr, SubgroupClass::NormalContainsCenter, None, &mut rng);
                assert!(b.contains(&pr.central(1)));
            }
        }
    }

    #[test]
    fn literal_roundtrip() {
        let lit = "3,2;gen=1,0|0,2|1;gen=0,1|2,0|0";
        let h: Subgroup = lit.parse().unwrap();
        assert_eq!(h.to_literal(), lit);
        let t: Subgroup = "5,1".parse().unwrap();
        assert_eq!(t, Subgroup::trivial(gp(5, 1)));
        assert!("3,1;gen=1|1".parse::<Subgroup>().is_err());
        assert!("3,1;gen=3|0|0".parse::<Subgroup>().is_err());
        assert!("4,1".parse::<Subgroup>().is_err());
    }

    #[test]
    fn index_roundtrip() {
        let pr = gp(3, 2);
        for i in 0..pr.order() as usize {
            assert_eq!(pr.index_of(&pr.element_at(i)), i);
        }
    }

    fn arb_element(p: u32, n: usize) -> impl Strategy<Value = GroupElement> {
        (
            proptest::collection::vec(0..p, n),
            proptest::collection::vec(0..p, n),
            0..p,
        )
            .prop_map(|(x, y, z)| GroupElement { x, y, z })
    }

    proptest! {
        #[test]
        fn prop_associative(a in arb_element(7, 3), b in arb_element(7, 3), c in arb_element(7, 3)) {
            let pr = gp(7, 3);
            prop_assert_eq!(pr.mul(&pr.mul(&a, &b), &c), pr.mul(&a, &pr.mul(&b, &c)));
        }

        #[test]
        fn prop_exponent_p(g in arb_element(7, 2)) {
            let pr = gp(7, 2);
            prop_assert_eq!(pr.power(&g, 7), pr.identity());
        }

        #[test]
        fn prop_literal_roundtrip(gens in proptest::collection::vec(arb_element(5, 2), 0..4)) {
            let pr = gp(5, 2);
            let h = Subgroup::new(pr, gens).unwrap();
            let back: Subgroup = h.to_literal().parse().unwrap();
            prop_assert_eq!(back.to_literal(), h.to_literal());
            prop_assert_eq!(back, h);
        }
    }
}
