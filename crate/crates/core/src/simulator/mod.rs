//! The quantum side of the algorithm: coset states, weak Fourier sampling,
//! the label change `U_α`, Clebsch-Gordan transforms and measurement.
//!
//! Three interchangeable backends produce round outcomes:
//! [`Backend::Structured`] evolves exact symbolic states,
//! [`Backend::Dense`] simulates complex vectors, and [`Backend::Analytic`]
//! samples the closed-form outcome law directly.

pub mod dense;
pub mod structured;

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HspError, Result};
use crate::group::{Conjugator, GroupAutomorphism, GroupParams, Subgroup};
use crate::oracle::HiddenFunction;
use crate::reps::{max_deviation, projector, IrrepLabel, LabelSampler};
use crate::simulator::structured::{multi_from_index, Operator, Space, StructuredState, Term};
use crate::zp::{sqrt_mod, BilinearForm, Fp, MatZp, SubspaceBasis, VecZp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    Structured,
    Analytic,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Structured => "structured",
            Backend::Analytic => "analytic",
        }
    }
}

impl FromStr for Backend {
    type Err = HspError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "structured" => Ok(Backend::Structured),
            "analytic" => Ok(Backend::Analytic),
            other => Err(HspError::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// What to do with a label pair whose sum is zero.
///
/// Then `−k/l = 1` and the roots are `α = ±1`. `α = 1` carries no
/// information about the conjugator, but `α = −1` does, since `1 − α = 2`
/// is invertible for odd `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumZeroPolicy {
    /// Reject the pair.
    Discard,
    /// Keep the pair with `α = −1`.
    #[default]
    NegateFirst,
}

impl FromStr for SumZeroPolicy {
    type Err = HspError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discard" => Ok(SumZeroPolicy::Discard),
            "negate_first" | "negate" => Ok(SumZeroPolicy::NegateFirst),
            other => Err(HspError::Parse(format!("unknown sum-zero policy `{other}`"))),
        }
    }
}

/// Readings of the affine support of an accepted measurement.
///
/// With `t = (u + (1−α)x̂, v + (1−α)ŷ)`, each variant states that `t` (or
/// `t` with its halves swapped) lies in the complement of `S_H` under the
/// named form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportConvention {
    Symplectic,
    SymplecticSwapped,
    Euclidean,
    EuclideanSwapped,
}

/// The convention matching the dense measurement statistics.
pub const RESOLVED_CONVENTION: SupportConvention = SupportConvention::Symplectic;

impl SupportConvention {
    pub const ALL: [SupportConvention; 4] = [
        SupportConvention::Symplectic,
        SupportConvention::SymplecticSwapped,
        SupportConvention::Euclidean,
        SupportConvention::EuclideanSwapped,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SupportConvention::Symplectic => "symplectic",
            SupportConvention::SymplecticSwapped => "symplectic-swapped",
            SupportConvention::Euclidean => "euclidean",
            SupportConvention::EuclideanSwapped => "euclidean-swapped",
        }
    }

    fn form(self, n: usize) -> BilinearForm {
        match self {
            SupportConvention::Symplectic | SupportConvention::SymplecticSwapped => BilinearForm::Symplectic { n },
            SupportConvention::Euclidean | SupportConvention::EuclideanSwapped => BilinearForm::Euclidean,
        }
    }

    fn swapped(self) -> bool {
        matches!(self, SupportConvention::SymplecticSwapped | SupportConvention::EuclideanSwapped)
    }

    /// The linear part of the support, as a subspace of `t` values.
    pub fn complement(self, s_h: &SubspaceBasis, n: usize) -> SubspaceBasis {
        s_h.complement(self.form(n))
    }

    fn offset(field: Fp, conj: &Conjugator, alpha: u32) -> VecZp {
        field.scale_vec(field.sub(1, alpha), &conj.xy())
    }

    fn swap(v: &[u32]) -> VecZp {
        let n = v.len() / 2;
        let mut out = v[n..].to_vec();
        out.extend_from_slice(&v[..n]);
        out
    }

    /// Whether `(u, v)` lies in the predicted affine support.
    pub fn contains(self, s_h: &SubspaceBasis, conj: &Conjugator, alpha: u32, uv: &[u32]) -> bool {
        let field = s_h.field();
        let n = uv.len() / 2;
        let t = field.add_vec(uv, &Self::offset(field, conj, alpha));
        let t = if self.swapped() { Self::swap(&t) } else { t };
        self.complement(s_h, n).contains(&t)
    }

    /// Uniform draw from the predicted affine support.
    pub fn sample<R: Rng + ?Sized>(
        self,
        perp: &SubspaceBasis,
        conj: &Conjugator,
        alpha: u32,
        rng: &mut R,
    ) -> VecZp {
        let field = perp.field();
        let t = perp.random_element(rng);
        let t = if self.swapped() { Self::swap(&t) } else { t };
        field.sub_vec(&t, &Self::offset(field, conj, alpha))
    }
}

/// One accepted two-register round. For `p = 2` the label change is not
/// used and `alpha` is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSample {
    pub k: u32,
    pub l: u32,
    pub alpha: u32,
    pub u: VecZp,
    pub v: VecZp,
}

impl RoundSample {
    pub fn uv(&self) -> VecZp {
        let mut out = self.u.clone();
        out.extend_from_slice(&self.v);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundOutcome {
    Accepted(RoundSample),
    DiscardedOneDim(IrrepLabel),
    DiscardedSumZero,
    DiscardedNonSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    OneDim,
    SumZero,
    NonSquare,
}

impl RoundOutcome {
    pub fn discard_reason(&self) -> Option<DiscardReason> {
        match self {
            RoundOutcome::Accepted(_) => None,
            RoundOutcome::DiscardedOneDim(_) => Some(DiscardReason::OneDim),
            RoundOutcome::DiscardedSumZero => Some(DiscardReason::SumZero),
            RoundOutcome::DiscardedNonSquare => Some(DiscardReason::NonSquare),
        }
    }
}

impl fmt::Display for RoundOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundOutcome::Accepted(s) => write!(f, "accepted k={} l={} alpha={} u={:?} v={:?}", s.k, s.l, s.alpha, s.u, s.v),
            RoundOutcome::DiscardedOneDim(l) => write!(f, "discarded one-dim {l}"),
            RoundOutcome::DiscardedSumZero => f.write_str("discarded k+l=0"),
            RoundOutcome::DiscardedNonSquare => f.write_str("discarded non-square"),
        }
    }
}

/// Label-change decision for a pair of high-dimensional labels.
///
/// `Ok(α)` with `α² = −k/l`, or the discard outcome. For `p = 2` the only
/// label is 1 and `α = 1`.
pub fn choose_alpha(field: Fp, k: u32, l: u32, policy: SumZeroPolicy) -> std::result::Result<u32, RoundOutcome> {
    if field.p() == 2 {
        return Ok(1);
    }
    if field.add(k, l) == 0 {
        return match policy {
            SumZeroPolicy::Discard => Err(RoundOutcome::DiscardedSumZero),
            SumZeroPolicy::NegateFirst => Ok(field.p() - 1),
        };
    }
    let q = field.neg(field.div(k, l));
    sqrt_mod(q, field).ok_or(RoundOutcome::DiscardedNonSquare)
}

/// `|gH⟩⟨gH|` for a uniform `g`, as `|H|²` outer-product terms. One query.
pub fn coset_state<R: Rng + ?Sized>(f: &HiddenFunction, rng: &mut R) -> Result<StructuredState> {
    f.charge();
    let h = f.hidden();
    let pr = h.params();
    let g = pr.random_element(rng);
    let members: Vec<usize> = h.elements()?.iter().map(|e| pr.index_of(&pr.mul(&g, e))).collect();
    let coeff = Ratio::new(1, members.len() as i64);
    let terms = members
        .iter()
        .flat_map(|&i| members.iter().map(move |&j| Term { coeff, phase: 0, op: Operator::Outer { ket: i, bra: j } }))
        .collect();
    Ok(StructuredState::new(Space::Group(pr), terms))
}

/// State left on the column register after weak Fourier sampling.
#[derive(Debug, Clone)]
pub enum Collapsed {
    /// A one-dimensional label leaves nothing to carry forward.
    None,
    /// `ρ_k(H)^*/r_k(H) = ρ_{−k}(H)/r_k(H)`.
    Structured(StructuredState),
    /// One pure trajectory of the same mixed state.
    Dense(Vec<num_complex::Complex64>),
}

/// Weak Fourier sampling of a fresh coset state. One query.
pub fn weak_fourier_sample<R: Rng + ?Sized>(
    f: &HiddenFunction,
    backend: Backend,
    rng: &mut R,
) -> Result<(IrrepLabel, Collapsed)> {
    f.charge();
    let h = f.hidden();
    match backend {
        Backend::Dense => {
            let g = h.params().random_element(rng);
            let (label, v) = dense::weak_fourier_trajectory(h, &g, rng)?;
            Ok((label, v.map(Collapsed::Dense).unwrap_or(Collapsed::None)))
        }
        Backend::Structured | Backend::Analytic => {
            let label = LabelSampler::new(h).sample(rng);
            let state = match (&label, backend) {
                (IrrepLabel::HighDim { k }, Backend::Structured) => {
                    Collapsed::Structured(StructuredState::irrep_state(h.params().p() - k, h)?)
                }
                _ => Collapsed::None,
            };
            Ok((label, state))
        }
    }
}

/// Runs rounds against one hidden function with precomputed data.
pub struct RoundSampler<'a> {
    f: &'a HiddenFunction,
    backend: Backend,
    policy: SumZeroPolicy,
    labels: LabelSampler,
    /// Present when the hidden subgroup is abelian non-central.
    analytic: Option<(SubspaceBasis, Conjugator)>,
}

impl<'a> RoundSampler<'a> {
    pub fn new(f: &'a HiddenFunction, backend: Backend, policy: SumZeroPolicy) -> Result<Self> {
        let h = f.hidden();
        let pr = h.params();
        if backend == Backend::Dense {
            dense::check_caps(&pr)?;
        }
        let analytic = if h.contains_center() {
            None
        } else {
            let perp = RESOLVED_CONVENTION.complement(h.s_basis(), pr.n());
            let conj = if pr.p() == 2 { Conjugator::zero(pr.n()) } else { h.conjugator()? };
            Some((perp, conj))
        };
        Ok(RoundSampler { f, backend, policy, labels: LabelSampler::new(h), analytic })
    }

    pub fn params(&self) -> GroupParams {
        self.f.params()
    }

    /// Steps 1 to 5 on two fresh coset states. Always two queries.
    pub fn round<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RoundOutcome> {
        let pr = self.params();
        let field = pr.field();
        self.f.charge();
        self.f.charge();
        let h = self.f.hidden();
        let (k_label, l_label, vectors) = match self.backend {
            Backend::Dense => {
                let (a, va) = dense::weak_fourier_trajectory(h, &pr.random_element(rng), rng)?;
                let (b, vb) = dense::weak_fourier_trajectory(h, &pr.random_element(rng), rng)?;
                (a, b, va.zip(vb))
            }
            _ => (self.labels.sample(rng), self.labels.sample(rng), None),
        };
        let (k, l) = match (&k_label, &l_label) {
            (IrrepLabel::HighDim { k }, IrrepLabel::HighDim { k: l }) => (*k, *l),
            (IrrepLabel::OneDim { .. }, _) => return Ok(RoundOutcome::DiscardedOneDim(k_label)),
            (_, IrrepLabel::OneDim { .. }) => return Ok(RoundOutcome::DiscardedOneDim(l_label)),
        };
        let alpha = match choose_alpha(field, k, l, self.policy) {
            Ok(a) => a,
            Err(outcome) => return Ok(outcome),
        };
        // After U_α the registers carry labels (l, −l) on the column side.
        let uv = match self.backend {
            Backend::Dense => {
                let (v1, v2) = vectors.expect("high-dimensional trajectories carry vectors");
                let idx = dense::measure_pair(field, pr.n(), &v1, &v2, alpha, l, rng)?;
                multi_from_index(pr.p(), pr.n(), 2, idx)
            }
            Backend::Structured => {
                let state = structured_pair_state(h, k, l, alpha)?;
                multi_from_index(pr.p(), pr.n(), 2, state.measure(rng)?)
            }
            Backend::Analytic => {
                let (perp, conj) = self.analytic.as_ref().expect("high-dimensional labels need abelian H");
                let a = if pr.p() == 2 { 1 } else { alpha };
                RESOLVED_CONVENTION.sample(perp, conj, a, rng)
            }
        };
        let n = pr.n();
        Ok(RoundOutcome::Accepted(RoundSample { k, l, alpha, u: uv[..n].to_vec(), v: uv[n..].to_vec() }))
    }
}

/// `CG (U_α ⊗ I)(ρ_{−k}(H) ⊗ ρ_{−l}(H))(U_α ⊗ I)† CG†`, normalized.
pub fn structured_pair_state(h: &Subgroup, k: u32, l: u32, alpha: u32) -> Result<StructuredState> {
    let field = h.params().field();
    let first = StructuredState::irrep_state(field.neg(k), h)?;
    let second = StructuredState::irrep_state(field.neg(l), h)?;
    let mut st = first.tensor(&second)?;
    if alpha != 1 {
        st = st.apply_u_alpha(alpha)?;
    }
    st.clebsch_gordan(l, field.neg(l))
}

/// Steps 1 to 5 on two fresh coset states; `p > 2`.
pub fn two_register_round<R: Rng + ?Sized>(
    f: &HiddenFunction,
    backend: Backend,
    policy: SumZeroPolicy,
    rng: &mut R,
) -> Result<RoundOutcome> {
    if f.params().p() == 2 {
        return Err(HspError::EvenCharacteristic);
    }
    RoundSampler::new(f, backend, policy)?.round(rng)
}

/// The `p = 2` round: both labels are 1 when high-dimensional.
pub fn p2_round<R: Rng + ?Sized>(f: &HiddenFunction, backend: Backend, rng: &mut R) -> Result<RoundOutcome> {
    if f.params().p() != 2 {
        return Err(HspError::ConfigInvalid("p2_round needs p = 2".into()));
    }
    RoundSampler::new(f, backend, SumZeroPolicy::NegateFirst)?.round(rng)
}

/// Closed-form round from `H` and its conjugator; no oracle involved.
pub fn analytic_round<R: Rng + ?Sized>(
    h: &Subgroup,
    conj: &Conjugator,
    policy: SumZeroPolicy,
    rng: &mut R,
) -> Result<RoundOutcome> {
    let pr = h.params();
    let labels = LabelSampler::new(h);
    let (a, b) = (labels.sample(rng), labels.sample(rng));
    let (k, l) = match (&a, &b) {
        (IrrepLabel::HighDim { k }, IrrepLabel::HighDim { k: l }) => (*k, *l),
        (IrrepLabel::OneDim { .. }, _) => return Ok(RoundOutcome::DiscardedOneDim(a)),
        (_, IrrepLabel::OneDim { .. }) => return Ok(RoundOutcome::DiscardedOneDim(b)),
    };
    let alpha = match choose_alpha(pr.field(), k, l, policy) {
        Ok(a) => a,
        Err(o) => return Ok(o),
    };
    let perp = RESOLVED_CONVENTION.complement(h.s_basis(), pr.n());
    let uv = RESOLVED_CONVENTION.sample(&perp, conj, alpha, rng);
    let n = pr.n();
    Ok(RoundOutcome::Accepted(RoundSample { k, l, alpha, u: uv[..n].to_vec(), v: uv[n..].to_vec() }))
}

/// `max |U_α ρ_k(H) U_α† − ρ_{k/α²}(φ_α(H))|`, densely.
pub fn verify_label_change_theorem(params: &GroupParams, k: u32, alpha: u32, h: &Subgroup) -> Result<f64> {
    let field = params.field();
    let aut = GroupAutomorphism::new(field, alpha)?;
    let k = k % params.p();
    if k == 0 {
        return Err(HspError::ZeroLabel);
    }
    let u = dense::u_alpha_dense(field, params.n(), 1, alpha)?;
    let lhs = &u * projector(&IrrepLabel::HighDim { k }, h)? * u.adjoint();
    let target = field.div(k, field.mul(aut.alpha(), aut.alpha()));
    let rhs = projector(&IrrepLabel::HighDim { k: target }, &h.apply_phi_alpha(aut))?;
    Ok(max_deviation(&lhs, &rhs))
}

/// Exact outcome law of an accepted round, from the structured pipeline.
pub fn exact_outcome_distribution(h: &Subgroup, k: u32, l: u32, alpha: u32) -> Result<Vec<Ratio<i64>>> {
    structured_pair_state(h, k, l, alpha)?.diagonal()
}

/// Coordinates `(c, z) ∈ Z_2^{d+1}` of `K = ⟨(b_j, 0), (0,0,1)⟩` for the rows
/// `b_j` of a totally singular basis. `K` is elementary abelian and the map
/// `(c, z) ↦ Π (b_j, 0)^{c_j} · (0,0,z)` is an isomorphism.
pub fn p2_embed(params: &GroupParams, basis: &SubspaceBasis, coords: &[u32]) -> crate::group::GroupElement {
    let d = basis.dim();
    let mut g = params.central(coords[d] % 2);
    for (j, b) in basis.rows().iter().enumerate() {
        if coords[j] % 2 == 1 {
            g = params.mul(&g, &params.from_xy(b, 0));
        }
    }
    g
}

/// Basis of the character annihilator of `H ∩ K` in `Z_2^{d+1}`.
pub(crate) fn p2_annihilator(h: &Subgroup, basis: &SubspaceBasis) -> Result<SubspaceBasis> {
    let pr = h.params();
    if pr.p() != 2 {
        return Err(HspError::ConfigInvalid("abelian stage needs p = 2".into()));
    }
    let f = pr.field();
    let n = pr.n();
    if basis.rows().iter().any(|b| f.dot(&b[..n], &b[n..]) != 0) {
        return Err(HspError::NotIsotropic);
    }
    let d = basis.dim();
    // c with Σ c_j b_j ∈ S_H: kernel of the map into the quotient by S_H.
    let images: Vec<VecZp> = basis.rows().iter().map(|b| h.s_basis().reduce(b)).collect();
    let mut cols = MatZp::zeros(f, 2 * n, d);
    for (j, img) in images.iter().enumerate() {
        for (i, &e) in img.iter().enumerate() {
            cols.set(i, j, e);
        }
    }
    let inside = crate::zp::kernel_basis(&cols);
    let mut rows: Vec<VecZp> = Vec::new();
    for c in inside.rows() {
        let mut coords = c.clone();
        coords.push(0);
        if !h.contains(&p2_embed(&pr, basis, &coords)) {
            coords[d] = 1;
        }
        rows.push(coords);
    }
    if h.contains_center() {
        let mut z = vec![0; d + 1];
        z[d] = 1;
        rows.push(z);
    }
    let m = MatZp::from_rows(f, d + 1, &rows);
    Ok(crate::zp::kernel_basis(&m))
}

/// Abelian Fourier sampling on `K` restricted to the hiding function: one
/// coset state, one query, a uniform character trivial on `H ∩ K`.
pub fn p2_abelian_sample<R: Rng + ?Sized>(f: &HiddenFunction, basis: &SubspaceBasis, rng: &mut R) -> Result<VecZp> {
    let ann = p2_annihilator(f.hidden(), basis)?;
    f.charge();
    Ok(ann.random_element(rng))
}
