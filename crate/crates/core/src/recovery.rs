//! Classical post-processing: case detection, the linear algebra on round
//! samples, reconstruction of `H`, and the top-level driver.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HspError, Result};
use crate::group::{canonical_h0, Conjugator, GroupParams, Subgroup, SubgroupClass};
use crate::oracle::{CosetLabel, HiddenFunction};
use crate::reps::IrrepLabel;
use crate::simulator::{
    p2_abelian_sample, p2_embed, weak_fourier_sample, Backend, DiscardReason, RoundOutcome, RoundSample, RoundSampler,
    SumZeroPolicy, RESOLVED_CONVENTION,
};
use crate::zp::{inv_mod, BilinearForm, SubspaceBasis, VecZp};

/// Rounds (or samples) in a row without rank growth before stopping.
pub const STABLE_ROUNDS: usize = 4;

/// Hard cap on accepted rounds: `8n + 32`.
pub fn accepted_cap(n: usize) -> usize {
    8 * n + 32
}

/// Cap on all rounds, discarded ones included.
fn round_cap(n: usize) -> usize {
    64 * accepted_cap(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub backend: Backend,
    pub policy: SumZeroPolicy,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig { backend: Backend::Analytic, policy: SumZeroPolicy::NegateFirst }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryStats {
    /// Two-register rounds, discarded ones included.
    pub rounds: u64,
    pub accepted_rounds: u64,
    pub discards: BTreeMap<DiscardReason, u64>,
    /// Single coset states sampled outside two-register rounds.
    pub single_samples: u64,
    /// Oracle queries spent checking candidates.
    pub verification_queries: u64,
    pub queries: u64,
    pub attempts: u32,
    /// Irrep labels seen, keyed by their display form.
    #[serde(skip)]
    pub labels: BTreeMap<String, u64>,
}

impl RecoveryStats {
    fn record(&mut self, outcome: &RoundOutcome) {
        self.rounds += 1;
        match outcome {
            RoundOutcome::Accepted(s) => {
                self.see(&IrrepLabel::HighDim { k: s.k });
                self.see(&IrrepLabel::HighDim { k: s.l });
            }
            RoundOutcome::DiscardedOneDim(label) => self.see(label),
            _ => {}
        }
        match outcome.discard_reason() {
            None => self.accepted_rounds += 1,
            Some(r) => *self.discards.entry(r).or_default() += 1,
        }
    }

    fn see(&mut self, label: &IrrepLabel) {
        *self.labels.entry(label.to_string()).or_default() += 1;
    }

    fn absorb(&mut self, other: &RecoveryStats) {
        for (l, c) in &other.labels {
            *self.labels.entry(l.clone()).or_default() += c;
        }
        self.rounds += other.rounds;
        self.accepted_rounds += other.accepted_rounds;
        for (r, c) in &other.discards {
            *self.discards.entry(*r).or_default() += c;
        }
        self.single_samples += other.single_samples;
        self.verification_queries += other.verification_queries;
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub subgroup: Subgroup,
    pub s_basis: SubspaceBasis,
    /// Only in the abelian branch for odd `p`.
    pub conjugator: Option<Conjugator>,
    pub class: SubgroupClass,
    pub stats: RecoveryStats,
}

/// Two queries: `f(e)` against `f((0,0,1))`.
pub fn detect_case(f: &HiddenFunction) -> SubgroupClass {
    detect_with_identity(f).0
}

fn detect_with_identity(f: &HiddenFunction) -> (SubgroupClass, CosetLabel) {
    let pr = f.params();
    let e = f.query(&pr.identity());
    let c = f.query(&pr.central(1));
    let class = if e == c { SubgroupClass::NormalContainsCenter } else { SubgroupClass::AbelianNonCentral };
    (class, e)
}

/// Span of `w_i − w_m` with `w_i = (u_i, v_i)/(1 − α_i)`, and `−w_m` reduced
/// modulo that span.
pub fn solve_samples(records: &[RoundSample], params: &GroupParams) -> Result<(SubspaceBasis, Conjugator)> {
    if records.len() < 2 {
        return Err(HspError::InsufficientSamples);
    }
    let f = params.field();
    let ws = records
        .iter()
        .map(|r| {
            let s = inv_mod(f.sub(1, r.alpha), f)?;
            Ok(f.scale_vec(s, &r.uv()))
        })
        .collect::<Result<Vec<VecZp>>>()?;
    let last = ws.last().expect("at least two records");
    let diffs: Vec<VecZp> = ws[..ws.len() - 1].iter().map(|w| f.sub_vec(w, last)).collect();
    let perp = SubspaceBasis::span(f, 2 * params.n(), &diffs);
    let conj = Conjugator::from_xy(&f.neg_vec(last)).reduced(&perp);
    Ok((perp, conj))
}

/// `H = g H_0 g^{-1}` for `g = (x̂, ŷ, 0)`, with `S_H` the complement of `s_perp`.
pub fn reconstruct(s_perp: &SubspaceBasis, conj: &Conjugator, params: &GroupParams) -> Result<Subgroup> {
    if params.p() == 2 {
        return Err(HspError::EvenCharacteristic);
    }
    let s_h = RESOLVED_CONVENTION.complement(s_perp, params.n());
    let h0 = canonical_h0(&s_h, *params)?;
    Ok(h0.conjugate_by(&params.inverse(&conj.element())))
}

/// Rank tracker implementing the stop rule.
struct Stabilizer {
    span: SubspaceBasis,
    stale: usize,
}

impl Stabilizer {
    fn new(span: SubspaceBasis) -> Self {
        Stabilizer { span, stale: 0 }
    }

    /// Adds a vector; true once the rule says stop.
    fn push(&mut self, v: &[u32]) -> bool {
        let next = self.span.with_vector(v);
        if next.dim() > self.span.dim() {
            self.span = next;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.stale >= STABLE_ROUNDS
    }
}

fn verify(f: &HiddenFunction, identity: &CosetLabel, h: &Subgroup, stats: &mut RecoveryStats) -> Result<()> {
    for g in h.canonical_generators() {
        stats.verification_queries += 1;
        if f.query(&g) != *identity {
            return Err(HspError::VerificationFailed);
        }
    }
    Ok(())
}

fn abelian_attempt<R: Rng + ?Sized>(
    f: &HiddenFunction,
    config: &RecoveryConfig,
    identity: &CosetLabel,
    rng: &mut R,
    stats: &mut RecoveryStats,
) -> Result<RecoveryResult> {
    let pr = f.params();
    let n = pr.n();
    let field = pr.field();
    let sampler = RoundSampler::new(f, config.backend, config.policy)?;
    let mut records: Vec<RoundSample> = Vec::new();
    let mut stab: Option<(Stabilizer, VecZp)> = None;
    loop {
        if records.len() >= accepted_cap(n) || stats.rounds as usize >= round_cap(n) {
            return Err(HspError::SampleBudgetExceeded(records.len()));
        }
        let outcome = sampler.round(rng)?;
        stats.record(&outcome);
        let RoundOutcome::Accepted(sample) = outcome else { continue };
        let w = field.scale_vec(inv_mod(field.sub(1, sample.alpha), field)?, &sample.uv());
        records.push(sample);
        let done = match &mut stab {
            None => {
                stab = Some((Stabilizer::new(SubspaceBasis::empty(field, 2 * n)), w));
                false
            }
            Some((s, first)) => s.push(&field.sub_vec(&w, first)),
        };
        if done {
            break;
        }
    }
    let (perp, conj) = solve_samples(&records, &pr)?;
    let h = reconstruct(&perp, &conj, &pr).map_err(|e| match e {
        HspError::NotIsotropic => HspError::VerificationFailed,
        other => other,
    })?;
    verify(f, identity, &h, stats)?;
    Ok(RecoveryResult {
        s_basis: h.s_basis().clone(),
        subgroup: h,
        conjugator: Some(conj),
        class: SubgroupClass::AbelianNonCentral,
        stats: RecoveryStats::default(),
    })
}

fn normal_attempt<R: Rng + ?Sized>(
    f: &HiddenFunction,
    config: &RecoveryConfig,
    identity: &CosetLabel,
    rng: &mut R,
    stats: &mut RecoveryStats,
) -> Result<RecoveryResult> {
    let pr = f.params();
    let n = pr.n();
    let field = pr.field();
    let mut stab = Stabilizer::new(SubspaceBasis::empty(field, 2 * n));
    let budget = round_cap(n) as u64;
    loop {
        if stats.single_samples >= budget {
            return Err(HspError::SampleBudgetExceeded(stats.single_samples as usize));
        }
        let (label, _) = weak_fourier_sample(f, config.backend, rng)?;
        stats.single_samples += 1;
        stats.see(&label);
        let IrrepLabel::OneDim { a, b } = label else { continue };
        let mut ab = a;
        ab.extend(b);
        if stab.push(&ab) {
            break;
        }
    }
    let s_h = stab.span.complement(BilinearForm::Euclidean);
    let h = Subgroup::preimage(pr, &s_h);
    verify(f, identity, &h, stats)?;
    Ok(RecoveryResult {
        s_basis: s_h,
        subgroup: h,
        conjugator: None,
        class: SubgroupClass::NormalContainsCenter,
        stats: RecoveryStats::default(),
    })
}

fn p2_attempt<R: Rng + ?Sized>(
    f: &HiddenFunction,
    config: &RecoveryConfig,
    identity: &CosetLabel,
    rng: &mut R,
    stats: &mut RecoveryStats,
) -> Result<RecoveryResult> {
    let pr = f.params();
    let n = pr.n();
    let field = pr.field();
    let sampler = RoundSampler::new(f, config.backend, SumZeroPolicy::NegateFirst)?;
    let mut stab = Stabilizer::new(SubspaceBasis::empty(field, 2 * n));
    let mut accepted = 0;
    loop {
        if accepted >= accepted_cap(n) || stats.rounds as usize >= round_cap(n) {
            return Err(HspError::SampleBudgetExceeded(accepted));
        }
        let outcome = sampler.round(rng)?;
        stats.record(&outcome);
        let RoundOutcome::Accepted(sample) = outcome else { continue };
        accepted += 1;
        if stab.push(&sample.uv()) {
            break;
        }
    }
    let s_h = stab.span.complement(BilinearForm::Symplectic { n });
    // Abelian stage on K = HG′: wait for the character that is −1 on the center.
    let d = s_h.dim();
    let mut lambda = None;
    for _ in 0..64 {
        let chi = p2_abelian_sample(f, &s_h, rng).map_err(|e| match e {
            HspError::NotIsotropic => HspError::VerificationFailed,
            other => other,
        })?;
        stats.single_samples += 1;
        if chi[d] == 1 {
            lambda = Some(chi[..d].to_vec());
            break;
        }
    }
    let lambda = lambda.ok_or(HspError::SampleBudgetExceeded(64))?;
    let gens = s_h
        .rows()
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let mut c = vec![0; d + 1];
            c[j] = 1;
            c[d] = lambda[j];
            let g = p2_embed(&pr, &s_h, &c);
            debug_assert_eq!(g.xy(), *b);
            g
        })
        .collect();
    let h = Subgroup::new(pr, gens)?;
    if h.contains_center() {
        return Err(HspError::VerificationFailed);
    }
    verify(f, identity, &h, stats)?;
    Ok(RecoveryResult {
        s_basis: s_h,
        subgroup: h,
        conjugator: None,
        class: SubgroupClass::AbelianNonCentral,
        stats: RecoveryStats::default(),
    })
}

type Attempt<R> =
    fn(&HiddenFunction, &RecoveryConfig, &CosetLabel, &mut R, &mut RecoveryStats) -> Result<RecoveryResult>;

fn with_retry<R: Rng + ?Sized>(
    f: &HiddenFunction,
    config: &RecoveryConfig,
    identity: &CosetLabel,
    rng: &mut R,
    attempt: Attempt<R>,
    stats: &mut RecoveryStats,
) -> Result<RecoveryResult> {
    let mut last = HspError::VerificationFailed;
    for _ in 0..2 {
        stats.attempts += 1;
        let mut local = RecoveryStats::default();
        let out = attempt(f, config, identity, rng, &mut local);
        stats.absorb(&local);
        match out {
            Ok(r) => return Ok(r),
            Err(HspError::VerificationFailed) => last = HspError::VerificationFailed,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Abelian branch with `p` odd: rounds until the span settles, then solve.
pub fn abelian_recover<R: Rng + ?Sized>(f: &HiddenFunction, config: &RecoveryConfig, rng: &mut R) -> Result<RecoveryResult> {
    run_branch(f, config, rng, abelian_attempt)
}

/// Normal branch: one-dimensional labels span the annihilator of `S_H`.
pub fn normal_recover<R: Rng + ?Sized>(f: &HiddenFunction, config: &RecoveryConfig, rng: &mut R) -> Result<RecoveryResult> {
    run_branch(f, config, rng, normal_attempt)
}

/// `p = 2` branch: `S_H` from rounds, then the abelian stage inside `HG′`.
pub fn p2_recover<R: Rng + ?Sized>(f: &HiddenFunction, config: &RecoveryConfig, rng: &mut R) -> Result<RecoveryResult> {
    run_branch(f, config, rng, p2_attempt)
}

fn run_branch<R: Rng + ?Sized>(
    f: &HiddenFunction,
    config: &RecoveryConfig,
    rng: &mut R,
    attempt: Attempt<R>,
) -> Result<RecoveryResult> {
    let start = f.query_count();
    let identity = f.query(&f.params().identity());
    let mut stats = RecoveryStats::default();
    let mut r = with_retry(f, config, &identity, rng, attempt, &mut stats)?;
    stats.queries = f.query_count() - start;
    r.stats = stats;
    Ok(r)
}

/// Detects the case and dispatches to the matching branch.
///
/// Queries are `2·rounds + single_samples + 2 + verification_queries`.
pub fn run_full<R: Rng + ?Sized>(f: &HiddenFunction, config: &RecoveryConfig, rng: &mut R) -> Result<RecoveryResult> {
    let start = f.query_count();
    let (class, identity) = detect_with_identity(f);
    let attempt: Attempt<R> = match (class, f.params().p()) {
        (SubgroupClass::NormalContainsCenter, _) => normal_attempt,
        (SubgroupClass::AbelianNonCentral, 2) => p2_attempt,
        (SubgroupClass::AbelianNonCentral, _) => abelian_attempt,
    };
    let mut stats = RecoveryStats::default();
    let mut r = with_retry(f, config, &identity, rng, attempt, &mut stats)?;
    stats.queries = f.query_count() - start;
    r.stats = stats;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::random_subgroup;
    use crate::simulator::analytic_round;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gp(p: u32, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    #[test]
    fn detection_examples() {
        let pr = gp(3, 1);
        let f = HiddenFunction::new(Subgroup::center(pr));
        assert_eq!(detect_case(&f), SubgroupClass::NormalContainsCenter);
        assert_eq!(f.query_count(), 2);
        let f = HiddenFunction::new("3,1;gen=1|1|2".parse().unwrap());
        assert_eq!(detect_case(&f), SubgroupClass::AbelianNonCentral);
        let f = HiddenFunction::new(Subgroup::trivial(pr));
        assert_eq!(detect_case(&f), SubgroupClass::AbelianNonCentral);
    }

    #[test]
    fn solve_needs_two_records() {
        let pr = gp(3, 1);
        let r = RoundSample { k: 1, l: 2, alpha: 2, u: vec![0], v: vec![1] };
        assert!(matches!(solve_samples(&[r.clone()], &pr), Err(HspError::InsufficientSamples)));
        let (perp, _) = solve_samples(&[r.clone(), r], &pr).unwrap();
        assert_eq!(perp.dim(), 0);
    }

    #[test]
    fn trivial_subgroup_spans_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pr = gp(3, 1);
        let h = Subgroup::trivial(pr);
        let conj = Conjugator::zero(1);
        let mut full = 0;
        for _ in 0..50 {
            let mut recs = Vec::new();
            while recs.len() < 2 * pr.n() + 4 {
                if let RoundOutcome::Accepted(s) = analytic_round(&h, &conj, SumZeroPolicy::NegateFirst, &mut rng).unwrap() {
                    recs.push(s);
                }
            }
            if solve_samples(&recs, &pr).unwrap().0.dim() == 2 {
                full += 1;
            }
        }
        assert!(full >= 45, "{full}");
    }

    #[test]
    fn planted_conjugator_recovered_mod_perp() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(p, n) in &[(3u32, 1usize), (5, 2), (7, 1)] {
            let pr = gp(p, n);
            for _ in 0..10 {
                let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
                let conj = h.conjugator().unwrap();
                let mut recs = Vec::new();
                while recs.len() < 4 * n + 12 {
                    if let RoundOutcome::Accepted(s) = analytic_round(&h, &conj, SumZeroPolicy::NegateFirst, &mut rng).unwrap() {
                        recs.push(s);
                    }
                }
                let (perp, got) = solve_samples(&recs, &pr).unwrap();
                assert_eq!(perp, h.s_basis().complement(BilinearForm::Symplectic { n }));
                assert_eq!(got, conj.reduced(&perp));
                assert_eq!(reconstruct(&perp, &got, &pr).unwrap(), h);
            }
        }
    }

    #[test]
    fn reconstruct_examples() {
        let pr = gp(3, 1);
        let f = pr.field();
        let s = SubspaceBasis::span(f, 2, &[vec![1, 1]]);
        let perp = s.complement(BilinearForm::Symplectic { n: 1 });
        let h = reconstruct(&perp, &Conjugator::zero(1), &pr).unwrap();
        assert_eq!(h, "3,1;gen=1|1|2".parse().unwrap());
        let full = SubspaceBasis::full(f, 2);
        assert_eq!(reconstruct(&full, &Conjugator::from_xy(&[1, 2]), &pr).unwrap(), Subgroup::trivial(pr));
        let none = SubspaceBasis::empty(f, 2);
        assert!(matches!(reconstruct(&none, &Conjugator::zero(1), &pr), Err(HspError::NotIsotropic)));
    }

    #[test]
    fn complement_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pr = gp(5, 2);
        for _ in 0..20 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let s = h.s_basis();
            let back = RESOLVED_CONVENTION.complement(&RESOLVED_CONVENTION.complement(s, 2), 2);
            assert_eq!(&back, s);
        }
    }

    #[test]
    fn end_to_end_all_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let config = RecoveryConfig::default();
        for &(p, n) in &[(3u32, 1usize), (5, 1), (3, 2), (2, 1), (2, 2), (2, 3)] {
            let pr = gp(p, n);
            for class in [SubgroupClass::AbelianNonCentral, SubgroupClass::NormalContainsCenter] {
                let mut ok = 0;
                for _ in 0..20 {
                    let h = random_subgroup(pr, class, None, &mut rng);
                    let f = HiddenFunction::new(h.clone());
                    let Ok(r) = run_full(&f, &config, &mut rng) else { continue };
                    let s = &r.stats;
                    assert_eq!(s.queries, 2 * s.rounds + s.single_samples + 2 + s.verification_queries);
                    assert_eq!(r.class, class);
                    if r.subgroup == h {
                        ok += 1;
                    }
                }
                assert!(ok >= 18, "p={p} n={n} {class:?}: {ok}");
            }
        }
    }

    #[test]
    fn query_identity_without_retry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pr = gp(5, 2);
        for _ in 0..20 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let f = HiddenFunction::new(h.clone());
            let r = run_full(&f, &RecoveryConfig::default(), &mut rng).unwrap();
            if r.stats.attempts == 1 {
                let gens = r.subgroup.canonical_generators().len() as u64;
                assert_eq!(r.stats.queries, 2 * r.stats.rounds + 2 + gens);
            }
            assert!(r.stats.accepted_rounds as usize <= accepted_cap(2));
        }
    }

    #[test]
    fn normal_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pr = gp(3, 1);
        let config = RecoveryConfig::default();
        let r = run_full(&HiddenFunction::new(Subgroup::whole(pr)), &config, &mut rng).unwrap();
        assert_eq!(r.subgroup, Subgroup::whole(pr));
        assert_eq!(r.s_basis.dim(), 2);
        let r = run_full(&HiddenFunction::new(Subgroup::center(pr)), &config, &mut rng).unwrap();
        assert_eq!(r.subgroup, Subgroup::center(pr));
        assert_eq!(r.s_basis.dim(), 0);
    }

    #[test]
    fn p2_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let config = RecoveryConfig::default();
        for lit in ["2,1", "2,1;gen=1|0|0", "2,1;gen=1|0|1", "2,1;gen=0|1|1"] {
            let h: Subgroup = lit.parse().unwrap();
            let r = p2_recover(&HiddenFunction::new(h.clone()), &config, &mut rng).unwrap();
            assert_eq!(r.subgroup, h, "{lit}");
        }
    }

    #[test]
    fn dense_backend_recovers() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pr = gp(3, 1);
        let config = RecoveryConfig { backend: Backend::Dense, policy: SumZeroPolicy::NegateFirst };
        for _ in 0..5 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let r = run_full(&HiddenFunction::new(h.clone()), &config, &mut rng).unwrap();
            assert_eq!(r.subgroup, h);
        }
    }
}
