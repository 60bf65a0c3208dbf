//! Batch experiments and the invariant verification suite behind `hsp-sim`.
//!
//! Settings come from `key=value` maps so that config files and command-line
//! flags merge by plain insertion. Results are one JSON document (`schema: 1`)
//! plus optional CSV histograms.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HspError, Result};
use crate::group::{canonical_h0, random_subgroup, GroupParams, Subgroup, SubgroupClass};
use crate::oracle::HiddenFunction;
use crate::qft_circuit::build_circuit;
use crate::recovery::{run_full, RecoveryConfig, RecoveryStats};
use crate::reps::{chi, max_deviation, plancherel, qft_dense, rho, ComplexMatrix, DENSE_MATRIX_CAP};
use crate::simulator::{
    choose_alpha, dense, exact_outcome_distribution, verify_label_change_theorem, Backend, DiscardReason,
    SumZeroPolicy, RESOLVED_CONVENTION,
};
use crate::simulator::structured::multi_from_index;
use crate::zp::Fp;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `|G|` for which the suite builds dense `|G| × |G|` matrices.
pub const VERIFY_DENSE_CAP: u64 = 729;

/// Deviation above which a numerical check fails.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseFilter {
    Abelian,
    Normal,
    Any,
}

impl std::str::FromStr for CaseFilter {
    type Err = HspError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abelian" => Ok(CaseFilter::Abelian),
            "normal" => Ok(CaseFilter::Normal),
            "any" | "all" => Ok(CaseFilter::Any),
            other => Err(HspError::ConfigInvalid(format!("unknown case `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub p: u32,
    pub n: usize,
    pub case: CaseFilter,
    pub trials: usize,
    pub seed: u64,
    pub backend: Backend,
    pub policy: SumZeroPolicy,
    /// Pins `dim S_H` of random plants.
    pub dim: Option<usize>,
    /// Pins the planted subgroup for every trial.
    pub subgroup: Option<Subgroup>,
    pub out: Option<PathBuf>,
    /// Success rate at or above which a run passes.
    pub min_success: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            p: 3,
            n: 1,
            case: CaseFilter::Any,
            trials: 100,
            seed: 0,
            backend: Backend::Analytic,
            policy: SumZeroPolicy::NegateFirst,
            dim: None,
            subgroup: None,
            out: None,
            min_success: 0.95,
        }
    }
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HspError::ConfigInvalid(format!("line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| HspError::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| HspError::ConfigInvalid(format!("bad value `{v}` for {key}")))
}

fn config_err(e: HspError) -> HspError {
    match e {
        HspError::ConfigInvalid(_) | HspError::BackendCapExceeded(_) => e,
        other => HspError::ConfigInvalid(other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut literal = None;
        for (k, v) in map {
            match k.as_str() {
                "p" => c.p = parse_num(k, v)?,
                "n" => c.n = parse_num(k, v)?,
                "case" => c.case = v.parse()?,
                "trials" => c.trials = parse_num(k, v)?,
                "seed" => c.seed = parse_num(k, v)?,
                "backend" => c.backend = v.parse().map_err(config_err)?,
                "policy" => c.policy = v.parse().map_err(config_err)?,
                "dim" => c.dim = Some(parse_num(k, v)?),
                "subgroup" => literal = Some(v.clone()),
                "out" => c.out = Some(PathBuf::from(v)),
                "min_success" => c.min_success = parse_num(k, v)?,
                other => return Err(HspError::ConfigInvalid(format!("unknown key `{other}`"))),
            }
        }
        if let Some(lit) = literal {
            c.subgroup = Some(lit.parse().map_err(config_err)?);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn params(&self) -> Result<GroupParams> {
        GroupParams::new(self.p, self.n).map_err(config_err)
    }

    pub fn validate(&self) -> Result<()> {
        let pr = self.params()?;
        if self.backend == Backend::Dense {
            dense::check_caps(&pr)?;
        }
        if let Some(h) = &self.subgroup {
            if h.params() != pr {
                return Err(HspError::ConfigInvalid(format!(
                    "subgroup literal is over p={}, n={}",
                    h.params().p(),
                    h.params().n()
                )));
            }
            let clash = matches!(
                (self.case, h.class()),
                (CaseFilter::Abelian, SubgroupClass::NormalContainsCenter)
                    | (CaseFilter::Normal, SubgroupClass::AbelianNonCentral)
            );
            if clash {
                return Err(HspError::ConfigInvalid("subgroup literal contradicts the case filter".into()));
            }
        }
        if let Some(d) = self.dim {
            let max = match self.case {
                CaseFilter::Normal => 2 * self.n,
                _ => self.n,
            };
            if d > max {
                return Err(HspError::ConfigInvalid(format!("dim {d} exceeds {max}")));
            }
        }
        if !(0.0..=1.0).contains(&self.min_success) {
            return Err(HspError::ConfigInvalid("min_success must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// RNG of trial `i`: the master seed on stream `i`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscardCounts {
    pub one_dim: f64,
    pub sum_zero: f64,
    pub non_square: f64,
}

impl DiscardCounts {
    fn from_stats(s: &RecoveryStats) -> Self {
        let get = |r| s.discards.get(&r).copied().unwrap_or(0) as f64;
        DiscardCounts {
            one_dim: get(DiscardReason::OneDim),
            sum_zero: get(DiscardReason::SumZero),
            non_square: get(DiscardReason::NonSquare),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub case: SubgroupClass,
    pub planted: String,
    pub recovered: Option<String>,
    pub success: bool,
    pub rounds: u64,
    pub accepted_rounds: u64,
    pub discards: DiscardCounts,
    pub single_samples: u64,
    pub verification_queries: u64,
    pub queries: u64,
    pub attempts: u32,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub p: u32,
    pub n: usize,
    pub case: CaseFilter,
    pub trials: usize,
    pub successes: usize,
    /// Two-register rounds per trial, discarded ones included.
    pub mean_rounds: f64,
    pub mean_accepted_rounds: f64,
    pub mean_discards_by_reason: DiscardCounts,
    pub mean_queries: f64,
    pub seed: u64,
    pub backend: Backend,
    pub policy: SumZeroPolicy,
    pub convention_id: String,
    pub per_trial: Vec<TrialRecord>,
    #[serde(skip)]
    pub labels: BTreeMap<String, u64>,
}

impl ExperimentReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// `accepted_rounds,trials` rows.
    pub fn rounds_csv(&self) -> String {
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        for t in &self.per_trial {
            *hist.entry(t.accepted_rounds).or_default() += 1;
        }
        let mut s = String::from("accepted_rounds,trials\n");
        for (r, c) in hist {
            s += &format!("{r},{c}\n");
        }
        s
    }

    /// `label,count` rows over all sampled irrep labels.
    pub fn labels_csv(&self) -> String {
        let mut s = String::from("label,count\n");
        for (l, c) in &self.labels {
            s += &format!("{l},{c}\n");
        }
        s
    }

    /// Writes the JSON document and its `.rounds.csv` and `.labels.csv` siblings.
    pub fn write(&self, out: &Path) -> Result<()> {
        let io = |e: std::io::Error| HspError::ConfigInvalid(format!("cannot write {}: {e}", out.display()));
        fs::write(out, self.to_json()).map_err(io)?;
        fs::write(out.with_extension("rounds.csv"), self.rounds_csv()).map_err(io)?;
        fs::write(out.with_extension("labels.csv"), self.labels_csv()).map_err(io)?;
        Ok(())
    }
}

fn plant<R: Rng + ?Sized>(config: &ExperimentConfig, pr: GroupParams, rng: &mut R) -> Subgroup {
    if let Some(h) = &config.subgroup {
        return h.clone();
    }
    let class = match config.case {
        CaseFilter::Abelian => SubgroupClass::AbelianNonCentral,
        CaseFilter::Normal => SubgroupClass::NormalContainsCenter,
        CaseFilter::Any => {
            if rng.gen_bool(0.5) {
                SubgroupClass::AbelianNonCentral
            } else {
                SubgroupClass::NormalContainsCenter
            }
        }
    };
    random_subgroup(pr, class, config.dim, rng)
}

fn run_trial(config: &ExperimentConfig, pr: GroupParams, trial: u64) -> (TrialRecord, BTreeMap<String, u64>) {
    let mut rng = trial_rng(config.seed, trial);
    let h = plant(config, pr, &mut rng);
    let f = HiddenFunction::new(h.clone());
    let rc = RecoveryConfig { backend: config.backend, policy: config.policy };
    let planted = h.to_literal();
    match run_full(&f, &rc, &mut rng) {
        Ok(r) => {
            let s = &r.stats;
            let record = TrialRecord {
                trial,
                case: h.class(),
                planted,
                recovered: Some(r.subgroup.to_literal()),
                success: r.subgroup == h,
                rounds: s.rounds,
                accepted_rounds: s.accepted_rounds,
                discards: DiscardCounts::from_stats(s),
                single_samples: s.single_samples,
                verification_queries: s.verification_queries,
                queries: s.queries,
                attempts: s.attempts,
                error: None,
            };
            (record, r.stats.labels)
        }
        Err(e) => {
            let record = TrialRecord {
                trial,
                case: h.class(),
                planted,
                recovered: None,
                success: false,
                rounds: 0,
                accepted_rounds: 0,
                discards: DiscardCounts::default(),
                single_samples: 0,
                verification_queries: 0,
                queries: f.query_count(),
                attempts: 0,
                error: Some(e.to_string()),
            };
            (record, BTreeMap::new())
        }
    }
}

/// Runs `trials` independent recoveries in parallel, merged in trial order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pr = config.params()?;
    let results: Vec<(TrialRecord, BTreeMap<String, u64>)> =
        (0..config.trials as u64).into_par_iter().map(|t| run_trial(config, pr, t)).collect();
    let mut labels: BTreeMap<String, u64> = BTreeMap::new();
    let mut per_trial = Vec::with_capacity(results.len());
    for (rec, l) in results {
        for (k, c) in l {
            *labels.entry(k).or_default() += c;
        }
        per_trial.push(rec);
    }
    let t = per_trial.len().max(1) as f64;
    let mean = |g: &dyn Fn(&TrialRecord) -> f64| per_trial.iter().map(g).sum::<f64>() / t;
    let mean_discards_by_reason = DiscardCounts {
        one_dim: mean(&|r| r.discards.one_dim),
        sum_zero: mean(&|r| r.discards.sum_zero),
        non_square: mean(&|r| r.discards.non_square),
    };
    Ok(ExperimentReport {
        schema: SCHEMA_VERSION,
        p: config.p,
        n: config.n,
        case: config.case,
        trials: config.trials,
        successes: per_trial.iter().filter(|r| r.success).count(),
        mean_rounds: mean(&|r| r.rounds as f64),
        mean_accepted_rounds: mean(&|r| r.accepted_rounds as f64),
        mean_discards_by_reason,
        mean_queries: mean(&|r| r.queries as f64),
        seed: config.seed,
        backend: config.backend,
        policy: config.policy,
        convention_id: RESOLVED_CONVENTION.id().to_string(),
        per_trial,
        labels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub max_deviation: Option<f64>,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8} {:<26}", self.status.to_string(), self.name)?;
        if let Some(d) = self.max_deviation {
            write!(f, " max_dev={d:.3e}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub p: u32,
    pub n: usize,
    pub seed: u64,
    /// Wire permutation applied to the circuit before comparison; a test hook.
    pub permute_wires: Option<Vec<usize>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { p: 3, n: 1, seed: 0, permute_wires: None }
    }
}

impl VerifyConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = VerifyConfig::default();
        for (k, v) in map {
            match k.as_str() {
                "p" => c.p = parse_num(k, v)?,
                "n" => c.n = parse_num(k, v)?,
                "seed" => c.seed = parse_num(k, v)?,
                "permute_wires" => {
                    c.permute_wires = Some(v.split(',').map(|w| parse_num(k, w.trim())).collect::<Result<_>>()?)
                }
                other => return Err(HspError::ConfigInvalid(format!("unknown key `{other}`"))),
            }
        }
        GroupParams::new(c.p, c.n).map_err(config_err)?;
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let fails = self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
        write!(f, "{} checks, {} failed", self.checks.len(), fails)
    }
}

fn numeric(name: &'static str, dev: Result<f64>) -> CheckResult {
    match dev {
        Ok(d) => CheckResult {
            name,
            status: if d <= TOLERANCE { CheckStatus::Pass } else { CheckStatus::Fail },
            max_deviation: Some(d),
            detail: String::new(),
        },
        Err(e) => CheckResult { name, status: CheckStatus::Fail, max_deviation: None, detail: e.to_string() },
    }
}

fn skipped(name: &'static str, why: &str) -> CheckResult {
    CheckResult { name, status: CheckStatus::Skipped, max_deviation: None, detail: why.to_string() }
}

fn group_axioms(pr: &GroupParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut bad = 0u32;
    let exponent = if pr.p() == 2 { 4 } else { pr.p() as i64 };
    for _ in 0..500 {
        let (a, b, c) = (pr.random_element(rng), pr.random_element(rng), pr.random_element(rng));
        bad += (pr.mul(&pr.mul(&a, &b), &c) != pr.mul(&a, &pr.mul(&b, &c))) as u32;
        bad += (pr.mul(&a, &pr.inverse(&a)) != pr.identity()) as u32;
        bad += (pr.mul(&a, &pr.identity()) != a) as u32;
        bad += (pr.power(&a, exponent) != pr.identity()) as u32;
    }
    Ok(bad as f64)
}

fn rep_identities(pr: &GroupParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let n = pr.n();
    for _ in 0..100 {
        let (g, h) = (pr.random_element(rng), pr.random_element(rng));
        let k = rng.gen_range(1..pr.p());
        let lhs = rho(pr, k, &pr.mul(&g, &h))?;
        worst = worst.max(max_deviation(&lhs, &(rho(pr, k, &g)? * rho(pr, k, &h)?)));
        let (a, b) = (pr.field().random_vec(n, rng), pr.field().random_vec(n, rng));
        let c = chi(pr, &a, &b, &pr.mul(&g, &h))? - chi(pr, &a, &b, &g)? * chi(pr, &a, &b, &h)?;
        worst = worst.max(c.norm());
    }
    for class in [SubgroupClass::AbelianNonCentral, SubgroupClass::NormalContainsCenter] {
        let h = random_subgroup(*pr, class, None, rng);
        if plancherel(&h).total() != num_rational::Ratio::from_integer(1) {
            worst = worst.max(1.0);
        }
    }
    Ok(worst)
}

fn unitarity(m: &ComplexMatrix) -> f64 {
    max_deviation(&(m.adjoint() * m), &ComplexMatrix::identity(m.nrows(), m.ncols()))
}

fn circuit_check(pr: &GroupParams, perm: Option<&[usize]>) -> Result<f64> {
    let mut c = build_circuit(pr);
    if let Some(perm) = perm {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..c.wires()).collect::<Vec<_>>() {
            return Err(HspError::ConfigInvalid(format!("permute_wires must permute 0..{}", c.wires())));
        }
        c = c.permute_wires(perm);
    }
    Ok(max_deviation(&c.unitary()?, &qft_dense(pr)?))
}

fn cg_check(pr: &GroupParams) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..pr.p() {
        for l in 1..pr.p() {
            worst = worst.max(dense::cg_block_deviation(pr, k, l)?);
        }
    }
    Ok(worst)
}

fn label_change_check(pr: &GroupParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let h = random_subgroup(*pr, SubgroupClass::AbelianNonCentral, None, rng);
        let k = rng.gen_range(1..pr.p());
        let alpha = rng.gen_range(1..pr.p());
        worst = worst.max(verify_label_change_theorem(pr, k, alpha, &h)?);
    }
    Ok(worst)
}

fn h0_check(pr: &GroupParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut bad = 0u32;
    for _ in 0..50 {
        let h = random_subgroup(*pr, SubgroupClass::AbelianNonCentral, None, rng);
        let c = h.conjugator()?;
        bad += (h.conjugate_by(&c.element()) != canonical_h0(h.s_basis(), *pr)?) as u32;
    }
    Ok(bad as f64)
}

/// Exact outcome law of the structured pipeline against the analytic
/// support law, over random planted subgroups.
fn sampler_check(pr: &GroupParams, rng: &mut ChaCha8Rng) -> Result<f64> {
    let field = pr.field();
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let h = random_subgroup(*pr, SubgroupClass::AbelianNonCentral, None, rng);
        let conj = if pr.p() == 2 { crate::group::Conjugator::zero(pr.n()) } else { h.conjugator()? };
        let perp = RESOLVED_CONVENTION.complement(h.s_basis(), pr.n());
        let uniform = 1.0 / perp.cardinality() as f64;
        let k = rng.gen_range(1..pr.p());
        for l in 1..pr.p() {
            let Ok(alpha) = choose_alpha(field, k, l, SumZeroPolicy::NegateFirst) else { continue };
            let dist = exact_outcome_distribution(&h, k, l, alpha)?;
            for (i, q) in dist.iter().enumerate() {
                let uv = multi_from_index(pr.p(), pr.n(), 2, i);
                let a = if pr.p() == 2 { 1 } else { alpha };
                let expect = if RESOLVED_CONVENTION.contains(h.s_basis(), &conj, a, &uv) { uniform } else { 0.0 };
                let q = *q.numer() as f64 / *q.denom() as f64;
                worst = worst.max((q - expect).abs());
            }
        }
    }
    Ok(worst)
}

/// Runs every invariant check that fits the configured `(p, n)`.
pub fn verify_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    let pr = GroupParams::new(config.p, config.n).map_err(config_err)?;
    Fp::new(config.p).map_err(config_err)?;
    let mut rng = trial_rng(config.seed, 0);
    let odd = pr.p() > 2;
    let dense_ok = pr.order() <= VERIFY_DENSE_CAP;
    let pn2 = pr.pn() * pr.pn();
    let too_big = format!("|G| = {} above the dense cap {VERIFY_DENSE_CAP}", pr.order());
    let mut checks = vec![numeric("group_axioms", group_axioms(&pr, &mut rng))];
    checks.push(if pr.pn() <= DENSE_MATRIX_CAP {
        numeric("rep_identities", rep_identities(&pr, &mut rng))
    } else {
        skipped("rep_identities", "p^n above the dense cap")
    });
    if dense_ok {
        checks.push(numeric("qft_unitarity", qft_dense(&pr).map(|m| unitarity(&m))));
        checks.push(numeric("circuit_vs_dense", circuit_check(&pr, config.permute_wires.as_deref())));
    } else {
        checks.push(skipped("qft_unitarity", &too_big));
        checks.push(skipped("circuit_vs_dense", &too_big));
    }
    checks.push(if pn2 <= 128 {
        numeric("cg_block_structure", cg_check(&pr))
    } else {
        skipped("cg_block_structure", "p^{2n} above 128")
    });
    checks.push(match (odd, pr.pn() <= DENSE_MATRIX_CAP) {
        (false, _) => skipped("label_change_theorem", "needs p > 2"),
        (true, false) => skipped("label_change_theorem", "p^n above the dense cap"),
        (true, true) => numeric("label_change_theorem", label_change_check(&pr, &mut rng)),
    });
    checks.push(if odd {
        numeric("h0_conjugacy", h0_check(&pr, &mut rng))
    } else {
        skipped("h0_conjugacy", "needs p > 2")
    });
    checks.push(if pn2 <= 243 {
        numeric("sampler_cross_validation", sampler_check(&pr, &mut rng))
    } else {
        skipped("sampler_cross_validation", "p^{2n} above 243")
    });
    Ok(VerifyReport { checks })
}
