//! Batch verification: seeded cases, per-sample invariant checks, the
//! exhaustive combinatorial scan, and replay of recorded failures.
//!
//! Reports are deterministic: cases are sorted by key and every sample is
//! regenerated from `(dims, mode, seed)`. Only the `millis` fields vary
//! between runs.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::flags;
use crate::linalg;
use crate::par::{self, Exec};
use crate::partition::Partition;
use crate::paths::{self, AdmissiblePath, BPath};
use crate::phi::{self, TildeData};
use crate::quiver::{self, ADHMData, GLVElement, QuiverError, ZeroSide};
use crate::sample::{self, SeededRng};
use crate::weight::{self, CombError, DimData};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot parse suite: {0}")]
    Parse(String),
    #[error("bad case key {0:?}")]
    Key(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenMode {
    General,
    Lagrangian,
    Flag,
    OneSidedA,
    OneSidedB,
}

impl GenMode {
    pub fn name(self) -> &'static str {
        match self {
            GenMode::General => "general",
            GenMode::Lagrangian => "lagrangian",
            GenMode::Flag => "flag",
            GenMode::OneSidedA => "one_sided_a",
            GenMode::OneSidedB => "one_sided_b",
        }
    }

    pub fn parse(s: &str) -> Option<GenMode> {
        [GenMode::General, GenMode::Lagrangian, GenMode::Flag, GenMode::OneSidedA, GenMode::OneSidedB]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

/// Seeded sample for a case; `Ok(None)` when the generator cannot produce
/// data of this shape (an unsatisfiable dimension vector, or a flag case
/// with a negative type).
pub fn sample_data(dims: &DimData, mode: GenMode, seed: u64) -> Result<Option<ADHMData>, QuiverError> {
    let skip = |r: Result<ADHMData, QuiverError>| match r {
        Ok(z) => Ok(Some(z)),
        Err(QuiverError::Unsatisfiable(_)) => Ok(None),
        Err(e) => Err(e),
    };
    match mode {
        GenMode::General => skip(quiver::gen_general(dims, seed, None)),
        GenMode::Lagrangian => skip(quiver::gen_lagrangian(dims, seed)),
        GenMode::OneSidedA => skip(quiver::gen_one_sided(dims, seed, ZeroSide::A)),
        GenMode::OneSidedB => skip(quiver::gen_one_sided(dims, seed, ZeroSide::B)),
        GenMode::Flag => {
            let a = weight::a_of(dims);
            if dims.d.iter().skip(1).any(|&x| x != 0) || a.iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let a: Vec<usize> = a.iter().map(|&x| x as usize).collect();
            let p = flags::gen_flag_pair(&a, seed);
            Ok(Some(flags::data_of_flag(&p).map_err(|e| QuiverError::ShapeMismatch(e.to_string()))?))
        }
    }
}

fn yes() -> bool {
    true
}

/// Which invariants a case checks; all on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    #[serde(default = "yes")]
    pub embedding: bool,
    #[serde(default = "yes")]
    pub roundtrip: bool,
    #[serde(default = "yes")]
    pub stability: bool,
    #[serde(default = "yes")]
    pub equivariance: bool,
    #[serde(default = "yes")]
    pub slice: bool,
    #[serde(default = "yes")]
    pub filtration: bool,
    #[serde(default = "yes")]
    pub paths: bool,
    #[serde(default = "yes")]
    pub flags: bool,
}

impl Default for Invariants {
    fn default() -> Self {
        Invariants {
            embedding: true,
            roundtrip: true,
            stability: true,
            equivariance: true,
            slice: true,
            filtration: true,
            paths: true,
            flags: true,
        }
    }
}

fn twenty() -> usize {
    20
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub dims: DimData,
    pub mode: GenMode,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub invariants: Invariants,
    /// Random group elements per sample for the equivariance check.
    #[serde(default = "twenty")]
    pub group_elements: usize,
    /// Random path pairs per sample for the multiplicativity check.
    #[serde(default = "two")]
    pub path_pairs: usize,
}

impl CaseSpec {
    pub fn new(dims: DimData, mode: GenMode, seeds: Vec<u64>) -> Self {
        CaseSpec { dims, mode, seeds, invariants: Invariants::default(), group_elements: 20, path_pairs: 2 }
    }

    pub fn key(&self) -> String {
        case_key(&self.dims, self.mode)
    }
}

pub fn case_key(dims: &DimData, mode: GenMode) -> String {
    format!("{}:{}", mode.name(), dims.key())
}

/// Inverse of [`case_key`], optionally followed by `#<seed>`.
pub fn parse_key(key: &str) -> Result<(DimData, GenMode, Option<u64>), HarnessError> {
    let bad = || HarnessError::Key(key.to_string());
    let (body, seed) = match key.split_once('#') {
        Some((b, s)) => (b, Some(s.parse::<u64>().map_err(|_| bad())?)),
        None => (key, None),
    };
    let (mode, dims) = body.split_once(':').ok_or_else(bad)?;
    let mode = GenMode::parse(mode).ok_or_else(bad)?;
    let mut n = None;
    let mut d = None;
    let mut v = None;
    let list = |s: &str| s.split(',').filter(|x| !x.is_empty()).map(str::parse::<i64>).collect::<Result<Vec<_>, _>>();
    for part in dims.split(';') {
        match part.split_once('=').ok_or_else(bad)? {
            ("n", x) => n = Some(x.parse::<usize>().map_err(|_| bad())?),
            ("d", x) => d = Some(list(x).map_err(|_| bad())?),
            ("v", x) => v = Some(list(x).map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    let dims = DimData::new(n.ok_or_else(bad)?, d.ok_or_else(bad)?, v.ok_or_else(bad)?).map_err(|_| bad())?;
    Ok((dims, mode, seed))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSpec {
    #[serde(default)]
    pub cases: Vec<CaseSpec>,
    #[serde(default)]
    pub comb: Option<CombBounds>,
}

impl SuiteSpec {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

/// A failed check with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// `case key#seed`, accepted by [`replay`].
    pub replay: String,
    pub invariant: String,
    pub message: String,
    pub data: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub key: String,
    pub samples: usize,
    pub skipped: usize,
    pub stable: usize,
    pub unstable: usize,
    pub checks: BTreeMap<String, Tally>,
    pub failures: Vec<Failure>,
    pub coeff_digest: String,
    pub millis: u64,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub passed: bool,
    pub cases: Vec<CaseReport>,
    pub comb: Option<CombReport>,
}

impl Report {
    pub fn strip_timings(mut self) -> Self {
        for c in &mut self.cases {
            c.millis = 0;
        }
        if let Some(c) = &mut self.comb {
            c.millis = 0;
        }
        self
    }

    /// Sum of every tally with the given name across cases.
    pub fn tally(&self, name: &str) -> Tally {
        self.cases.iter().filter_map(|c| c.checks.get(name)).fold(Tally::default(), |acc, t| Tally {
            passed: acc.passed + t.passed,
            failed: acc.failed + t.failed,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &Failure> {
        self.cases.iter().flat_map(|c| c.failures.iter())
    }
}

/// SHA-256 of the coefficient table for `n`.
pub fn coeff_digest(n: usize) -> String {
    let json = serde_json::to_vec(&phi::coefficient_tables(n)).expect("table serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

type Outcome = Result<(), String>;

fn expect(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Results of one sample: `(invariant, outcome)` pairs and the stability
/// verdict when it could be computed.
pub struct SampleResult {
    pub checks: Vec<(&'static str, Outcome)>,
    pub stable: Option<bool>,
}

fn group_rng(seed: u64) -> SeededRng {
    sample::rng(seed ^ 0x6a09_e667_f3bc_c908)
}

/// Runs the selected invariants on one sample.
pub fn check_sample(z: &ADHMData, spec: &CaseSpec, seed: u64) -> SampleResult {
    let inv = spec.invariants;
    let mut checks: Vec<(&'static str, Outcome)> = Vec::new();
    let stable = quiver::check_stable_criterion(z).ok();
    let t = match phi::phi(z) {
        Ok(t) => t,
        Err(e) => {
            checks.push(("embedding", Err(format!("phi failed: {e}"))));
            return SampleResult { checks, stable };
        }
    };
    if inv.embedding {
        checks.push(("embedding", embedding_checks(z, &t)));
    }
    if inv.roundtrip {
        checks.push(("roundtrip", roundtrip_checks(z, &t)));
    }
    if inv.stability {
        checks.push(("stability", stability_checks(z, &t)));
        checks.push(("stability_agree", stability_agreement(z)));
    }
    if inv.equivariance {
        checks.push(("equivariance", equivariance_checks(z, &t, spec.group_elements, seed)));
    }
    if inv.slice {
        checks.push(("slice", slice_checks(&t, stable == Some(true))));
    }
    if inv.filtration {
        checks.push(("filtration", phi::filtration_check(&t).map_err(|e| e.to_string()).and_then(|ok| expect(ok, || "filtration fails".into()))));
    }
    if inv.paths {
        checks.push(("theta", theta_checks(z)));
        checks.push(("generators", generator_checks(z)));
        checks.push(("multiplicativity", multiplicativity_checks(z, spec.path_pairs, seed)));
    }
    if inv.flags && z.dims.d.iter().skip(1).all(|&x| x == 0) && stable == Some(true) {
        checks.push(("flags", flag_checks(z, &t)));
    }
    SampleResult { checks, stable }
}

fn embedding_checks(z: &ADHMData, t: &TildeData) -> Outcome {
    let rep = phi::check_transversal(t);
    expect(rep.ok, || format!("transversality: {}", rep.violation.clone().unwrap_or_default()))?;
    expect(phi::check_tilde_adhm(t), || "tilde ADHM relations fail".into())?;
    let as_adhm = t.as_adhm().map_err(|e| e.to_string())?;
    expect(quiver::check_admissible(&as_adhm), || "tilde data not admissible as quiver data".into())?;
    expect(phi::check_phi_equations(z, t), || "prescribed blocks differ from the data".into())
}

fn roundtrip_checks(z: &ADHMData, t: &TildeData) -> Outcome {
    let back = phi::phi_inverse(t).map_err(|e| e.to_string())?;
    expect(back == *z, || "phi_inverse(phi(z)) != z".into())?;
    let again = phi::phi(&back).map_err(|e| e.to_string())?;
    expect(again == *t, || "phi(phi_inverse(t)) != t".into())
}

fn stability_checks(z: &ADHMData, t: &TildeData) -> Outcome {
    let s = quiver::check_stable_criterion(z).map_err(|e| e.to_string())?;
    let ts = phi::tilde_stability(t).map_err(|e| e.to_string())?;
    expect(s == ts, || format!("z stable = {s}, tilde stable = {ts}"))
}

fn stability_agreement(z: &ADHMData) -> Outcome {
    let a = quiver::check_stable_criterion(z).map_err(|e| e.to_string())?;
    let b = quiver::check_stable_definition(z).map_err(|e| e.to_string())?;
    expect(a == b, || format!("criterion {a}, definition {b}"))
}

fn equivariance_checks(z: &ADHMData, t: &TildeData, count: usize, seed: u64) -> Outcome {
    let mut rng = group_rng(seed);
    for k in 0..count {
        let g = GLVElement::random(&z.dims, &mut rng);
        let moved = quiver::act(&g, z).map_err(|e| e.to_string())?;
        let lhs = phi::phi(&moved).map_err(|e| e.to_string())?;
        let ghat = phi::embed_group(&g, &t.layout).map_err(|e| e.to_string())?;
        let rhs = phi::act_tilde(&ghat, t).map_err(|e| e.to_string())?;
        expect(lhs == rhs, || format!("group element {k}: phi(g.z) != g.phi(z)"))?;
    }
    Ok(())
}

fn slice_checks(t: &TildeData, stable: bool) -> Outcome {
    let u = phi::slice_point(t).map_err(|e| e.to_string())?;
    let rep = phi::slice_report(&t.layout, &u);
    expect(rep.nilpotent, || "u is not nilpotent".into())?;
    expect(rep.in_slice, || "[u - x, y] != 0".into())?;
    if stable {
        expect(rep.dominated == Some(true), || {
            format!("jordan type {:?} not below {:?}", rep.jordan_type, rep.lambda_a)
        })?;
    }
    Ok(())
}

/// Every `[α θ_i α′]` with `|α| + |α′| ≤ 3` has vanishing V-level residual;
/// for the short ones the path-algebra element also evaluates to
/// `δ·residual·γ`.
pub fn theta_checks(z: &ADHMData) -> Outcome {
    let n = z.n();
    let eval = |p: BPath| paths::eval_bpath(&p, z).map(|m| (p, m)).map_err(|e| e.to_string());
    for i in 1..n {
        let defect = z.adhm_defect(i);
        let mut outs = Vec::new();
        let mut ins = Vec::new();
        for deg in 0..=3 {
            outs.push(BPath::enumerate(n, i, deg, false).into_iter().map(eval).collect::<Result<Vec<_>, _>>()?);
            ins.push(BPath::enumerate(n, i, deg, true).into_iter().map(eval).collect::<Result<Vec<_>, _>>()?);
        }
        for da in 0..=3 {
            for dp in 0..=3 - da {
                for (alpha, ma) in &outs[da] {
                    let left = ma.mul(&defect);
                    for (alpha_p, mp) in &ins[dp] {
                        let res = left.mul(mp);
                        expect(res.is_zero(), || format!("residual of {alpha} θ_{i} {alpha_p} is nonzero"))?;
                        if da + dp <= 1 {
                            let f = paths::theta_polynomial(n, i, alpha, alpha_p).map_err(|e| e.to_string())?;
                            expect(f.eval(z).map_err(|e| e.to_string())?.is_zero(), || {
                                format!("evaluation of {alpha} θ_{i} {alpha_p} is nonzero")
                            })?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn generator_checks(z: &ADHMData) -> Outcome {
    for (idx, p) in paths::generators_p(z.n()) {
        let lhs = paths::eval_admissible(&p, z).map_err(|e| e.to_string())?;
        expect(lhs == paths::generator_composite(z, idx), || format!("generator {idx:?} = {p} disagrees"))?;
    }
    Ok(())
}

/// A random admissible path leaving `source`, with at most two segments.
pub fn random_admissible(n: usize, rng: &mut SeededRng, source: usize) -> AdmissiblePath {
    let segs = if n > 2 { rng.gen_range(0..=2) } else { 0 };
    let mut powers = vec![rng.gen_range(0..=1)];
    let mut segments = Vec::new();
    let mut at = source;
    for _ in 0..segs {
        let deg = rng.gen_range(1..=2);
        let choices = BPath::enumerate(n, at, deg, false);
        let seg = choices[rng.gen_range(0..choices.len())].clone();
        at = seg.target();
        segments.push(seg);
        powers.push(rng.gen_range(0..=1));
    }
    AdmissiblePath::new(powers, segments, source).expect("chained by construction")
}

pub fn multiplicativity_checks(z: &ADHMData, pairs: usize, seed: u64) -> Outcome {
    let n = z.n();
    let mut rng = sample::rng(seed ^ 0xbb67_ae85_84ca_a73b);
    for _ in 0..pairs {
        let start = rng.gen_range(1..n);
        let q = random_admissible(n, &mut rng, start);
        let p = random_admissible(n, &mut rng, q.target());
        let pq = p.concat(&q).expect("endpoints match");
        let lhs = paths::eval_admissible(&pq, z).map_err(|e| e.to_string())?;
        let rhs = paths::eval_admissible(&p, z)
            .and_then(|a| paths::eval_admissible(&q, z).map(|b| a.mul(&b)))
            .map_err(|e| e.to_string())?;
        expect(lhs == rhs, || format!("eval({p}·{q}) != eval({p})·eval({q})"))?;
    }
    Ok(())
}

fn flag_checks(z: &ADHMData, t: &TildeData) -> Outcome {
    let p = flags::flag_of_data(z).map_err(|e| e.to_string())?;
    let w = flags::data_of_flag(&p).map_err(|e| e.to_string())?;
    expect(flags::flag_of_data(&w).map_err(|e| e.to_string())? == p, || "flag roundtrip changed (u, F)".into())?;
    flags::gauge_to_normal_form(z).map_err(|e| e.to_string())?;
    let u = phi::slice_point(t).map_err(|e| e.to_string())?;
    expect(u == p.u, || "slice point differs from the flag pair's u".into())?;
    expect(flags::within_orbit_closure(&p).map_err(|e| e.to_string())?, || "u outside the orbit closure".into())
}

/// Case-level checks on the zero datum: `Φ(0)` is transversal with `u = x`,
/// and `x` has type `1^{d₁}⋯(n−1)^{d_{n−1}}`.
pub fn zero_checks(dims: &DimData) -> Outcome {
    let z = ADHMData::zero(dims).map_err(|e| e.to_string())?;
    let t = phi::phi(&z).map_err(|e| e.to_string())?;
    expect(phi::check_transversal(&t).ok, || "phi(0) not transversal".into())?;
    let x = phi::sl2_of_level(&t.layout, 0).x;
    expect(phi::slice_point(&t).map_err(|e| e.to_string())? == x, || "phi(0) does not give u = x".into())?;
    let jt = linalg::jordan_type(&x).map_err(|e| e.to_string())?;
    expect(jt == weight::x_type(&dims.d), || format!("x has type {jt}"))
}

fn record(tallies: &mut BTreeMap<String, Tally>, name: &str, ok: bool) {
    let t = tallies.entry(name.to_string()).or_default();
    if ok {
        t.passed += 1;
    } else {
        t.failed += 1;
    }
}

pub fn run_case(spec: &CaseSpec, digest: &str) -> CaseReport {
    let start = Instant::now();
    let key = spec.key();
    let mut rep = CaseReport {
        key: key.clone(),
        samples: 0,
        skipped: 0,
        stable: 0,
        unstable: 0,
        checks: BTreeMap::new(),
        failures: Vec::new(),
        coeff_digest: digest.to_string(),
        millis: 0,
    };
    let zero = zero_checks(&spec.dims);
    record(&mut rep.checks, "zero", zero.is_ok());
    if let Err(message) = zero {
        rep.failures.push(Failure {
            replay: key.clone(),
            invariant: "zero".into(),
            message,
            data: serde_json::to_value(ADHMData::zero(&spec.dims).ok()).unwrap_or_default(),
        });
    }
    for &seed in &spec.seeds {
        let z = match sample_data(&spec.dims, spec.mode, seed) {
            Ok(Some(z)) => z,
            Ok(None) => {
                rep.skipped += 1;
                continue;
            }
            Err(e) => {
                record(&mut rep.checks, "generator", false);
                rep.failures.push(Failure {
                    replay: format!("{key}#{seed}"),
                    invariant: "generator".into(),
                    message: e.to_string(),
                    data: serde_json::Value::Null,
                });
                continue;
            }
        };
        rep.samples += 1;
        let res = check_sample(&z, spec, seed);
        match res.stable {
            Some(true) => rep.stable += 1,
            Some(false) => rep.unstable += 1,
            None => {}
        }
        for (name, outcome) in res.checks {
            record(&mut rep.checks, name, outcome.is_ok());
            if let Err(message) = outcome {
                rep.failures.push(Failure {
                    replay: format!("{key}#{seed}"),
                    invariant: name.to_string(),
                    message,
                    data: serde_json::to_value(&z).unwrap_or_default(),
                });
            }
        }
    }
    rep.millis = start.elapsed().as_millis() as u64;
    rep
}

pub fn run_suite(spec: &SuiteSpec) -> Report {
    run_suite_with(spec, Exec::from_env())
}

pub fn run_suite_with(spec: &SuiteSpec, exec: Exec) -> Report {
    let mut ns: Vec<usize> = spec.cases.iter().map(|c| c.dims.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let digests: HashMap<usize, String> = ns.into_iter().map(|n| (n, coeff_digest(n))).collect();
    let mut cases = par::map(exec, &spec.cases, |c| run_case(c, &digests[&c.dims.n]));
    cases.sort_by(|a, b| a.key.cmp(&b.key));
    let comb = spec.comb.map(|b| exhaustive_comb_scan(&b, &CombPredicates::default(), exec));
    let passed = cases.iter().all(CaseReport::passed) && comb.as_ref().is_none_or(|c| c.disagreements.is_empty());
    Report { passed, cases, comb }
}

/// Re-runs one recorded sample (`key#seed`), or the case-level checks when
/// no seed is given.
pub fn replay(key: &str) -> Result<CaseReport, HarnessError> {
    let (dims, mode, seed) = parse_key(key)?;
    let mut spec = CaseSpec::new(dims, mode, seed.into_iter().collect());
    spec.group_elements = 20;
    let digest = coeff_digest(spec.dims.n);
    Ok(run_case(&spec, &digest))
}

/// The standard matrix: `n ≤ 5`, `d_i ≤ 2`, `v_i ≤ 3` with both generators,
/// plus the comb scan over `n ≤ 4`, `d_i ≤ 3`, `|v_i| ≤ 4`.
pub fn default_suite(seeds: u64) -> SuiteSpec {
    let mut cases = Vec::new();
    for dims in default_matrix(5, 2, 3, 14) {
        for mode in [GenMode::General, GenMode::Lagrangian] {
            cases.push(CaseSpec::new(dims.clone(), mode, (0..seeds).collect()));
        }
    }
    SuiteSpec { cases, comb: Some(CombBounds { n_max: 4, d_max: 3, v_abs_max: 4 }) }
}

/// Every dims with `2 ≤ n ≤ n_max`, `0 ≤ d_i ≤ d_max`, `0 ≤ v_i ≤ v_max`,
/// `Σ j d_j ≤ n_total_max`, restricted to nonempty varieties.
pub fn default_matrix(n_max: usize, d_max: i64, v_max: i64, n_total_max: i64) -> Vec<DimData> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for d in tuples(n - 1, 0, d_max) {
            let total: i64 = d.iter().enumerate().map(|(k, &x)| (k as i64 + 1) * x).sum();
            if total > n_total_max {
                continue;
            }
            for v in tuples(n - 1, 0, v_max) {
                let dims = DimData { n, d: d.clone(), v };
                if weight::quiver_nonempty(&dims) {
                    out.push(dims);
                }
            }
        }
    }
    out
}

/// All integer tuples of length `len` with entries in `lo..=hi`, in
/// lexicographic order.
pub fn tuples(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (lo..=hi).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombBounds {
    pub n_max: usize,
    pub d_max: i64,
    pub v_abs_max: i64,
}

type DimsPred = Box<dyn Fn(&DimData) -> bool + Sync + Send>;
type SlicePred = Box<dyn Fn(&[i64], &[i64]) -> bool + Sync + Send>;
type DimsDim = Box<dyn Fn(&DimData) -> Result<i64, CombError> + Sync + Send>;
type SliceDim = Box<dyn Fn(&[i64], &[i64]) -> Result<i64, CombError> + Sync + Send>;

/// The four functions compared by the scan; replaceable so that a broken
/// predicate can be shown to be caught.
pub struct CombPredicates {
    pub quiver_nonempty: DimsPred,
    pub slice_nonempty: SlicePred,
    pub quiver_dim: DimsDim,
    pub slice_dim: SliceDim,
}

impl Default for CombPredicates {
    fn default() -> Self {
        // centralizer dimensions repeat across the scan; solve each once
        let cache: Mutex<HashMap<Partition, usize>> = Mutex::new(HashMap::new());
        let zdim = move |p: Partition| -> usize {
            if let Some(&k) = cache.lock().expect("cache").get(&p) {
                return k;
            }
            let k = linalg::standard_centralizer_dim(&p);
            cache.lock().expect("cache").insert(p, k);
            k
        };
        CombPredicates {
            quiver_nonempty: Box::new(weight::quiver_nonempty),
            slice_nonempty: Box::new(weight::slice_nonempty),
            quiver_dim: Box::new(weight::quiver_dim),
            slice_dim: Box::new(move |d, a| {
                if !weight::slice_nonempty(d, a) {
                    return Err(CombError::EmptyVariety);
                }
                let zx = zdim(weight::x_type(d));
                let zu = zdim(weight::lambda_of(a)?);
                Ok(zx as i64 - zu as i64)
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombReport {
    pub bounds: CombBounds,
    pub cases: usize,
    pub nonempty: usize,
    pub disagreements: Vec<String>,
    pub millis: u64,
}

pub fn exhaustive_comb_scan(bounds: &CombBounds, preds: &CombPredicates, exec: Exec) -> CombReport {
    let start = Instant::now();
    let mut all = Vec::new();
    for n in 2..=bounds.n_max {
        for d in tuples(n - 1, 0, bounds.d_max) {
            for v in tuples(n - 1, -bounds.v_abs_max, bounds.v_abs_max) {
                all.push(DimData { n, d: d.clone(), v });
            }
        }
    }
    let results = par::map(exec, &all, |dims| -> (bool, Option<String>) {
        let a = weight::a_of(dims);
        let q = (preds.quiver_nonempty)(dims);
        let s = (preds.slice_nonempty)(&dims.d, &a);
        if q != s {
            return (q, Some(format!("{}: quiver nonempty {q}, slice nonempty {s}", dims.key())));
        }
        if q {
            let qd = (preds.quiver_dim)(dims);
            let sd = (preds.slice_dim)(&dims.d, &a);
            if qd.as_ref().ok() != sd.as_ref().ok() || qd.is_err() {
                return (q, Some(format!("{}: quiver dim {qd:?}, slice dim {sd:?}", dims.key())));
            }
        }
        (q, None)
    });
    CombReport {
        bounds: *bounds,
        cases: all.len(),
        nonempty: results.iter().filter(|r| r.0).count(),
        disagreements: results.into_iter().filter_map(|r| r.1).collect(),
        millis: start.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(d: &[i64], v: &[i64]) -> DimData {
        DimData::new(d.len() + 1, d.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn empty_suite_passes() {
        let rep = run_suite(&SuiteSpec::default());
        assert!(rep.passed && rep.cases.is_empty());
    }

    #[test]
    fn keys_roundtrip() {
        let spec = CaseSpec::new(dd(&[1, 0, 2], &[1, 1, 2]), GenMode::OneSidedB, vec![]);
        let (dims, mode, seed) = parse_key(&format!("{}#12", spec.key())).unwrap();
        assert_eq!((dims, mode, seed), (spec.dims.clone(), spec.mode, Some(12)));
        assert!(parse_key("general:n=3;d=1;v=1,1").is_err());
    }

    #[test]
    fn small_suite_is_deterministic() {
        let mut cases = Vec::new();
        for mode in [GenMode::General, GenMode::Lagrangian] {
            let mut c = CaseSpec::new(dd(&[1, 1], &[1, 1]), mode, (0..4).collect());
            c.group_elements = 2;
            cases.push(c);
        }
        let mut c = CaseSpec::new(dd(&[3, 0], &[2, 1]), GenMode::Flag, (0..4).collect());
        c.group_elements = 2;
        cases.push(c);
        let suite = SuiteSpec { cases, comb: Some(CombBounds { n_max: 2, d_max: 2, v_abs_max: 2 }) };
        let a = run_suite_with(&suite, Exec::Parallel).strip_timings();
        let b = run_suite_with(&suite, Exec::Sequential).strip_timings();
        assert!(a.passed, "{:?}", a.failures().collect::<Vec<_>>());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.comb.as_ref().unwrap().cases, 15);
        assert!(a.tally("flags").passed > 0);
    }

    #[test]
    fn flipped_predicate_is_reported() {
        let mut preds = CombPredicates::default();
        preds.slice_nonempty = Box::new(|d, a| !weight::slice_nonempty(d, a));
        let rep = exhaustive_comb_scan(&CombBounds { n_max: 2, d_max: 2, v_abs_max: 2 }, &preds, Exec::Sequential);
        assert_eq!(rep.disagreements.len(), 15);
    }

    #[test]
    fn replay_reproduces() {
        let rep = replay("general:n=3;d=1,1;v=1,1#3").unwrap();
        assert_eq!(rep.samples, 1);
        assert!(rep.passed());
    }
}
