//! End-to-end period-finding runs: configuration, circuit assembly, backend
//! selection, measurement, candidate extraction, and the result document.

use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::modexp::{
    layer_permutation, materialize_plan, plan_proposed, sota_layer_gate_count,
    ExponentConvention, LayerPlan,
};
use crate::numtheory::{extract_factors, gcd, FactorPair};
use crate::scalar::Scalar;
use crate::simulator::{
    exact_distribution_fast, init_state, iqft_circuit, sample_distribution, Histogram,
};

pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;
pub const DEFAULT_GATE_BUDGET: u64 = 1 << 26;

/// Which modular-exponentiation builder drives the run.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Proposed,
    Sota,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Sota => "sota",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Method::Proposed),
            "sota" => Ok(Method::Sota),
            other => Err(Error::Usage(format!(
                "unknown method {other:?} (expected proposed or sota)"
            ))),
        }
    }
}

/// Simulation backend. `Auto` resolves to the FFT backend, which handles
/// every circuit both builders emit; the dense statevector is opt-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Auto,
    Dense,
    Fast,
}

impl Backend {
    pub fn resolve(self) -> Backend {
        match self {
            Backend::Auto => Backend::Fast,
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::Dense => "dense",
            Backend::Fast => "fast",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Backend::Auto),
            "dense" => Ok(Backend::Dense),
            "fast" => Ok(Backend::Fast),
            other => Err(Error::Usage(format!(
                "unknown backend {other:?} (expected auto, dense or fast)"
            ))),
        }
    }
}

impl FromStr for ExponentConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iterated-squaring" => Ok(ExponentConvention::IteratedSquaring),
            "literal" => Ok(ExponentConvention::Literal),
            other => Err(Error::Usage(format!(
                "unknown convention {other:?} (expected iterated-squaring or literal)"
            ))),
        }
    }
}

/// Everything a period-finding run needs besides the modulus.
#[derive(Debug, Clone)]
pub struct ShorConfig {
    pub method: Method,
    /// Counting-register width; the work register has the same width.
    pub k: usize,
    /// Base of the modular exponentiation. Both builders encode base 2.
    pub a: BigUint,
    pub shots: u64,
    pub seed: u64,
    pub convention: ExponentConvention,
    pub backend: Backend,
    /// Runs needing more than this many qubits report NOT_APPLICABLE.
    pub qubit_limit: Option<u64>,
    /// Byte budget for simulator allocations.
    pub memory_budget: u64,
    /// Gate budget for any single emitted layer.
    pub gate_budget: u64,
}

impl ShorConfig {
    pub fn new(method: Method, k: usize) -> Self {
        ShorConfig {
            method,
            k,
            a: BigUint::from(2u32),
            shots: DEFAULT_SHOTS,
            seed: 0,
            convention: ExponentConvention::default(),
            backend: Backend::default(),
            qubit_limit: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            gate_budget: DEFAULT_GATE_BUDGET,
        }
    }

    pub fn qubits(&self) -> u64 {
        2 * self.k as u64
    }
}

/// Outcome classification of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    NoFactor,
    NotApplicable,
    Capacity,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Success => "SUCCESS",
            RunStatus::NoFactor => "NO_FACTOR",
            RunStatus::NotApplicable => "NOT_APPLICABLE",
            RunStatus::Capacity => "CAPACITY",
        }
    }
}

/// One measured counting value with its continued-fraction-free period
/// guess: y / 2^k reduced to lowest terms, the denominator being the
/// candidate period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub y: u64,
    pub numerator: u64,
    pub denominator: u64,
    pub count: u64,
}

/// Full record of one run.
#[derive(Debug, Clone)]
pub struct FactoringResult {
    pub n: BigUint,
    pub method: Method,
    pub k: usize,
    pub qubits: u64,
    pub shots: u64,
    pub seed: u64,
    pub convention: ExponentConvention,
    /// Backend that actually executed; `None` when the run never started.
    pub backend: Option<Backend>,
    pub status: RunStatus,
    /// Human-readable explanation for non-success statuses.
    pub detail: Option<String>,
    /// How many layers of the shortcut builder fell back to the cascade.
    /// `None` for the cascade baseline, where the question does not arise.
    pub fallback_layers: Option<u64>,
    pub histogram: Histogram,
    pub candidates: Vec<Candidate>,
    pub r_selected: Option<u64>,
    pub factors: Option<FactorPair>,
    pub gen_time_s: f64,
    pub exec_time_s: f64,
}

impl FactoringResult {
    fn empty(n: &BigUint, cfg: &ShorConfig, status: RunStatus, detail: String) -> Self {
        FactoringResult {
            n: n.clone(),
            method: cfg.method,
            k: cfg.k,
            qubits: cfg.qubits(),
            shots: 0,
            seed: cfg.seed,
            convention: cfg.convention,
            backend: None,
            status,
            detail: Some(detail),
            fallback_layers: None,
            histogram: Histogram {
                register_width: cfg.k,
                shots: 0,
                counts: Default::default(),
            },
            candidates: Vec::new(),
            r_selected: None,
            factors: None,
            gen_time_s: 0.0,
            exec_time_s: 0.0,
        }
    }

    /// JSON document with every integer rendered as a decimal string, so
    /// arbitrary-precision fields survive any JSON implementation.
    pub fn to_json_string(&self) -> String {
        let histogram_counts: serde_json::Map<String, serde_json::Value> = self
            .histogram
            .counts
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
            .collect();
        let candidates: Vec<serde_json::Value> = self
            .candidates
            .iter()
            .map(|c| {
                serde_json::json!({
                    "y": c.y.to_string(),
                    "numerator": c.numerator.to_string(),
                    "denominator": c.denominator.to_string(),
                    "r": c.denominator.to_string(),
                    "count": c.count.to_string(),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "schema": "shor-lab/v1",
            "n": self.n.to_string(),
            "method": self.method.as_str(),
            "k": self.k.to_string(),
            "qubits": self.qubits.to_string(),
            "shots": self.shots.to_string(),
            "seed": self.seed.to_string(),
            "convention": self.convention.as_str(),
            "backend": self.backend.map(|b| b.as_str()),
            "status": self.status.as_str(),
            "detail": self.detail,
            "fallback_layers": self.fallback_layers.map(|f| f.to_string()),
            "histogram": {
                "register_width": self.histogram.register_width.to_string(),
                "shots": self.histogram.shots.to_string(),
                "counts": histogram_counts,
            },
            "candidates": candidates,
            "r_selected": self.r_selected.map(|r| r.to_string()),
            "factors": self.factors.as_ref().map(|f| serde_json::json!({
                "p": f.p.to_string(),
                "q": f.q.to_string(),
            })),
            "gen_time_s": self.gen_time_s,
            "exec_time_s": self.exec_time_s,
        });
        serde_json::to_string_pretty(&doc).expect("static structure")
    }
}

fn validate(n: &BigUint, cfg: &ShorConfig) -> Result<()> {
    if cfg.k < 2 {
        return Err(Error::Domain(format!(
            "counting register needs k >= 2, got {}",
            cfg.k
        )));
    }
    if *n < BigUint::from(3u32) {
        return Err(Error::Domain(format!("modulus must be >= 3, got {n}")));
    }
    if cfg.a != BigUint::from(2u32) {
        return Err(Error::Validation(format!(
            "both builders encode base a = 2, got a = {}",
            cfg.a
        )));
    }
    if gcd(&cfg.a, n)? != BigUint::one() {
        return Err(Error::Domain(format!(
            "gcd(a, n) must be 1, got gcd({}, {n}) != 1",
            cfg.a
        )));
    }
    if cfg.shots == 0 {
        return Err(Error::Validation("shots must be >= 1".into()));
    }
    Ok(())
}

/// Both backends index basis states with shifted machine integers, so the
/// counting register is capped well below the word size. Checked after the
/// qubit-limit policy: a run the policy already excludes reports
/// NOT_APPLICABLE no matter how large its k is.
fn check_simulable(cfg: &ShorConfig) -> Result<()> {
    if cfg.k > 30 {
        return Err(Error::Validation(format!(
            "k = {} exceeds the supported maximum of 30",
            cfg.k
        )));
    }
    Ok(())
}

/// One modular-exponentiation layer with the plan that produced it.
struct BuiltLayer {
    circuit: Circuit,
    plan: LayerPlan,
}

/// Classifies every layer and checks the cumulative analytic gate count
/// against the budget before any gate list is materialized, so oversized
/// configurations fail in microseconds instead of allocating gigabytes.
fn plan_layers(n: &BigUint, cfg: &ShorConfig) -> Result<Vec<LayerPlan>> {
    let mut plans = Vec::with_capacity(cfg.k);
    let mut total = BigUint::default();
    for b in 0..cfg.k as u32 {
        let plan = match cfg.method {
            Method::Proposed => plan_proposed(b, cfg.k, n, cfg.convention)?,
            // Every baseline layer is a full cascade block, which is exactly
            // what the fallback plan denotes.
            Method::Sota => LayerPlan::Fallback,
        };
        total += match plan {
            LayerPlan::Identity => BigUint::default(),
            LayerPlan::TokenSwap { .. } => BigUint::one(),
            LayerPlan::Fallback => sota_layer_gate_count(b, cfg.k),
        };
        plans.push(plan);
    }
    if total > BigUint::from(cfg.gate_budget) {
        return Err(Error::Capacity(format!(
            "{} layers for k = {} need {total} gates, budget is {}",
            cfg.method.as_str(),
            cfg.k,
            cfg.gate_budget
        )));
    }
    Ok(plans)
}

fn build_layers(n: &BigUint, cfg: &ShorConfig) -> Result<Vec<BuiltLayer>> {
    plan_layers(n, cfg)?
        .into_iter()
        .enumerate()
        .map(|(b, plan)| {
            let circuit = materialize_plan(plan, b as u32, cfg.k, cfg.gate_budget)?;
            Ok(BuiltLayer { circuit, plan })
        })
        .collect()
}

/// Assembles the complete period-finding circuit on 2k qubits: Hadamards on
/// the counting register, X on the work register's low bit, one controlled
/// modular-multiplication layer per counting qubit, and the inverse QFT on
/// the counting register.
pub fn build_shor_circuit(n: &BigUint, cfg: &ShorConfig) -> Result<Circuit> {
    validate(n, cfg)?;
    if let Some(limit) = cfg.qubit_limit {
        if cfg.qubits() > limit {
            return Err(Error::NotApplicable {
                qubits: cfg.qubits(),
                limit,
            });
        }
    }
    check_simulable(cfg)?;
    let layers = build_layers(n, cfg)?;
    assemble_circuit(cfg, &layers)
}

fn assemble_circuit(cfg: &ShorConfig, layers: &[BuiltLayer]) -> Result<Circuit> {
    let k = cfg.k;
    let width = 2 * k;
    let mut c = Circuit::new(width)?;
    for q in 0..k {
        c.append(Gate::H(q))?;
    }
    c.append(Gate::X(k))?;
    for (b, layer) in layers.iter().enumerate() {
        let embedded = layer.circuit.embedded(k, width)?;
        c.extend(&embedded.control(b)?)?;
    }
    c.extend(&iqft_circuit(k, 0)?)?;
    Ok(c)
}

/// Work-register label for every counting value, composed layer by layer
/// from each layer's basis permutation. `labels[i]` is the work value after
/// applying the layers selected by the set bits of `i` to the initial token.
fn work_labels(cfg: &ShorConfig, layers: &[BuiltLayer]) -> Result<Vec<u32>> {
    let k = cfg.k;
    let mut labels = vec![0u32; 1usize << k];
    labels[0] = 1;
    for (b, layer) in layers.iter().enumerate() {
        let table = layer_permutation(layer.plan, b as u32, k)?;
        let stride = 1usize << b;
        for i in 0..stride {
            labels[i | stride] = table[labels[i] as usize];
        }
    }
    Ok(labels)
}

/// Exact probability distribution over the counting register, honoring the
/// configured backend (with `Auto` resolved to the FFT backend). No
/// sampling is involved.
pub fn counting_distribution<T: Scalar>(n: &BigUint, cfg: &ShorConfig) -> Result<Vec<T>> {
    validate(n, cfg)?;
    check_simulable(cfg)?;
    let layers = build_layers(n, cfg)?;
    match cfg.backend.resolve() {
        Backend::Dense => {
            let circuit = assemble_circuit(cfg, &layers)?;
            let mut state = init_state::<T>(2 * cfg.k, cfg.memory_budget)?;
            state.apply(&circuit)?;
            state.marginal(0..cfg.k)
        }
        Backend::Fast => {
            check_fast_memory(cfg)?;
            let labels = work_labels(cfg, &layers)?;
            exact_distribution_fast::<T>(cfg.k, &labels)
        }
        Backend::Auto => unreachable!("resolve() eliminates Auto"),
    }
}

/// The FFT backend allocates label, table, probability and FFT buffers of
/// 2^k entries each; reject configurations that cannot fit.
fn check_fast_memory(cfg: &ShorConfig) -> Result<()> {
    let per_entry = (2 * std::mem::size_of::<u32>()
        + 3 * std::mem::size_of::<num_complex::Complex<f64>>()) as u128;
    let required = per_entry.saturating_mul(1u128 << cfg.k);
    if required > cfg.memory_budget as u128 {
        return Err(Error::Capacity(format!(
            "fast backend at k = {} needs about {required} bytes, budget is {}",
            cfg.k, cfg.memory_budget
        )));
    }
    Ok(())
}

/// Turns a measured histogram over k counting bits into period candidates:
/// each outcome y != 0 contributes the reduced fraction y / 2^k whose
/// denominator is the period guess. Candidates are ordered by descending
/// count, then smaller denominator, then smaller y.
pub fn period_candidates(h: &Histogram, k: usize) -> Result<Vec<Candidate>> {
    if h.register_width != k {
        return Err(Error::Validation(format!(
            "histogram width {} does not match k = {k}",
            h.register_width
        )));
    }
    if k >= 64 {
        return Err(Error::Validation(format!("k = {k} exceeds 63")));
    }
    let modulus = 1u64 << k;
    let mut out = Vec::new();
    for (y, count) in h.outcome_counts()? {
        if y == 0 {
            continue;
        }
        let g = y.gcd(&modulus);
        out.push(Candidate {
            y,
            numerator: y / g,
            denominator: modulus / g,
            count,
        });
    }
    out.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.denominator.cmp(&b.denominator))
            .then(a.y.cmp(&b.y))
    });
    Ok(out)
}

/// Walks the candidate list trying each period guess and, if that fails,
/// its double; the first extraction that splits n wins. Returns the
/// exponent that actually succeeded alongside the factors.
pub fn select_and_extract(
    candidates: &[Candidate],
    a: &BigUint,
    n: &BigUint,
) -> Result<(Option<u64>, Option<FactorPair>)> {
    for cand in candidates {
        let doubled = cand.denominator.checked_mul(2);
        for r in std::iter::once(cand.denominator).chain(doubled) {
            if let Some(pair) = extract_factors(a, r, n)? {
                return Ok((Some(r), Some(pair)));
            }
        }
    }
    Ok((None, None))
}

/// Runs the full pipeline for modulus `n` under `cfg`.
///
/// Infeasible configurations come back as results with status
/// `NOT_APPLICABLE` (qubit limit) or `CAPACITY` (gate or memory budget)
/// rather than errors; malformed inputs are errors.
pub fn run_shor<T: Scalar>(n: &BigUint, cfg: &ShorConfig) -> Result<FactoringResult> {
    validate(n, cfg)?;

    if let Some(limit) = cfg.qubit_limit {
        if cfg.qubits() > limit {
            let detail = Error::NotApplicable {
                qubits: cfg.qubits(),
                limit,
            }
            .to_string();
            return Ok(FactoringResult::empty(
                n,
                cfg,
                RunStatus::NotApplicable,
                detail,
            ));
        }
    }
    check_simulable(cfg)?;

    let backend = cfg.backend.resolve();

    // Generation phase: build every modular-exponentiation layer, plus the
    // full-circuit assembly when the dense backend will consume it.
    let gen_start = Instant::now();
    let layers = match build_layers(n, cfg) {
        Ok(layers) => layers,
        Err(Error::Capacity(msg)) => {
            return Ok(FactoringResult::empty(n, cfg, RunStatus::Capacity, msg))
        }
        Err(e) => return Err(e),
    };
    let dense_circuit = if backend == Backend::Dense {
        Some(assemble_circuit(cfg, &layers)?)
    } else {
        None
    };
    let gen_time_s = gen_start.elapsed().as_secs_f64();

    let fallback_layers = match cfg.method {
        Method::Proposed => Some(
            layers
                .iter()
                .filter(|l| matches!(l.plan, LayerPlan::Fallback))
                .count() as u64,
        ),
        Method::Sota => None,
    };

    // Execution phase: produce the exact counting distribution and sample it.
    let exec_start = Instant::now();
    let probs: Vec<T> = match backend {
        Backend::Dense => {
            let mut state = match init_state::<T>(2 * cfg.k, cfg.memory_budget) {
                Ok(s) => s,
                Err(Error::Capacity(msg)) => {
                    return Ok(FactoringResult::empty(n, cfg, RunStatus::Capacity, msg))
                }
                Err(e) => return Err(e),
            };
            state.apply(dense_circuit.as_ref().expect("built for dense"))?;
            state.marginal(0..cfg.k)?
        }
        Backend::Fast => {
            if let Err(Error::Capacity(msg)) = check_fast_memory(cfg) {
                return Ok(FactoringResult::empty(n, cfg, RunStatus::Capacity, msg));
            }
            let labels = work_labels(cfg, &layers)?;
            exact_distribution_fast::<T>(cfg.k, &labels)?
        }
        Backend::Auto => unreachable!("resolve() eliminates Auto"),
    };
    let histogram = sample_distribution(&probs, cfg.k, cfg.shots, cfg.seed)?;
    let exec_time_s = exec_start.elapsed().as_secs_f64();

    let candidates = period_candidates(&histogram, cfg.k)?;
    let (r_selected, factors) = select_and_extract(&candidates, &cfg.a, n)?;
    let status = if factors.is_some() {
        RunStatus::Success
    } else {
        RunStatus::NoFactor
    };

    Ok(FactoringResult {
        n: n.clone(),
        method: cfg.method,
        k: cfg.k,
        qubits: cfg.qubits(),
        shots: cfg.shots,
        seed: cfg.seed,
        convention: cfg.convention,
        backend: Some(backend),
        status,
        detail: None,
        fallback_layers,
        histogram,
        candidates,
        r_selected,
        factors,
        gen_time_s,
        exec_time_s,
    })
}
