//! Benchmark harness: runs catalog cases under both methods, collects
//! per-run records, and renders them as CSV, JSON, or a markdown comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::FactoringCase;
use crate::pipeline::{
    run_shor, Backend, Method, RunStatus, ShorConfig, DEFAULT_GATE_BUDGET,
    DEFAULT_MEMORY_BUDGET, DEFAULT_SHOTS,
};
use crate::modexp::ExponentConvention;

/// Default qubit ceiling for benchmark runs, mirroring a simulator that
/// cannot go past 31 qubits.
pub const DEFAULT_QUBIT_LIMIT: u64 = 31;

/// Outcome class of one benchmark run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BenchStatus {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "NOT_APPLICABLE")]
    NotApplicable,
    #[serde(rename = "CAPACITY")]
    Capacity,
    #[serde(rename = "SKIPPED")]
    Skipped,
}

impl BenchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchStatus::Ok => "OK",
            BenchStatus::NotApplicable => "NOT_APPLICABLE",
            BenchStatus::Capacity => "CAPACITY",
            BenchStatus::Skipped => "SKIPPED",
        }
    }
}

/// One row of the benchmark report. Runs that never executed carry no
/// timings and zero shots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    #[serde(rename = "case")]
    pub case_index: u32,
    pub method: Method,
    pub qubits: u64,
    pub gen_time_s: Option<f64>,
    pub exec_time_s: Option<f64>,
    pub shots: u64,
    pub status: BenchStatus,
}

/// Knobs shared by every run in one benchmark invocation.
#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Methods to run per case, always executed in (proposed, sota) order.
    pub methods: Vec<Method>,
    pub shots: u64,
    pub seed: u64,
    pub qubit_limit: Option<u64>,
    pub memory_budget: u64,
    pub gate_budget: u64,
    pub backend: Backend,
    pub convention: ExponentConvention,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            methods: vec![Method::Proposed, Method::Sota],
            shots: DEFAULT_SHOTS,
            seed: 0,
            qubit_limit: Some(DEFAULT_QUBIT_LIMIT),
            memory_budget: DEFAULT_MEMORY_BUDGET,
            gate_budget: DEFAULT_GATE_BUDGET,
            backend: Backend::Auto,
            convention: ExponentConvention::IteratedSquaring,
        }
    }
}

/// Runs every requested (case, method) pair and returns records sorted by
/// case index, then method.
pub fn run_bench(cases: &[FactoringCase], opts: &BenchOptions) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    let mut cases: Vec<&FactoringCase> = cases.iter().collect();
    cases.sort_by_key(|c| c.index);
    for case in cases {
        for method in [Method::Proposed, Method::Sota] {
            if !opts.methods.contains(&method) {
                continue;
            }
            let k = match method {
                Method::Proposed => case.k_proposed,
                Method::Sota => case.k_sota,
            };
            let mut cfg = ShorConfig::new(method, k);
            cfg.shots = opts.shots;
            cfg.seed = opts.seed;
            cfg.qubit_limit = opts.qubit_limit;
            cfg.memory_budget = opts.memory_budget;
            cfg.gate_budget = opts.gate_budget;
            cfg.backend = opts.backend;
            cfg.convention = opts.convention;
            let res = run_shor::<f64>(&case.n, &cfg)?;
            let (status, timings) = match res.status {
                RunStatus::Success => (BenchStatus::Ok, true),
                RunStatus::NoFactor => (BenchStatus::Skipped, true),
                RunStatus::NotApplicable => (BenchStatus::NotApplicable, false),
                RunStatus::Capacity => (BenchStatus::Capacity, false),
            };
            records.push(BenchRecord {
                case_index: case.index,
                method,
                qubits: res.qubits,
                gen_time_s: timings.then_some(res.gen_time_s),
                exec_time_s: timings.then_some(res.exec_time_s),
                shots: res.histogram.shots,
                status,
            });
        }
    }
    Ok(records)
}

/// Report rendering formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Usage(format!(
                "unknown report format {other:?} (expected csv, json or markdown)"
            ))),
        }
    }
}

/// Renders records in the requested format. CSV and JSON round-trip through
/// the matching parse functions; markdown is for human eyes.
pub fn emit_report(records: &[BenchRecord], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for record in records {
                writer.serialize(record)?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| Error::Validation(format!("csv flush failed: {e}")))?;
            String::from_utf8(bytes)
                .map_err(|e| Error::Validation(format!("csv not utf-8: {e}")))
        }
        ReportFormat::Json => Ok(serde_json::to_string_pretty(records)?),
        ReportFormat::Markdown => Ok(render_markdown(records)),
    }
}

pub fn parse_csv_report(text: &str) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn parse_json_report(text: &str) -> Result<Vec<BenchRecord>> {
    Ok(serde_json::from_str(text)?)
}

fn find(
    records: &[BenchRecord],
    case_index: u32,
    method: Method,
) -> Option<&BenchRecord> {
    records
        .iter()
        .find(|r| r.case_index == case_index && r.method == method)
}

fn time_cell(record: Option<&BenchRecord>, time: impl Fn(&BenchRecord) -> Option<f64>) -> String {
    match record {
        None => "-".to_string(),
        Some(r) => match time(r) {
            Some(t) => format!("{t:.6}"),
            None => r.status.as_str().to_lowercase().replace('_', " "),
        },
    }
}

/// Two side-by-side comparison tables: qubit count with generation time,
/// and execution time with the status.
fn render_markdown(records: &[BenchRecord]) -> String {
    let methods: Vec<Method> = [Method::Proposed, Method::Sota]
        .into_iter()
        .filter(|m| records.iter().any(|r| r.method == *m))
        .collect();
    let mut case_indices: Vec<u32> = records.iter().map(|r| r.case_index).collect();
    case_indices.sort_unstable();
    case_indices.dedup();

    let mut out = String::new();
    out.push_str("## Qubit count and circuit generation time\n\n");
    out.push_str("| case |");
    for m in &methods {
        out.push_str(&format!(" {} qubits |", m.as_str()));
    }
    for m in &methods {
        out.push_str(&format!(" {} gen (s) |", m.as_str()));
    }
    out.push('\n');
    out.push_str(&format!("|---:|{}", "---:|".repeat(2 * methods.len())));
    out.push('\n');
    for &case in &case_indices {
        out.push_str(&format!("| {case} |"));
        for m in &methods {
            match find(records, case, *m) {
                Some(r) => out.push_str(&format!(" {} |", r.qubits)),
                None => out.push_str(" - |"),
            }
        }
        for m in &methods {
            out.push_str(&format!(
                " {} |",
                time_cell(find(records, case, *m), |r| r.gen_time_s)
            ));
        }
        out.push('\n');
    }

    out.push_str("\n## Execution time and status\n\n");
    out.push_str("| case |");
    for m in &methods {
        out.push_str(&format!(" {} exec (s) |", m.as_str()));
    }
    for m in &methods {
        out.push_str(&format!(" {} status |", m.as_str()));
    }
    out.push('\n');
    out.push_str(&format!("|---:|{}", "---:|".repeat(2 * methods.len())));
    out.push('\n');
    for &case in &case_indices {
        out.push_str(&format!("| {case} |"));
        for m in &methods {
            out.push_str(&format!(
                " {} |",
                time_cell(find(records, case, *m), |r| r.exec_time_s)
            ));
        }
        for m in &methods {
            match find(records, case, *m) {
                Some(r) => out.push_str(&format!(" {} |", r.status.as_str())),
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}
