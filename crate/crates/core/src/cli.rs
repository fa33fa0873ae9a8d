//! Command-line interface: `factor`, `bench`, `cases`, and `selftest`.
//!
//! Exit codes: 0 success, 2 completed-but-negative (no factor found, failed
//! selftest check, benchmark run that could not complete a case), 3 run not
//! applicable or over capacity, 64 usage or validation problems.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use crate::bench::{
    emit_report, run_bench, BenchOptions, BenchStatus, ReportFormat, DEFAULT_QUBIT_LIMIT,
};
use crate::error::{Error, Result};
use crate::modexp::ExponentConvention;
use crate::numtheory::{case_catalog, catalog_lookup, catalog_to_json, FactoringCase};
use crate::pipeline::{
    counting_distribution, run_shor, Backend, FactoringResult, Method, RunStatus, ShorConfig,
    DEFAULT_MEMORY_BUDGET, DEFAULT_SHOTS,
};
use crate::simulator::{init_state, iqft_circuit};

/// Environment variable overriding the default memory budget (bytes).
pub const MEMORY_BUDGET_ENV: &str = "SHOR_LAB_MEMORY_BUDGET";

#[derive(Parser)]
#[command(
    name = "shor-lab",
    version,
    about = "Quantum-circuit laboratory for Shor's algorithm with interchangeable modular-exponentiation builders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor an odd composite with the period-finding pipeline
    Factor {
        /// Modulus to factor, in decimal
        n: String,
        /// Circuit builder: proposed | sota
        #[arg(long, default_value = "proposed")]
        method: String,
        /// Counting-register width (defaults from the catalog when n matches a case)
        #[arg(long)]
        k: Option<usize>,
        /// Measurement shots
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        /// Sampling seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Simulation backend: auto | dense | fast
        #[arg(long, default_value = "auto")]
        backend: String,
        /// Layer exponent convention: iterated-squaring | literal
        #[arg(long, default_value = "iterated-squaring")]
        convention: String,
        /// Refuse runs needing more qubits than this
        #[arg(long)]
        qubit_limit: Option<u64>,
        /// Simulator memory budget in bytes (overrides SHOR_LAB_MEMORY_BUDGET)
        #[arg(long)]
        memory_budget: Option<u64>,
        /// Format for --out: json (result document) | csv (histogram)
        #[arg(long, default_value = "json")]
        format: String,
        /// Write the result document or histogram to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark catalog cases under both builders
    Bench {
        /// Case selection, e.g. 1-12 or 1,3,5
        #[arg(long, default_value = "1-12")]
        cases: String,
        /// Comma-separated methods to run: proposed,sota
        #[arg(long, default_value = "proposed,sota")]
        methods: String,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Runs needing more qubits than this are recorded NOT_APPLICABLE
        #[arg(long, default_value_t = DEFAULT_QUBIT_LIMIT)]
        qubit_limit: u64,
        /// Simulator memory budget in bytes (overrides SHOR_LAB_MEMORY_BUDGET)
        #[arg(long)]
        memory_budget: Option<u64>,
        /// Simulation backend: auto | dense | fast
        #[arg(long, default_value = "auto")]
        backend: String,
        /// Layer exponent convention: iterated-squaring | literal
        #[arg(long, default_value = "iterated-squaring")]
        convention: String,
        /// Report format: markdown | csv | json
        #[arg(long, default_value = "markdown")]
        format: String,
        /// Write the report to this path instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the benchmark case catalog
    Cases {
        /// Output format: table | json
        #[arg(long, default_value = "table")]
        format: String,
        /// Print full moduli instead of truncating long ones
        #[arg(long)]
        full: bool,
        /// Write the catalog to this path instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant checks
    Selftest,
}

/// Parses `args` and executes; returns the process exit code. Normal output
/// goes to `out`, errors to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Factor {
            n,
            method,
            k,
            shots,
            seed,
            backend,
            convention,
            qubit_limit,
            memory_budget,
            format,
            out: out_path,
        } => cmd_factor(
            out,
            &n,
            &method,
            k,
            shots,
            seed,
            &backend,
            &convention,
            qubit_limit,
            memory_budget,
            &format,
            out_path.as_deref(),
        ),
        Command::Bench {
            cases,
            methods,
            shots,
            seed,
            qubit_limit,
            memory_budget,
            backend,
            convention,
            format,
            out: out_path,
        } => cmd_bench(
            out,
            &cases,
            &methods,
            shots,
            seed,
            qubit_limit,
            memory_budget,
            &backend,
            &convention,
            &format,
            out_path.as_deref(),
        ),
        Command::Cases {
            format,
            full,
            out: out_path,
        } => cmd_cases(out, &format, full, out_path.as_deref()),
        Command::Selftest => cmd_selftest(out),
    };
    match outcome {
        Ok(code) => code,
        // A reader that stopped consuming our output is not a failure.
        Err(Error::Io(io)) if io.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NotApplicable { .. } | Error::Capacity(_) => 3,
                _ => 64,
            }
        }
    }
}

fn memory_budget_or_default(flag: Option<u64>) -> Result<u64> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(MEMORY_BUDGET_ENV) {
        Ok(text) => text.parse::<u64>().map_err(|e| {
            Error::Usage(format!("{MEMORY_BUDGET_ENV} must be a byte count: {e}"))
        }),
        Err(_) => Ok(DEFAULT_MEMORY_BUDGET),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_factor(
    out: &mut dyn Write,
    n_text: &str,
    method: &str,
    k: Option<usize>,
    shots: u64,
    seed: u64,
    backend: &str,
    convention: &str,
    qubit_limit: Option<u64>,
    memory_budget: Option<u64>,
    format: &str,
    out_path: Option<&std::path::Path>,
) -> Result<i32> {
    let file_format = ReportFileFormat::from_str(format)?;
    let n: BigUint = n_text
        .parse()
        .map_err(|e| Error::Usage(format!("n must be a decimal integer: {e}")))?;
    if n < BigUint::from(15u32) {
        return Err(Error::Usage(format!("n must be >= 15, got {n}")));
    }
    let method = Method::from_str(method)?;
    let backend = Backend::from_str(backend)?;
    let convention = ExponentConvention::from_str(convention)?;
    let case = catalog_lookup(&n);
    let k = match (k, &case) {
        (Some(k), _) => k,
        (None, Some(case)) => match method {
            Method::Proposed => case.k_proposed,
            Method::Sota => case.k_sota,
        },
        (None, None) => {
            return Err(Error::Usage(format!(
                "{n} is not a catalog modulus; pass --k explicitly"
            )))
        }
    };

    let mut cfg = ShorConfig::new(method, k);
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.backend = backend;
    cfg.convention = convention;
    cfg.qubit_limit = qubit_limit;
    cfg.memory_budget = memory_budget_or_default(memory_budget)?;
    let res = run_shor::<f64>(&n, &cfg)?;

    // The file lands before the summary so a closed stdout cannot lose it.
    if let Some(path) = out_path {
        let payload = match file_format {
            ReportFileFormat::Json => res.to_json_string(),
            ReportFileFormat::Csv => res.histogram.to_csv(),
        };
        std::fs::write(path, payload)?;
    }
    print_factor_summary(out, &res)?;
    if let Some(path) = out_path {
        let _ = writeln!(out, "wrote {}", path.display());
    }

    Ok(match res.status {
        RunStatus::Success => 0,
        RunStatus::NoFactor => 2,
        RunStatus::NotApplicable | RunStatus::Capacity => 3,
    })
}

/// What `factor --out` writes.
enum ReportFileFormat {
    Json,
    Csv,
}

impl FromStr for ReportFileFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFileFormat::Json),
            "csv" => Ok(ReportFileFormat::Csv),
            other => Err(Error::Usage(format!(
                "unknown factor output format {other:?} (expected json or csv)"
            ))),
        }
    }
}

fn print_factor_summary(out: &mut dyn Write, res: &FactoringResult) -> Result<()> {
    writeln!(out, "n = {}", res.n)?;
    writeln!(
        out,
        "method = {} (k = {}, qubits = {}, convention = {})",
        res.method.as_str(),
        res.k,
        res.qubits,
        res.convention.as_str()
    )?;
    match res.backend {
        Some(b) => writeln!(
            out,
            "backend = {}, shots = {}, seed = {}",
            b.as_str(),
            res.shots,
            res.seed
        )?,
        None => writeln!(out, "backend = none (run did not start)")?,
    }
    if let Some(fallbacks) = res.fallback_layers {
        writeln!(out, "fallback layers = {fallbacks}")?;
    }
    writeln!(out, "status = {}", res.status.as_str())?;
    if let Some(detail) = &res.detail {
        writeln!(out, "detail: {detail}")?;
    }
    for cand in res.candidates.iter().take(3) {
        writeln!(
            out,
            "candidate: y = {} -> {}/{} (r = {}, count = {})",
            cand.y, cand.numerator, cand.denominator, cand.denominator, cand.count
        )?;
    }
    if let Some(r) = res.r_selected {
        writeln!(out, "r = {r}")?;
    }
    if let Some(pair) = &res.factors {
        writeln!(out, "factors: p = {}, q = {}", pair.p, pair.q)?;
    }
    writeln!(out, "generation time = {:.6} s", res.gen_time_s)?;
    writeln!(out, "execution time = {:.6} s", res.exec_time_s)?;
    Ok(())
}

/// Parses selections like "3", "1-4", "1,3,8-10" into sorted unique indices.
fn parse_case_selection(text: &str, max_index: u32) -> Result<Vec<u32>> {
    let mut indices = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(Error::Usage(format!("empty case selector in {text:?}")));
        }
        let bounds: Vec<&str> = part.splitn(2, '-').collect();
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|e| Error::Usage(format!("bad case index {s:?}: {e}")))
        };
        let (lo, hi) = match bounds.as_slice() {
            [single] => {
                let v = parse(single)?;
                (v, v)
            }
            [lo, hi] => (parse(lo)?, parse(hi)?),
            _ => unreachable!("splitn(2) yields at most two pieces"),
        };
        if lo > hi {
            return Err(Error::Usage(format!("descending case range {part:?}")));
        }
        for i in lo..=hi {
            if i == 0 || i > max_index {
                return Err(Error::Usage(format!(
                    "case index {i} outside 1..={max_index}"
                )));
            }
            indices.push(i);
        }
    }
    indices.sort_unstable();
    indices.dedup();
    Ok(indices)
}

fn parse_methods(text: &str) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for part in text.split(',') {
        let m = Method::from_str(part.trim())?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(Error::Usage("no methods selected".into()));
    }
    Ok(methods)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    out: &mut dyn Write,
    cases_text: &str,
    methods_text: &str,
    shots: u64,
    seed: u64,
    qubit_limit: u64,
    memory_budget: Option<u64>,
    backend: &str,
    convention: &str,
    format: &str,
    out_path: Option<&std::path::Path>,
) -> Result<i32> {
    let catalog = case_catalog();
    let indices = parse_case_selection(cases_text, catalog.len() as u32)?;
    let selected: Vec<FactoringCase> = catalog
        .into_iter()
        .filter(|c| indices.contains(&c.index))
        .collect();
    let opts = BenchOptions {
        methods: parse_methods(methods_text)?,
        shots,
        seed,
        qubit_limit: Some(qubit_limit),
        memory_budget: memory_budget_or_default(memory_budget)?,
        backend: Backend::from_str(backend)?,
        convention: ExponentConvention::from_str(convention)?,
        ..BenchOptions::default()
    };
    let format = ReportFormat::from_str(format)?;
    let records = run_bench(&selected, &opts)?;
    let report = emit_report(&records, format)?;
    match out_path {
        Some(path) => {
            std::fs::write(path, &report)?;
            let _ = writeln!(out, "wrote {} records to {}", records.len(), path.display());
        }
        None => {
            let _ = write!(out, "{report}");
        }
    }
    let all_expected = records
        .iter()
        .all(|r| matches!(r.status, BenchStatus::Ok | BenchStatus::NotApplicable));
    Ok(if all_expected { 0 } else { 2 })
}

fn cmd_cases(
    out: &mut dyn Write,
    format: &str,
    full: bool,
    out_path: Option<&std::path::Path>,
) -> Result<i32> {
    let catalog = case_catalog();
    let text = match format {
        "json" => catalog_to_json(&catalog),
        "table" => render_case_table(&catalog, full),
        other => {
            return Err(Error::Usage(format!(
                "unknown cases format {other:?} (expected table or json)"
            )))
        }
    };
    match out_path {
        Some(path) => {
            std::fs::write(path, &text)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
        None => {
            let _ = write!(out, "{text}");
            if !text.ends_with('\n') {
                let _ = writeln!(out);
            }
        }
    }
    Ok(0)
}

fn render_case_table(catalog: &[FactoringCase], full: bool) -> String {
    let mut rows = vec![format!(
        "{:<6} {:<6} {:<10} {:<7} {:<11} {:<7} {:<11} {}",
        "index", "e", "bits(n)", "k_prop", "k_sota", "r", "label_bits", "n"
    )];
    for c in catalog {
        let n_text = c.n.to_string();
        let shown = if full || n_text.len() <= 24 {
            n_text
        } else {
            format!("{}...({} digits)", &n_text[..12], n_text.len())
        };
        rows.push(format!(
            "{:<6} {:<6} {:<10} {:<7} {:<11} {:<7} {:<11} {}",
            c.index, c.e, c.bits_of_n, c.k_proposed, c.k_sota, c.expected_r, c.label_bits, shown
        ));
    }
    rows.join("\n") + "\n"
}

/// One named invariant check.
struct Check {
    module: &'static str,
    name: String,
    run: Box<dyn Fn() -> std::result::Result<(), String>>,
}

fn selftest_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    for k in 1..=6usize {
        checks.push(Check {
            module: "simulator",
            name: format!("iqft_matches_dft_k{k}"),
            run: Box::new(move || check_iqft_matches_dft(k)),
        });
    }
    checks.push(Check {
        module: "simulator",
        name: "backend_agreement_n15_k4".into(),
        run: Box::new(|| check_backend_agreement(15u32.into(), 4)),
    });
    checks.push(Check {
        module: "simulator",
        name: "backend_agreement_n51_k8".into(),
        run: Box::new(|| check_backend_agreement(51u32.into(), 8)),
    });
    checks.push(Check {
        module: "pipeline",
        name: "golden_n15".into(),
        run: Box::new(check_golden_n15),
    });
    checks.push(Check {
        module: "pipeline",
        name: "golden_n771".into(),
        run: Box::new(check_golden_n771),
    });
    checks
}

fn cmd_selftest(out: &mut dyn Write) -> Result<i32> {
    let checks = selftest_checks();
    let mut failures = 0usize;
    for check in &checks {
        match (check.run)() {
            Ok(()) => {
                let _ = writeln!(out, "ok   {}::{}", check.module, check.name);
            }
            Err(msg) => {
                failures += 1;
                let _ = writeln!(out, "FAIL {}::{}: {msg}", check.module, check.name);
            }
        }
    }
    let _ = writeln!(
        out,
        "{} checks, {} passed, {} failed",
        checks.len(),
        checks.len() - failures,
        failures
    );
    Ok(if failures == 0 { 0 } else { 2 })
}

fn check_iqft_matches_dft(k: usize) -> std::result::Result<(), String> {
    use crate::circuit::{Circuit, Gate};
    let circuit = iqft_circuit(k, 0).map_err(|e| e.to_string())?;
    let size = 1usize << k;
    let scale = 1.0 / (size as f64).sqrt();
    for j in 0..size {
        let mut state = init_state::<f64>(k, u64::MAX).map_err(|e| e.to_string())?;
        let mut prep = Circuit::new(k).map_err(|e| e.to_string())?;
        for b in 0..k {
            if j >> b & 1 == 1 {
                prep.append(Gate::X(b)).map_err(|e| e.to_string())?;
            }
        }
        state.apply(&prep).map_err(|e| e.to_string())?;
        state.apply(&circuit).map_err(|e| e.to_string())?;
        if (state.norm() - 1.0).abs() > 1e-9 {
            return Err(format!("norm drifted to {}", state.norm()));
        }
        for (y, amp) in state.amplitudes().iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * (j as f64) * (y as f64) / size as f64;
            let expected = num_complex::Complex::new(angle.cos() * scale, angle.sin() * scale);
            let err = (amp - expected).norm();
            if err > 1e-9 {
                return Err(format!("entry ({y}, {j}) off by {err}"));
            }
        }
    }
    Ok(())
}

fn check_backend_agreement(n: BigUint, k: usize) -> std::result::Result<(), String> {
    let mut cfg = ShorConfig::new(Method::Proposed, k);
    cfg.backend = Backend::Dense;
    let dense = counting_distribution::<f64>(&n, &cfg).map_err(|e| e.to_string())?;
    cfg.backend = Backend::Fast;
    let fast = counting_distribution::<f64>(&n, &cfg).map_err(|e| e.to_string())?;
    for (y, (d, f)) in dense.iter().zip(&fast).enumerate() {
        if (d - f).abs() > 1e-9 {
            return Err(format!("y = {y}: dense {d} vs fast {f}"));
        }
    }
    Ok(())
}

fn check_golden_n15() -> std::result::Result<(), String> {
    let n = BigUint::from(15u32);
    let cfg = ShorConfig::new(Method::Proposed, 4);
    let res = run_shor::<f64>(&n, &cfg).map_err(|e| e.to_string())?;
    if res.status != RunStatus::Success {
        return Err(format!("status {}", res.status.as_str()));
    }
    let pair = res.factors.ok_or("no factors")?;
    if (pair.p.clone(), pair.q.clone()) != (3u32.into(), 5u32.into()) {
        return Err(format!("factors ({}, {})", pair.p, pair.q));
    }
    let probs = counting_distribution::<f64>(&n, &cfg).map_err(|e| e.to_string())?;
    let expected = [
        0.375, 0.0, 0.0, 0.0, 0.125, 0.0, 0.0, 0.0, 0.375, 0.0, 0.0, 0.0, 0.125, 0.0, 0.0, 0.0,
    ];
    for (y, (got, want)) in probs.iter().zip(&expected).enumerate() {
        if (got - want).abs() > 1e-9 {
            return Err(format!("P({y}) = {got}, expected {want}"));
        }
    }
    Ok(())
}

fn check_golden_n771() -> std::result::Result<(), String> {
    let n = BigUint::from(771u32);
    let cfg = ShorConfig::new(Method::Proposed, 12);
    let res = run_shor::<f64>(&n, &cfg).map_err(|e| e.to_string())?;
    if res.status != RunStatus::Success {
        return Err(format!("status {}", res.status.as_str()));
    }
    let pair = res.factors.ok_or("no factors")?;
    if (pair.p.clone(), pair.q.clone()) != (3u32.into(), 257u32.into()) {
        return Err(format!("factors ({}, {})", pair.p, pair.q));
    }
    let probs = counting_distribution::<f64>(&n, &cfg).map_err(|e| e.to_string())?;
    for (y, p) in probs.iter().enumerate() {
        if y % 256 == 0 {
            // Comb weights derived by summing each work-label coset's DFT:
            // cosets are the residue classes mod 16 that share a token path.
            let m = y / 256;
            let mut expected = 0.0078125;
            if m % 2 == 0 {
                expected += 0.015625;
            }
            if m % 4 == 0 {
                expected += 0.0625;
            }
            if m % 8 == 0 {
                expected += 0.25;
            }
            if (p - expected).abs() > 1e-9 {
                return Err(format!("P({y}) = {p}, expected {expected}"));
            }
        } else if *p > 1e-12 {
            return Err(format!("off-support {y} has weight {p}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String) {
        let mut buf: Vec<u8> = Vec::new();
        let mut argv = vec!["shor-lab"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn factor_15_succeeds() {
        let (code, out) = run_cli(&["factor", "15"]);
        assert_eq!(code, 0, "output:\n{out}");
        assert!(out.contains("status = SUCCESS"));
        assert!(out.contains("factors: p = 3, q = 5"));
    }

    #[test]
    fn factor_771_defaults_k_from_catalog() {
        let (code, out) = run_cli(&["factor", "771", "--seed", "42"]);
        assert_eq!(code, 0);
        assert!(out.contains("method = proposed (k = 12, qubits = 24"));
        assert!(out.contains("factors: p = 3, q = 257"));
    }

    #[test]
    fn factor_sota_against_qubit_limit_exits_3() {
        let (code, out) = run_cli(&[
            "factor",
            "771",
            "--method",
            "sota",
            "--qubit-limit",
            "31",
        ]);
        assert_eq!(code, 3);
        assert!(out.contains("status = NOT_APPLICABLE"));
        assert!(out.contains("not applicable: 32 qubits > limit 31"));
    }

    #[test]
    fn factor_sota_without_limit_succeeds_on_fast_backend() {
        let (code, out) = run_cli(&["factor", "771", "--method", "sota", "--shots", "2000"]);
        assert_eq!(code, 0, "output:\n{out}");
        assert!(out.contains("method = sota (k = 16, qubits = 32"));
        assert!(out.contains("factors: p = 3, q = 257"));
    }

    #[test]
    fn factor_usage_errors_exit_64() {
        assert_eq!(run_cli(&["factor", "banana"]).0, 64);
        assert_eq!(run_cli(&["factor", "9"]).0, 64);
        assert_eq!(run_cli(&["factor", "35"]).0, 64); // not in catalog, no --k
        assert_eq!(run_cli(&["factor", "15", "--method", "best"]).0, 64);
        assert_eq!(run_cli(&["factor", "15", "--backend", "gpu"]).0, 64);
        assert_eq!(run_cli(&["factor", "15", "--bogus-flag"]).0, 64);
        assert_eq!(run_cli(&["factor", "15", "--shots", "0"]).0, 64);
        assert_eq!(run_cli(&["factor", "15", "--format", "xml"]).0, 64);
    }

    #[test]
    fn factor_with_explicit_k_runs_off_catalog() {
        let (code, out) = run_cli(&["factor", "35", "--k", "6", "--shots", "500"]);
        // 35 = 5 * 7; period finding with base 2 can fail or succeed, but
        // the run itself must complete with a valid exit code.
        assert!(code == 0 || code == 2, "code {code}, output:\n{out}");
    }

    #[test]
    fn factor_dense_backend_matches_fast_result() {
        let (code_fast, out_fast) =
            run_cli(&["factor", "15", "--backend", "fast", "--seed", "9"]);
        let (code_dense, out_dense) =
            run_cli(&["factor", "15", "--backend", "dense", "--seed", "9"]);
        assert_eq!((code_fast, code_dense), (0, 0));
        assert!(out_fast.contains("backend = fast"));
        assert!(out_dense.contains("backend = dense"));
        for out in [&out_fast, &out_dense] {
            assert!(out.contains("factors: p = 3, q = 5"));
        }
    }

    #[test]
    fn bench_single_case_markdown() {
        let (code, out) = run_cli(&["bench", "--cases", "1", "--shots", "300"]);
        assert_eq!(code, 0, "output:\n{out}");
        assert!(out.contains("| case | proposed qubits | sota qubits |"));
        assert!(out.contains("| 1 | 8 | 8 |"));
    }

    #[test]
    fn bench_case3_sota_is_not_applicable_but_exit_0() {
        let (code, out) = run_cli(&[
            "bench",
            "--cases",
            "3",
            "--methods",
            "sota",
            "--shots",
            "100",
        ]);
        assert_eq!(code, 0, "output:\n{out}");
        assert!(out.contains("NOT_APPLICABLE"));
        assert!(out.contains("32"));
    }

    #[test]
    fn bench_csv_format() {
        let (code, out) = run_cli(&[
            "bench",
            "--cases",
            "1-2",
            "--methods",
            "proposed",
            "--shots",
            "200",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("case,method,qubits,gen_time_s,exec_time_s,shots,status"));
        assert!(out.contains("1,proposed,8,"));
        assert!(out.contains("2,proposed,16,"));
    }

    #[test]
    fn bench_usage_errors_exit_64() {
        assert_eq!(run_cli(&["bench", "--cases", "0"]).0, 64);
        assert_eq!(run_cli(&["bench", "--cases", "1-99"]).0, 64);
        assert_eq!(run_cli(&["bench", "--cases", "5-2"]).0, 64);
        assert_eq!(run_cli(&["bench", "--methods", "warp"]).0, 64);
        assert_eq!(run_cli(&["bench", "--format", "xml"]).0, 64);
    }

    #[test]
    fn cases_table_lists_all_12() {
        let (code, out) = run_cli(&["cases"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 13); // header + 12 rows
        assert!(out.contains("771"));
        assert!(out.contains("digits)")); // long moduli truncated
    }

    #[test]
    fn cases_full_and_json() {
        let (_, out) = run_cli(&["cases", "--full"]);
        assert!(out.contains("55340232221128654851"));
        let (code, out) = run_cli(&["cases", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 12);
        assert_eq!(run_cli(&["cases", "--format", "yaml"]).0, 64);
    }

    #[test]
    fn selftest_passes_and_names_checks() {
        let (code, out) = run_cli(&["selftest"]);
        assert_eq!(code, 0, "output:\n{out}");
        assert!(out.contains("ok   simulator::iqft_matches_dft_k3"));
        assert!(out.contains("ok   simulator::backend_agreement_n51_k8"));
        assert!(out.contains("ok   pipeline::golden_n771"));
        assert!(out.contains("0 failed"));
    }

    #[test]
    fn help_and_version_exit_0() {
        assert_eq!(run_cli(&["--help"]).0, 0);
        assert_eq!(run_cli(&["--version"]).0, 0);
        assert_eq!(run_cli(&["factor", "--help"]).0, 0);
    }

    #[test]
    fn no_subcommand_is_usage_error() {
        assert_eq!(run_cli(&[]).0, 64);
    }

    #[test]
    fn broken_stdout_pipe_exits_clean() {
        struct ClosedPipe;
        impl Write for ClosedPipe {
            fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
                Err(std::io::ErrorKind::BrokenPipe.into())
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let code = run(["shor-lab", "factor", "15"], &mut ClosedPipe);
        assert_eq!(code, 0);
    }

    #[test]
    fn case_selection_parser() {
        assert_eq!(parse_case_selection("1-3", 12).unwrap(), vec![1, 2, 3]);
        assert_eq!(
            parse_case_selection("5,1,3-4,5", 12).unwrap(),
            vec![1, 3, 4, 5]
        );
        assert!(parse_case_selection("0", 12).is_err());
        assert!(parse_case_selection("13", 12).is_err());
        assert!(parse_case_selection("", 12).is_err());
        assert!(parse_case_selection("2-1", 12).is_err());
    }

    #[test]
    fn methods_parser() {
        assert_eq!(
            parse_methods("proposed,sota").unwrap(),
            vec![Method::Proposed, Method::Sota]
        );
        assert_eq!(parse_methods("sota").unwrap(), vec![Method::Sota]);
        assert!(parse_methods("sota,warp").is_err());
    }
}
