//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
///
/// The CLI maps these onto process exit codes: usage and validation problems
/// exit 64, capacity exhaustion exits 3 (as does a not-applicable run), and a
/// completed run that found no factor exits 2.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (for example `gcd(0, 0)` or a modulus below 2).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid use of an API (qubit index out of range,
    /// register mismatch, malformed report, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A gate reached a context that cannot represent it, e.g. controlling
    /// a non-SWAP gate or extracting a permutation from a non-permutation gate.
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    /// A configured resource budget (gate count or memory) would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The run needs more qubits than the configured limit allows.
    #[error("not applicable: {qubits} qubits > limit {limit}")]
    NotApplicable { qubits: u64, limit: u64 },

    /// Command-line misuse that is not caught by the argument parser itself.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn not_applicable_message_names_both_numbers() {
        let e = Error::NotApplicable {
            qubits: 32,
            limit: 31,
        };
        assert_eq!(e.to_string(), "not applicable: 32 qubits > limit 31");
    }

    #[test]
    fn io_errors_convert() {
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        let e: Error = io.into();
        assert!(matches!(e, Error::Io(_)));
    }
}
