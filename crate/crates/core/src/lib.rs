//! Quantum-circuit laboratory for Shor's algorithm.
//!
//! The crate simulates the order-finding core of Shor's algorithm for moduli
//! of the form n = 3 * (2^e + 1) with base a = 2, comparing two builders for
//! the controlled modular-exponentiation layers:
//!
//! * `sota`: each layer repeats a swap cascade, so layer b costs
//!   2^b * (k - 1) gates and the full circuit grows exponentially with the
//!   counting width k.
//! * `proposed`: each layer's multiplier is computed classically; layers
//!   reduce to a single token swap or the identity whenever the multiplier
//!   is a power of two, keeping the circuit linear in k.
//!
//! Both builders feed the same pipeline: Hadamard wall, controlled layers,
//! inverse quantum Fourier transform, measurement, continued-fraction
//! period extraction, and factor recovery. A dense state-vector backend
//! checks a permutation-aware FFT backend; `cli::run` exposes the lot as
//! the `shor-lab` binary.

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod modexp;
pub mod numtheory;
pub mod pipeline;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Single-precision dense state vector.
pub type StateVector32 = simulator::StateVector<f32>;
/// Double-precision dense state vector, the default for all pipelines.
pub type StateVector64 = simulator::StateVector<f64>;
