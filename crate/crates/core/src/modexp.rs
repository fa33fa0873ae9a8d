//! Builders for the controlled-multiplication layers of the period-finding
//! circuit, for base a = 2 on the cyclic work-register encoding.
//!
//! The work register holds a k-bit one-token pattern whose bit position is
//! the exponent of 2 in the current residue; multiplying by 2 is therefore
//! a cyclic shift of the register. Two builders are provided:
//!
//! * `build_sota`: the iterated swap cascade. Layer b repeats a (k-1)-swap
//!   cascade 2^b times, costing 2^b * (k-1) gates.
//! * `build_proposed`: classically computes the layer's multiplier m. When
//!   m = 1 the layer is empty; when m = 2^i for small i it is a single
//!   SWAP(0, i); otherwise it falls back to the cascade.

use num_bigint::BigUint;
use num_traits::One;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::numtheory::{mod_pow, pow2_exponent};

/// Widest circuit `effective_permutation` will tabulate (2^20 entries).
pub const MAX_PERMUTATION_WIDTH: usize = 20;

/// How the exponent of layer b is interpreted when computing its multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentConvention {
    /// Layer b multiplies by 2^(2^b) mod n: the standard iterated-squaring
    /// layering, under which the circuit computes 2^i mod n for counting
    /// value i.
    #[default]
    IteratedSquaring,
    /// Layer b multiplies by 2^b mod n, taking the published layer listing
    /// at face value.
    Literal,
}

impl ExponentConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ExponentConvention::IteratedSquaring => "iterated-squaring",
            ExponentConvention::Literal => "literal",
        }
    }
}

/// The classical multiplier applied by layer `b` for base 2 modulo `n`.
pub fn multiplier(b: u32, n: &BigUint, convention: ExponentConvention) -> Result<BigUint> {
    if *n < BigUint::from(3u32) {
        return Err(Error::Domain(format!("modulus must be >= 3, got {n}")));
    }
    let exponent = match convention {
        ExponentConvention::IteratedSquaring => BigUint::one() << b,
        ExponentConvention::Literal => BigUint::from(b),
    };
    mod_pow(&BigUint::from(2u32), &exponent, n)
}

/// What the shortcut builder decides to emit for one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerPlan {
    /// Multiplier is 1: the layer is a no-op.
    Identity,
    /// Multiplier is 2^i with 1 <= i <= k-2: one SWAP(0, i).
    TokenSwap { i: usize },
    /// Anything else: emit the full swap cascade for this layer.
    Fallback,
}

/// Classifies layer `b` for the shortcut builder without emitting gates.
pub fn plan_proposed(
    b: u32,
    k: usize,
    n: &BigUint,
    convention: ExponentConvention,
) -> Result<LayerPlan> {
    if k < 2 {
        return Err(Error::Domain(format!("work register needs k >= 2, got {k}")));
    }
    let m = multiplier(b, n, convention)?;
    if m.is_one() {
        return Ok(LayerPlan::Identity);
    }
    if let Some(i) = pow2_exponent(&m)? {
        let i = i as usize;
        if (1..=k.saturating_sub(2)).contains(&i) {
            return Ok(LayerPlan::TokenSwap { i });
        }
    }
    Ok(LayerPlan::Fallback)
}

/// Gate count of one cascade layer: 2^b * (k - 1).
pub fn sota_layer_gate_count(b: u32, k: usize) -> BigUint {
    (BigUint::one() << b) * BigUint::from(k - 1)
}

/// Total gate count over layers b = 0..k-1: (2^k - 1) * (k - 1).
pub fn sota_total_gate_count(k: usize) -> BigUint {
    ((BigUint::one() << k) - BigUint::one()) * BigUint::from(k - 1)
}

/// Builds layer `b` of the swap-cascade baseline on a k-qubit register:
/// 2^b repetitions of the cascade SWAP(k-i-2, k-i-1) for i = 0..k-1.
///
/// The gate count is checked against `gate_budget` before any allocation.
pub fn build_sota(b: u32, k: usize, gate_budget: u64) -> Result<Circuit> {
    if k < 2 {
        return Err(Error::Domain(format!("work register needs k >= 2, got {k}")));
    }
    let total = sota_layer_gate_count(b, k);
    if total > BigUint::from(gate_budget) {
        return Err(Error::Capacity(format!(
            "cascade layer b = {b}, k = {k} needs {total} gates, budget is {gate_budget}"
        )));
    }
    let mut c = Circuit::new(k)?;
    for _ in 0..(1u64 << b) {
        for i in 0..k - 1 {
            c.append(Gate::Swap(k - i - 2, k - i - 1))?;
        }
    }
    Ok(c)
}

/// Result of the shortcut builder for one layer.
#[derive(Debug, Clone)]
pub struct ProposedBuild {
    pub circuit: Circuit,
    pub plan: LayerPlan,
}

impl ProposedBuild {
    /// True when this layer could not be reduced and fell back to the
    /// cascade.
    pub fn used_fallback(&self) -> bool {
        matches!(self.plan, LayerPlan::Fallback)
    }
}

/// Emits the gate list a layer plan stands for.
pub fn materialize_plan(plan: LayerPlan, b: u32, k: usize, gate_budget: u64) -> Result<Circuit> {
    match plan {
        LayerPlan::Identity => Circuit::new(k),
        LayerPlan::TokenSwap { i } => {
            let mut c = Circuit::new(k)?;
            c.append(Gate::Swap(0, i))?;
            Ok(c)
        }
        LayerPlan::Fallback => build_sota(b, k, gate_budget),
    }
}

/// Builds layer `b` of the shortcut method: classically reduce the layer's
/// multiplier and emit zero gates, one SWAP, or the cascade fallback.
pub fn build_proposed(
    b: u32,
    k: usize,
    n: &BigUint,
    convention: ExponentConvention,
    gate_budget: u64,
) -> Result<ProposedBuild> {
    let plan = plan_proposed(b, k, n, convention)?;
    let circuit = materialize_plan(plan, b, k, gate_budget)?;
    Ok(ProposedBuild { circuit, plan })
}

/// Tabulates the basis-state permutation a circuit of X / SWAP / CSWAP gates
/// performs: `table[x]` is the image of basis state `x`.
pub fn effective_permutation(c: &Circuit) -> Result<Vec<u32>> {
    if c.width() > MAX_PERMUTATION_WIDTH {
        return Err(Error::Validation(format!(
            "effective_permutation supports width <= {MAX_PERMUTATION_WIDTH}, got {}",
            c.width()
        )));
    }
    for gate in c.gates() {
        if !gate.is_permutation() {
            return Err(Error::UnsupportedGate(format!(
                "effective_permutation requires permutation gates, found {gate:?}"
            )));
        }
    }
    Ok(permutation_table_unchecked(c))
}

/// Table walk without the width cap; callers guarantee the allocation fits.
fn permutation_table_unchecked(c: &Circuit) -> Vec<u32> {
    let size = 1usize << c.width();
    let mut table: Vec<u32> = (0..size as u32).collect();
    for gate in c.gates() {
        match *gate {
            Gate::X(t) => {
                let mask = 1u32 << t;
                for v in table.iter_mut() {
                    *v ^= mask;
                }
            }
            Gate::Swap(a, b) => {
                for v in table.iter_mut() {
                    let d = ((*v >> a) ^ (*v >> b)) & 1;
                    *v ^= (d << a) | (d << b);
                }
            }
            Gate::CSwap { control, a, b } => {
                for v in table.iter_mut() {
                    let d = ((*v >> a) ^ (*v >> b)) & (*v >> control) & 1;
                    *v ^= (d << a) | (d << b);
                }
            }
            // Unreachable when called through effective_permutation.
            ref g => unreachable!("non-permutation gate {g:?}"),
        }
    }
    table
}

/// Permutation of one cascade pass on k qubits (multiply-by-2 on the cyclic
/// token encoding). No width cap beyond available memory; the table has 2^k
/// entries.
pub fn cascade_permutation(k: usize) -> Result<Vec<u32>> {
    if !(2..=31).contains(&k) {
        return Err(Error::Domain(format!(
            "cascade permutation table needs 2 <= k <= 31, got {k}"
        )));
    }
    let mut c = Circuit::new(k)?;
    for i in 0..k - 1 {
        c.append(Gate::Swap(k - i - 2, k - i - 1))?;
    }
    Ok(permutation_table_unchecked(&c))
}

/// Composes a permutation table with itself `b` times, yielding the
/// 2^b-th power of the permutation in b passes instead of 2^b.
pub fn permutation_pow2(table: &[u32], b: u32) -> Vec<u32> {
    let mut current = table.to_vec();
    for _ in 0..b {
        let next: Vec<u32> = current.iter().map(|&v| current[v as usize]).collect();
        current = next;
    }
    current
}

/// Permutation table for one layer of the chosen method, computed without
/// materializing the layer's gate list. Equivalent to
/// `effective_permutation` of the built layer circuit.
pub fn layer_permutation(plan: LayerPlan, b: u32, k: usize) -> Result<Vec<u32>> {
    match plan {
        LayerPlan::Identity => Ok((0..(1u32 << k)).collect()),
        LayerPlan::TokenSwap { i } => {
            let mut c = Circuit::new(k)?;
            c.append(Gate::Swap(0, i))?;
            Ok(permutation_table_unchecked(&c))
        }
        LayerPlan::Fallback => Ok(permutation_pow2(&cascade_permutation(k)?, b)),
    }
}
