//! Dense statevector simulation, measurement sampling, the inverse-QFT
//! circuit, and an FFT-based exact distribution for permutation-layer
//! circuits.
//!
//! Qubit i corresponds to bit i of a basis-state index (little-endian), so
//! amplitude `amps[x]` belongs to the computational basis state labeled by
//! the integer `x`.

use std::collections::BTreeMap;
use std::ops::Range;

use num_complex::Complex;
use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense statevector over `width` qubits.
#[derive(Debug, Clone)]
pub struct StateVector<T: Scalar> {
    width: usize,
    amps: Vec<Complex<T>>,
}

/// Allocates the all-zeros state |0...0> after checking the amplitude array
/// fits in `memory_budget` bytes.
pub fn init_state<T: Scalar>(width: usize, memory_budget: u64) -> Result<StateVector<T>> {
    if width == 0 {
        return Err(Error::Domain("statevector needs width >= 1".into()));
    }
    let amp_bytes = std::mem::size_of::<Complex<T>>() as u128;
    let required: u128 = if width >= 128 {
        u128::MAX
    } else {
        amp_bytes.saturating_mul(1u128 << width)
    };
    if required > memory_budget as u128 {
        return Err(Error::Capacity(format!(
            "statevector of {width} qubits needs {required} bytes, budget is {memory_budget}"
        )));
    }
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1usize << width];
    amps[0] = Complex::new(T::one(), T::zero());
    Ok(StateVector { width, amps })
}

impl<T: Scalar> StateVector<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// L2 norm of the state; stays 1 under every gate here.
    pub fn norm(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    }

    /// Applies every gate of `c` in order. The circuit width must match the
    /// state width exactly.
    pub fn apply(&mut self, c: &Circuit) -> Result<()> {
        if c.width() != self.width {
            return Err(Error::Validation(format!(
                "circuit width {} does not match state width {}",
                c.width(),
                self.width
            )));
        }
        for gate in c.gates() {
            self.apply_gate(gate);
        }
        Ok(())
    }

    fn apply_gate(&mut self, gate: &Gate) {
        let size = self.amps.len();
        match *gate {
            Gate::H(t) => {
                let s = (T::one() + T::one()).sqrt().recip();
                let bit = 1usize << t;
                for base in (0..size).step_by(bit << 1) {
                    for lo in base..base + bit {
                        let hi = lo | bit;
                        let a = self.amps[lo];
                        let b = self.amps[hi];
                        self.amps[lo] = (a + b) * s;
                        self.amps[hi] = (a - b) * s;
                    }
                }
            }
            Gate::X(t) => {
                let bit = 1usize << t;
                for base in (0..size).step_by(bit << 1) {
                    for lo in base..base + bit {
                        self.amps.swap(lo, lo | bit);
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (ma, mb) = (1usize << a, 1usize << b);
                for i in 0..size {
                    if i & ma != 0 && i & mb == 0 {
                        self.amps.swap(i, i ^ ma ^ mb);
                    }
                }
            }
            Gate::CSwap { control, a, b } => {
                let (mc, ma, mb) = (1usize << control, 1usize << a, 1usize << b);
                for i in 0..size {
                    if i & mc != 0 && i & ma != 0 && i & mb == 0 {
                        self.amps.swap(i, i ^ ma ^ mb);
                    }
                }
            }
            Gate::Phase { target, angle } => {
                let phase = Complex::from_polar(T::one(), T::from_f64_lossy(angle));
                let mask = 1usize << target;
                for i in 0..size {
                    if i & mask != 0 {
                        self.amps[i] *= phase;
                    }
                }
            }
            Gate::CPhase {
                control,
                target,
                angle,
            } => {
                let phase = Complex::from_polar(T::one(), T::from_f64_lossy(angle));
                let mask = (1usize << control) | (1usize << target);
                for i in 0..size {
                    if i & mask == mask {
                        self.amps[i] *= phase;
                    }
                }
            }
        }
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of the qubits in `register` (half-open range),
    /// tracing out everything else.
    pub fn marginal(&self, register: Range<usize>) -> Result<Vec<T>> {
        self.check_register(&register)?;
        let w = register.end - register.start;
        let mask = (1usize << w) - 1;
        let mut probs = vec![T::zero(); 1usize << w];
        for (i, a) in self.amps.iter().enumerate() {
            probs[(i >> register.start) & mask] += a.norm_sqr();
        }
        Ok(probs)
    }

    fn check_register(&self, register: &Range<usize>) -> Result<()> {
        if register.start >= register.end {
            return Err(Error::Validation("measurement register is empty".into()));
        }
        if register.end > self.width {
            return Err(Error::Validation(format!(
                "register {}..{} exceeds state width {}",
                register.start, register.end, self.width
            )));
        }
        Ok(())
    }
}

/// Inverse quantum Fourier transform on qubits `offset..offset + k`:
/// the reversal swaps, then per target qubit the controlled phases
/// exp(-i pi / 2^(i-j)) followed by H.
pub fn iqft_circuit(k: usize, offset: usize) -> Result<Circuit> {
    if k == 0 {
        return Err(Error::Domain("iqft needs k >= 1".into()));
    }
    let mut c = Circuit::new(offset + k)?;
    for i in 0..k / 2 {
        c.append(Gate::Swap(offset + i, offset + k - 1 - i))?;
    }
    for i in 0..k {
        for j in 0..i {
            c.append(Gate::CPhase {
                control: offset + j,
                target: offset + i,
                angle: -std::f64::consts::PI / (1u64 << (i - j)) as f64,
            })?;
        }
        c.append(Gate::H(offset + i))?;
    }
    Ok(c)
}

/// Measurement record: how many of `shots` draws produced each outcome.
/// Keys are fixed-width bitstrings, most significant bit first; absent keys
/// mean zero observations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub register_width: usize,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    /// Formats `value` as a `width`-character bitstring, MSB first.
    pub fn bitstring(value: u64, width: usize) -> String {
        (0..width)
            .rev()
            .map(|b| if value >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Parses the keys back into integers, ascending.
    pub fn outcome_counts(&self) -> Result<Vec<(u64, u64)>> {
        let mut out = Vec::with_capacity(self.counts.len());
        for (key, &count) in &self.counts {
            if key.len() != self.register_width
                || key.bytes().any(|b| b != b'0' && b != b'1')
            {
                return Err(Error::Validation(format!(
                    "histogram key {key:?} is not a {}-bit bitstring",
                    self.register_width
                )));
            }
            let value = key
                .bytes()
                .fold(0u64, |acc, b| (acc << 1) | u64::from(b == b'1'));
            out.push((value, count));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// CSV rows `bitstring,count,probability`, keys ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count,probability\n");
        for (key, &count) in &self.counts {
            let p = count as f64 / self.shots as f64;
            out.push_str(&format!("{key},{count},{p}\n"));
        }
        out
    }

    /// Parses the `to_csv` format; shots are recovered as the count total.
    pub fn from_csv(text: &str) -> Result<Histogram> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut counts = BTreeMap::new();
        let mut width: Option<usize> = None;
        let mut shots = 0u64;
        for record in reader.records() {
            let record = record?;
            let key = record
                .get(0)
                .ok_or_else(|| Error::Validation("histogram row missing bitstring".into()))?
                .to_string();
            let count: u64 = record
                .get(1)
                .ok_or_else(|| Error::Validation("histogram row missing count".into()))?
                .parse()
                .map_err(|e| Error::Validation(format!("bad count: {e}")))?;
            match width {
                None => width = Some(key.len()),
                Some(w) if w != key.len() => {
                    return Err(Error::Validation(format!(
                        "inconsistent bitstring widths {w} and {}",
                        key.len()
                    )))
                }
                _ => {}
            }
            shots += count;
            counts.insert(key, count);
        }
        let register_width =
            width.ok_or_else(|| Error::Validation("histogram csv has no rows".into()))?;
        let h = Histogram {
            register_width,
            shots,
            counts,
        };
        h.outcome_counts()?;
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("static structure")
    }

    pub fn from_json(text: &str) -> Result<Histogram> {
        let h: Histogram = serde_json::from_str(text)?;
        h.outcome_counts()?;
        let total: u64 = h.counts.values().sum();
        if total != h.shots {
            return Err(Error::Validation(format!(
                "histogram counts sum to {total} but shots field says {}",
                h.shots
            )));
        }
        Ok(h)
    }
}

/// Draws `shots` outcomes from an explicit distribution over `width`-bit
/// values using a seeded ChaCha8 stream; identical inputs give identical
/// histograms.
pub fn sample_distribution<T: Scalar>(
    probs: &[T],
    width: usize,
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    if probs.len() != 1usize << width {
        return Err(Error::Validation(format!(
            "distribution has {} entries, expected 2^{width}",
            probs.len()
        )));
    }
    if shots == 0 {
        return Err(Error::Validation("sampling needs shots >= 1".into()));
    }
    let dist = WeightedIndex::new(probs.iter().cloned())
        .map_err(|e| Error::Validation(format!("invalid probability vector: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        *tallies.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    let counts = tallies
        .into_iter()
        .map(|(v, c)| (Histogram::bitstring(v as u64, width), c))
        .collect();
    Ok(Histogram {
        register_width: width,
        shots,
        counts,
    })
}

/// Measures the qubits in `register` of `state` for `shots` shots.
pub fn sample<T: Scalar>(
    state: &StateVector<T>,
    register: Range<usize>,
    shots: u64,
    seed: u64,
) -> Result<Histogram> {
    let width = register.end.saturating_sub(register.start);
    let probs = state.marginal(register)?;
    sample_distribution(&probs, width, shots, seed)
}

/// Exact counting-register distribution after the inverse QFT, computed
/// without a joint statevector.
///
/// `labels[i]` is the work-register value the permutation layers produce for
/// counting value `i`. Grouping counting values by label and Fourier
/// transforming each group's indicator vector gives
/// `P(y) = (1/4^k) * sum_f |sum_{i in group f} e^(-2 pi i * i y / 2^k)|^2`.
pub fn exact_distribution_fast<T: Scalar>(k: usize, labels: &[u32]) -> Result<Vec<T>> {
    if k == 0 || k > 30 {
        return Err(Error::Domain(format!(
            "fast distribution supports 1 <= k <= 30, got {k}"
        )));
    }
    let size = 1usize << k;
    if labels.len() != size {
        return Err(Error::Validation(format!(
            "labels has {} entries, expected 2^{k}",
            labels.len()
        )));
    }

    // Deterministic group order keeps float accumulation reproducible.
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &label) in labels.iter().enumerate() {
        groups.entry(label).or_default().push(i);
    }

    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(size);
    let mut probs = vec![T::zero(); size];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); size];
    for indices in groups.values() {
        buf.fill(Complex::new(T::zero(), T::zero()));
        for &i in indices {
            buf[i] = Complex::new(T::one(), T::zero());
        }
        fft.process(&mut buf);
        for (p, v) in probs.iter_mut().zip(&buf) {
            *p += v.norm_sqr();
        }
    }

    // Normalize by 4^k = (2^k)^2: 2^k from the initial Hadamards and 2^k
    // from the inverse QFT.
    let norm = T::from_f64_lossy((size as f64) * (size as f64)).recip();
    for p in probs.iter_mut() {
        *p *= norm;
    }
    Ok(probs)
}
