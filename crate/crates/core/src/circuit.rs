//! Gate-list circuit representation.
//!
//! A circuit is a qubit width plus an ordered list of gates drawn from the
//! small set the laboratory needs: H, X, SWAP, controlled SWAP, and (for the
//! inverse QFT) PHASE / controlled PHASE. Gate angles are stored as `f64`
//! and narrowed to the simulation scalar on application.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One gate. Qubit indices are 0-based; index 0 is the least significant
/// bit of a basis-state label.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Swap(usize, usize),
    CSwap { control: usize, a: usize, b: usize },
    Phase { target: usize, angle: f64 },
    CPhase { control: usize, target: usize, angle: f64 },
}

impl Gate {
    /// All qubit indices the gate touches, control first where applicable.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(t) | Gate::X(t) | Gate::Phase { target: t, .. } => vec![t],
            Gate::Swap(a, b) => vec![a, b],
            Gate::CSwap { control, a, b } => vec![control, a, b],
            Gate::CPhase {
                control, target, ..
            } => vec![control, target],
        }
    }

    /// True when the gate permutes basis states (no amplitude mixing).
    pub fn is_permutation(&self) -> bool {
        matches!(self, Gate::X(_) | Gate::Swap(..) | Gate::CSwap { .. })
    }

    fn kind(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::X(_) => "x",
            Gate::Swap(..) => "swap",
            Gate::CSwap { .. } => "cswap",
            Gate::Phase { .. } => "phase",
            Gate::CPhase { .. } => "cphase",
        }
    }
}

/// An ordered gate list over `width` qubits. Gates are validated as they are
/// appended; a failed append leaves the circuit untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::Domain("circuit width must be >= 1".into()));
        }
        Ok(Circuit {
            width,
            gates: Vec::new(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Appends one gate after checking its indices are in range and distinct.
    pub fn append(&mut self, gate: Gate) -> Result<()> {
        let qubits = gate.qubits();
        for &q in &qubits {
            if q >= self.width {
                return Err(Error::Validation(format!(
                    "gate {:?} uses qubit {q} but circuit width is {}",
                    gate, self.width
                )));
            }
        }
        for (i, &a) in qubits.iter().enumerate() {
            if qubits[i + 1..].contains(&a) {
                return Err(Error::Validation(format!(
                    "gate {:?} uses qubit {a} more than once",
                    gate
                )));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other` (which must not be wider than `self`).
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.width > self.width {
            return Err(Error::Validation(format!(
                "cannot extend width-{} circuit with width-{} circuit",
                self.width, other.width
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Returns a copy of the circuit with every SWAP promoted to a CSWAP on
    /// `ctrl`. The result is wide enough to contain `ctrl`. Only SWAP-only
    /// circuits can be controlled; `ctrl` must not collide with any operand.
    pub fn control(&self, ctrl: usize) -> Result<Circuit> {
        let mut out = Circuit::new(self.width.max(ctrl + 1))?;
        for gate in &self.gates {
            match *gate {
                Gate::Swap(a, b) => {
                    if ctrl == a || ctrl == b {
                        return Err(Error::Validation(format!(
                            "control qubit {ctrl} collides with swap ({a}, {b})"
                        )));
                    }
                    out.append(Gate::CSwap { control: ctrl, a, b })?;
                }
                ref g => {
                    return Err(Error::UnsupportedGate(format!(
                        "cannot control a {} gate",
                        g.kind()
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Returns a copy with every qubit index shifted up by `offset`, placed
    /// in a circuit of `new_width` qubits.
    pub fn embedded(&self, offset: usize, new_width: usize) -> Result<Circuit> {
        let mut out = Circuit::new(new_width)?;
        for gate in &self.gates {
            let shifted = match *gate {
                Gate::H(t) => Gate::H(t + offset),
                Gate::X(t) => Gate::X(t + offset),
                Gate::Swap(a, b) => Gate::Swap(a + offset, b + offset),
                Gate::CSwap { control, a, b } => Gate::CSwap {
                    control: control + offset,
                    a: a + offset,
                    b: b + offset,
                },
                Gate::Phase { target, angle } => Gate::Phase {
                    target: target + offset,
                    angle,
                },
                Gate::CPhase {
                    control,
                    target,
                    angle,
                } => Gate::CPhase {
                    control: control + offset,
                    target: target + offset,
                    angle,
                },
            };
            out.append(shifted)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let repr = CircuitRepr {
            width: self.width,
            gates: self.gates.iter().map(GateRepr::from).collect(),
        };
        serde_json::to_string_pretty(&repr).expect("static structure")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let repr: CircuitRepr = serde_json::from_str(text)?;
        let mut out = Circuit::new(repr.width)?;
        for g in repr.gates {
            out.append(g.into_gate()?)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    width: usize,
    gates: Vec<GateRepr>,
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl From<&Gate> for GateRepr {
    fn from(gate: &Gate) -> Self {
        let angle = match *gate {
            Gate::Phase { angle, .. } | Gate::CPhase { angle, .. } => Some(angle),
            _ => None,
        };
        GateRepr {
            kind: gate.kind().to_string(),
            qubits: gate.qubits(),
            angle,
        }
    }
}

impl GateRepr {
    fn into_gate(self) -> Result<Gate> {
        let q = &self.qubits;
        let arity_err = || {
            Error::Validation(format!(
                "gate kind {:?} with {} qubit(s) is malformed",
                self.kind,
                q.len()
            ))
        };
        let angle = || self.angle.ok_or_else(|| {
            Error::Validation(format!("gate kind {:?} requires an angle", self.kind))
        });
        match self.kind.as_str() {
            "h" if q.len() == 1 => Ok(Gate::H(q[0])),
            "x" if q.len() == 1 => Ok(Gate::X(q[0])),
            "swap" if q.len() == 2 => Ok(Gate::Swap(q[0], q[1])),
            "cswap" if q.len() == 3 => Ok(Gate::CSwap {
                control: q[0],
                a: q[1],
                b: q[2],
            }),
            "phase" if q.len() == 1 => Ok(Gate::Phase {
                target: q[0],
                angle: angle()?,
            }),
            "cphase" if q.len() == 2 => Ok(Gate::CPhase {
                control: q[0],
                target: q[1],
                angle: angle()?,
            }),
            "h" | "x" | "swap" | "cswap" | "phase" | "cphase" => Err(arity_err()),
            other => Err(Error::Validation(format!("unknown gate kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_zero_width() {
        assert!(Circuit::new(0).is_err());
    }

    #[test]
    fn append_validates_range_and_distinctness() {
        let mut c = Circuit::new(3).unwrap();
        c.append(Gate::H(0)).unwrap();
        c.append(Gate::Swap(1, 2)).unwrap();
        assert!(c.append(Gate::X(3)).is_err());
        assert!(c.append(Gate::Swap(1, 1)).is_err());
        assert!(c
            .append(Gate::CSwap {
                control: 0,
                a: 0,
                b: 2
            })
            .is_err());
    }

    #[test]
    fn failed_append_leaves_circuit_unchanged() {
        let mut c = Circuit::new(2).unwrap();
        c.append(Gate::H(0)).unwrap();
        let before = c.clone();
        assert!(c.append(Gate::Swap(0, 5)).is_err());
        assert_eq!(c, before);
        assert_eq!(c.width(), 2);
        assert_eq!(c.gate_count(), 1);
    }

    #[test]
    fn control_promotes_swaps() {
        let mut c = Circuit::new(4).unwrap();
        c.append(Gate::Swap(2, 3)).unwrap();
        c.append(Gate::Swap(1, 2)).unwrap();
        let ctrl = c.control(5).unwrap();
        assert_eq!(ctrl.width(), 6);
        assert_eq!(
            ctrl.gates(),
            &[
                Gate::CSwap {
                    control: 5,
                    a: 2,
                    b: 3
                },
                Gate::CSwap {
                    control: 5,
                    a: 1,
                    b: 2
                }
            ]
        );
    }

    #[test]
    fn control_rejects_collisions_and_non_swaps() {
        let mut c = Circuit::new(4).unwrap();
        c.append(Gate::Swap(2, 3)).unwrap();
        assert!(matches!(c.control(2), Err(Error::Validation(_))));

        let mut h = Circuit::new(2).unwrap();
        h.append(Gate::H(0)).unwrap();
        assert!(matches!(h.control(1), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn embedded_shifts_indices() {
        let mut c = Circuit::new(2).unwrap();
        c.append(Gate::Swap(0, 1)).unwrap();
        let e = c.embedded(4, 6).unwrap();
        assert_eq!(e.width(), 6);
        assert_eq!(e.gates(), &[Gate::Swap(4, 5)]);
        assert!(c.embedded(5, 6).is_err());
    }

    #[test]
    fn extend_appends_other_circuit() {
        let mut a = Circuit::new(3).unwrap();
        a.append(Gate::H(0)).unwrap();
        let mut b = Circuit::new(2).unwrap();
        b.append(Gate::X(1)).unwrap();
        a.extend(&b).unwrap();
        assert_eq!(a.gate_count(), 2);

        let wide = Circuit::new(9).unwrap();
        assert!(a.extend(&wide).is_err());
    }

    #[test]
    fn json_round_trip_preserves_gates_and_angles() {
        let mut c = Circuit::new(3).unwrap();
        c.append(Gate::H(0)).unwrap();
        c.append(Gate::CPhase {
            control: 0,
            target: 1,
            angle: -std::f64::consts::FRAC_PI_4,
        })
        .unwrap();
        c.append(Gate::CSwap {
            control: 0,
            a: 1,
            b: 2,
        })
        .unwrap();
        let text = c.to_json();
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_rejects_malformed_gates() {
        assert!(Circuit::from_json(r#"{"width":2,"gates":[{"kind":"swap","qubits":[0]}]}"#).is_err());
        assert!(Circuit::from_json(r#"{"width":2,"gates":[{"kind":"spin","qubits":[0]}]}"#).is_err());
        assert!(
            Circuit::from_json(r#"{"width":2,"gates":[{"kind":"phase","qubits":[0]}]}"#).is_err()
        );
    }

    #[test]
    fn permutation_classification() {
        assert!(Gate::X(0).is_permutation());
        assert!(Gate::Swap(0, 1).is_permutation());
        assert!(Gate::CSwap {
            control: 0,
            a: 1,
            b: 2
        }
        .is_permutation());
        assert!(!Gate::H(0).is_permutation());
        assert!(!Gate::Phase {
            target: 0,
            angle: 1.0
        }
        .is_permutation());
    }
}
