//! Time-stepped circuit representation with typed, enumerable fault
//! locations.
//!
//! A circuit is a list of steps; each step holds gates with pairwise disjoint
//! qubit support. Idle locations are not stored but are materialized during
//! enumeration for every qubit that is live (prepared and not yet measured)
//! and untouched in a step, because idling qubits fault under the noise
//! model. Controlled-Hadamard is never a primitive: catalog circuits store it
//! decomposed as T† on the target, CZ, then T, so noise and twirl rules apply
//! at T/CZ granularity.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Gate {
    PrepZ(usize),
    PrepX(usize),
    /// Preparation of the physical magic state on a qubit.
    PrepH(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Hadamard(usize),
    TGate(usize),
    TDagger(usize),
    MeasZ(usize),
    MeasX(usize),
    MeasY(usize),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Cnot(a, b) | Gate::Cz(a, b) => (a, Some(b)),
            Gate::PrepZ(q)
            | Gate::PrepX(q)
            | Gate::PrepH(q)
            | Gate::Hadamard(q)
            | Gate::TGate(q)
            | Gate::TDagger(q)
            | Gate::MeasZ(q)
            | Gate::MeasX(q)
            | Gate::MeasY(q) => (q, None),
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Gate::MeasZ(_) | Gate::MeasX(_) | Gate::MeasY(_))
    }

    pub fn is_preparation(&self) -> bool {
        matches!(self, Gate::PrepZ(_) | Gate::PrepX(_) | Gate::PrepH(_))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum QubitRole {
    Data,
    Ancilla,
    Flag,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub roles: Vec<QubitRole>,
    pub steps: Vec<Vec<Gate>>,
}

/// Kinds of faultable locations, mirroring the noise model's channel table.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum LocationKind {
    SingleQubitGate,
    TwoQubitGate,
    PrepZ,
    PrepX,
    PrepH,
    Measurement,
    Idle,
}

/// One faultable location: a gate in a step, or a materialized idle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Location {
    pub step: usize,
    pub kind: LocationKind,
    pub qubits: (usize, Option<usize>),
    /// For measurements: sequential outcome index (step-major order).
    pub meas_index: Option<usize>,
}

impl Circuit {
    pub fn new(num_qubits: usize, roles: Vec<QubitRole>) -> Self {
        assert_eq!(roles.len(), num_qubits);
        Circuit {
            num_qubits,
            roles,
            steps: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn push_step(&mut self, gates: Vec<Gate>) {
        let mut used = 0u128;
        for g in &gates {
            let (a, b) = g.qubits();
            assert!(used >> a & 1 == 0, "qubit {a} used twice in a step");
            used |= 1 << a;
            if let Some(b) = b {
                assert!(used >> b & 1 == 0, "qubit {b} used twice in a step");
                used |= 1 << b;
            }
        }
        self.steps.push(gates);
    }

    /// Append all steps of `other` (same qubit space) after this circuit.
    pub fn concatenate(&mut self, other: &Circuit) {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.steps.extend(other.steps.iter().cloned());
    }

    /// Per-step liveness: a data qubit is live throughout; other qubits are
    /// live from their preparation step up to and including their
    /// measurement step.
    fn liveness(&self) -> Vec<u128> {
        let mut live_now = 0u128;
        for (q, r) in self.roles.iter().enumerate() {
            if *r == QubitRole::Data {
                live_now |= 1 << q;
            }
        }
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let mut died = 0u128;
            for g in step {
                let (a, _) = g.qubits();
                if g.is_preparation() {
                    live_now |= 1 << a;
                }
                if g.is_measurement() {
                    died |= 1 << a;
                }
            }
            out.push(live_now);
            live_now &= !died;
        }
        out
    }

    /// Deterministic, total enumeration of faultable locations: step-major;
    /// within a step, explicit gates in listed order, then idles in qubit
    /// order.
    pub fn locations(&self) -> Vec<Location> {
        let live = self.liveness();
        let mut out = Vec::new();
        let mut meas = 0usize;
        for (s, step) in self.steps.iter().enumerate() {
            let mut touched = 0u128;
            for g in step {
                let (a, b) = g.qubits();
                touched |= 1 << a;
                if let Some(b) = b {
                    touched |= 1 << b;
                }
                let kind = match g {
                    Gate::Cnot(..) | Gate::Cz(..) => LocationKind::TwoQubitGate,
                    Gate::Hadamard(_) | Gate::TGate(_) | Gate::TDagger(_) => {
                        LocationKind::SingleQubitGate
                    }
                    Gate::PrepZ(_) => LocationKind::PrepZ,
                    Gate::PrepX(_) => LocationKind::PrepX,
                    Gate::PrepH(_) => LocationKind::PrepH,
                    Gate::MeasZ(_) | Gate::MeasX(_) | Gate::MeasY(_) => LocationKind::Measurement,
                };
                let meas_index = if g.is_measurement() {
                    meas += 1;
                    Some(meas - 1)
                } else {
                    None
                };
                out.push(Location {
                    step: s,
                    kind,
                    qubits: (a, b),
                    meas_index,
                });
            }
            for q in 0..self.num_qubits {
                if live[s] >> q & 1 == 1 && touched >> q & 1 == 0 {
                    out.push(Location {
                        step: s,
                        kind: LocationKind::Idle,
                        qubits: (q, None),
                        meas_index: None,
                    });
                }
            }
        }
        out
    }

    pub fn num_measurements(&self) -> usize {
        self.steps
            .iter()
            .flatten()
            .filter(|g| g.is_measurement())
            .count()
    }

    /// Plain-text form: one step per line, gates separated by "; ".
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for step in &self.steps {
            let parts: Vec<String> = step
                .iter()
                .map(|g| match *g {
                    Gate::PrepZ(q) => format!("P0 {q}"),
                    Gate::PrepX(q) => format!("P+ {q}"),
                    Gate::PrepH(q) => format!("PH {q}"),
                    Gate::Cnot(c, t) => format!("CNOT {c} {t}"),
                    Gate::Cz(a, b) => format!("CZ {a} {b}"),
                    Gate::Hadamard(q) => format!("H {q}"),
                    Gate::TGate(q) => format!("T {q}"),
                    Gate::TDagger(q) => format!("TDG {q}"),
                    Gate::MeasZ(q) => format!("MZ {q}"),
                    Gate::MeasX(q) => format!("MX {q}"),
                    Gate::MeasY(q) => format!("MY {q}"),
                })
                .collect();
            s.push_str(&parts.join("; "));
            s.push('\n');
        }
        s
    }
}
