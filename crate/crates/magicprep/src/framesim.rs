//! Pauli-frame simulation of catalog circuits under circuit-level noise.
//!
//! The simulator tracks the accumulated Pauli error relative to a noiseless
//! reference execution whose measurement outcomes are all +1 (a valid
//! noiseless run for every catalog circuit, including the growing circuits,
//! whose outcome-conditioned corrections are identity on that reference).
//! Clifford gates conjugate the frame; a measurement's recorded bit is the
//! deviation from the reference: (frame anticommutes with the measured
//! operator) XOR (measurement-flip fault).
//!
//! The transversal T/T† layers of the Hadamard-measurement circuits are Y
//! rotations, so Y and I frame components pass through unchanged while an X
//! or Z component is replaced by X or Z with probability 1/2 each (the
//! twirling substitution). Immediately before each such layer the frame's Z
//! component is canonicalized against global Z on the data block whenever
//! that lowers its weight: at that point in the circuit a global data-Z
//! together with X on the whole measurement register acts trivially and
//! flips no recorded outcome (the register X's cancel pairwise on every
//! flag), so the replacement is free and prevents the twirl from branching
//! a trivial frame into a high-weight error.

use crate::catalog::{CatalogEntry, SyndromeCheck};
use crate::circuit::{Gate, LocationKind};
use crate::noise::{Fault, FaultSampler};
use crate::pauli::Pauli;
use rand::Rng;
use serde::Serialize;

/// Why a trial was rejected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum AbortReason {
    /// Grown state carries a nontrivial syndrome.
    Stage1Syndrome,
    /// Grown state is clean of syndrome but carries a logical error.
    Stage1Logical,
    /// Any flag measurement returned -1.
    Flag,
    /// A single-ancilla stabilizer outcome was nontrivial.
    W4Syndrome,
    /// A three-ancilla stabilizer parity was odd.
    W6Parity,
    /// The Hadamard-measurement register parity was odd.
    GhzParity,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum TrialVerdict {
    Accepted,
    Aborted(AbortReason),
}

/// Outcome of one protocol trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    /// Residual error on the data qubits (meaningful for accepted trials).
    pub residual: Pauli,
    pub flag_bits: Vec<bool>,
    pub syndrome_parities: Vec<bool>,
    pub ghz_parity: bool,
    pub verdict: TrialVerdict,
}

/// One faultable item in execution order: an explicit gate or a
/// materialized idle.
#[derive(Clone, Copy)]
struct PlanItem {
    gate: Option<Gate>,
    kind: LocationKind,
    qubits: (usize, Option<usize>),
    meas_index: Option<u32>,
}

/// A catalog circuit lowered to a flat execution plan plus the outcome
/// metadata needed to evaluate flags, checks, and the register parity.
pub struct CompiledEntry {
    pub id: String,
    pub num_qubits: usize,
    pub num_data: usize,
    pub data_mask: u128,
    pub num_meas: usize,
    steps: Vec<Vec<PlanItem>>,
    twirl: Vec<bool>,
    flag_meas: Vec<usize>,
    checks: Vec<SyndromeCheck>,
    ghz_meas: Option<Vec<usize>>,
}

/// Mutable frame + recorded outcome deviations for one run.
#[derive(Clone)]
pub struct FrameState {
    pub x: u128,
    pub z: u128,
    pub flips: Vec<bool>,
}

impl FrameState {
    pub fn new(ce: &CompiledEntry, input: &Pauli) -> FrameState {
        FrameState {
            x: input.x,
            z: input.z,
            flips: vec![false; ce.num_meas],
        }
    }

    pub fn frame(&self) -> Pauli {
        Pauli {
            x: self.x,
            z: self.z,
        }
    }
}

pub fn compile(entry: &CatalogEntry) -> CompiledEntry {
    let c = &entry.circuit;
    let mut steps: Vec<Vec<PlanItem>> = vec![Vec::new(); c.depth()];
    let mut gate_cursor = vec![0usize; c.depth()];
    for loc in c.locations() {
        let gate = if loc.kind == LocationKind::Idle {
            None
        } else {
            let g = c.steps[loc.step][gate_cursor[loc.step]];
            gate_cursor[loc.step] += 1;
            Some(g)
        };
        steps[loc.step].push(PlanItem {
            gate,
            kind: loc.kind,
            qubits: loc.qubits,
            meas_index: loc.meas_index.map(|m| m as u32),
        });
    }
    let mut twirl = vec![false; c.depth()];
    for &s in &entry.twirl_steps {
        twirl[s] = true;
    }
    CompiledEntry {
        id: entry.id.clone(),
        num_qubits: c.num_qubits,
        num_data: entry.num_data,
        data_mask: (1u128 << entry.num_data) - 1,
        num_meas: c.num_measurements(),
        steps,
        twirl,
        flag_meas: entry.flag_meas.clone(),
        checks: entry.checks.clone(),
        ghz_meas: entry.ghz_parity.clone(),
    }
}

impl CompiledEntry {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn flag_bits(&self, flips: &[bool]) -> Vec<bool> {
        self.flag_meas.iter().map(|&m| flips[m]).collect()
    }

    pub fn any_flag(&self, flips: &[bool]) -> bool {
        self.flag_meas.iter().any(|&m| flips[m])
    }

    /// Per-check outcome parities (odd = abort).
    pub fn check_parities(&self, flips: &[bool]) -> Vec<bool> {
        self.checks
            .iter()
            .map(|ch| {
                ch.meas_indices
                    .iter()
                    .fold(false, |acc, &m| acc ^ flips[m])
            })
            .collect()
    }

    /// First tripped stabilizer check, classified by its ancilla count.
    pub fn first_check_abort(&self, flips: &[bool]) -> Option<AbortReason> {
        for ch in &self.checks {
            let odd = ch
                .meas_indices
                .iter()
                .fold(false, |acc, &m| acc ^ flips[m]);
            if odd {
                return Some(if ch.meas_indices.len() == 1 {
                    AbortReason::W4Syndrome
                } else {
                    AbortReason::W6Parity
                });
            }
        }
        None
    }

    /// Register X⊗m parity deviation (true = odd = abort).
    pub fn ghz_parity(&self, flips: &[bool]) -> Option<bool> {
        self.ghz_meas
            .as_ref()
            .map(|ms| ms.iter().fold(false, |acc, &m| acc ^ flips[m]))
    }
}

/// Keep E_Z or its global-Z complement on the data block, whichever is
/// lighter (tie keeps E_Z).
pub fn select_z_component(e: &Pauli, num_data: usize) -> Pauli {
    let dm = (1u128 << num_data) - 1;
    if 2 * (e.z & dm).count_ones() as usize > num_data {
        Pauli {
            x: e.x,
            z: e.z ^ dm,
        }
    } else {
        *e
    }
}

/// Twirl substitution for one qubit's frame component at a transversal T/T†
/// layer: I and Y pass through, X or Z re-randomizes to X or Z.
pub fn apply_t_twirl(x: bool, z: bool, rng: &mut impl Rng) -> (bool, bool) {
    if x == z {
        (x, z)
    } else if rng.gen::<bool>() {
        (true, false)
    } else {
        (false, true)
    }
}

/// Run `steps` of the compiled circuit, sampling one fault opportunity per
/// location in canonical order. Each `(index, fault)` in `inject` applies a
/// deterministic fault after the item with that flat index (step-major,
/// gates before idles) instead of sampling there; used by the fault-sweep
/// tests.
pub fn propagate_range(
    ce: &CompiledEntry,
    st: &mut FrameState,
    nm: &impl FaultSampler,
    rng: &mut impl Rng,
    steps: std::ops::Range<usize>,
    inject: &[(usize, Fault)],
) {
    let mut item_idx: usize = ce.steps[..steps.start].iter().map(|s| s.len()).sum();
    for s in steps {
        if ce.twirl[s] {
            let zw = (st.z & ce.data_mask).count_ones() as usize;
            if 2 * zw > ce.num_data {
                st.z ^= ce.data_mask;
            }
            let mut single = (st.x ^ st.z) & ce.data_mask;
            while single != 0 {
                let q = single.trailing_zeros();
                let bit = 1u128 << q;
                let (nx, nz) = apply_t_twirl(st.x & bit != 0, st.z & bit != 0, rng);
                st.x = st.x & !bit | if nx { bit } else { 0 };
                st.z = st.z & !bit | if nz { bit } else { 0 };
                single &= single - 1;
            }
        }
        for item in &ce.steps[s] {
            if let Some(g) = item.gate {
                match g {
                    Gate::Cnot(c, t) => {
                        if st.x >> c & 1 == 1 {
                            st.x ^= 1 << t;
                        }
                        if st.z >> t & 1 == 1 {
                            st.z ^= 1 << c;
                        }
                    }
                    Gate::Cz(a, b) => {
                        if st.x >> a & 1 == 1 {
                            st.z ^= 1 << b;
                        }
                        if st.x >> b & 1 == 1 {
                            st.z ^= 1 << a;
                        }
                    }
                    Gate::Hadamard(q) => {
                        let d = ((st.x ^ st.z) >> q & 1) << q;
                        st.x ^= d;
                        st.z ^= d;
                    }
                    Gate::TGate(_) | Gate::TDagger(_) => {}
                    Gate::PrepZ(q) | Gate::PrepX(q) | Gate::PrepH(q) => {
                        st.x &= !(1 << q);
                        st.z &= !(1 << q);
                    }
                    Gate::MeasZ(q) | Gate::MeasX(q) | Gate::MeasY(q) => {
                        let anti = match g {
                            Gate::MeasZ(_) => st.x >> q & 1 == 1,
                            Gate::MeasX(_) => st.z >> q & 1 == 1,
                            _ => (st.x ^ st.z) >> q & 1 == 1,
                        };
                        if anti {
                            st.flips[item.meas_index.unwrap() as usize] ^= true;
                        }
                        st.x &= !(1 << q);
                        st.z &= !(1 << q);
                    }
                }
            }
            let mut injected = false;
            for &(idx, f) in inject {
                if idx == item_idx {
                    injected = true;
                    st.x ^= f.pauli.x;
                    st.z ^= f.pauli.z;
                    if f.flip_outcome {
                        st.flips[item.meas_index.unwrap() as usize] ^= true;
                    }
                }
            }
            if !injected {
                if let Some(f) = nm.sample_fault_at(item.kind, item.qubits, rng) {
                    st.x ^= f.pauli.x;
                    st.z ^= f.pauli.z;
                    if f.flip_outcome {
                        st.flips[item.meas_index.unwrap() as usize] ^= true;
                    }
                }
            }
            item_idx += 1;
        }
    }
}

/// Full-circuit run from a given input frame.
pub fn propagate(
    ce: &CompiledEntry,
    input: &Pauli,
    nm: &impl FaultSampler,
    rng: &mut impl Rng,
) -> FrameState {
    let mut st = FrameState::new(ce, input);
    propagate_range(ce, &mut st, nm, rng, 0..ce.depth(), &[]);
    st
}
