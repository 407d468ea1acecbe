//! The full magic-state preparation protocol: grow a physical |H⟩ state
//! into the distance-d code, then run (d−1)/2 alternating pairs of
//! logical-Hadamard measurement and stabilizer readout, aborting on any
//! flag, nontrivial stabilizer outcome, or odd register parity.
//!
//! Stage 1 (growing) is post-selected at the state level: the grown
//! residual is rejected if it carries a nontrivial syndrome, or a clean
//! syndrome but a nontrivial logical component. The latter check idealizes
//! away interactions between stage-1 logicals and later faults; it is the
//! standard two-stage counting convention and keeps acceptance factorized
//! as p_acc = p_acc,1 · p_acc,2.
//!
//! Two noise regimes share the same machinery through `FaultSampler`: the
//! physical circuit-level model, and a logical-level model for the encoded
//! version of the protocol where every qubit is itself a code block — there
//! Clifford locations fail at the logical-Clifford rate and each T/T†
//! location consumes an injected magic state with its own error rate.

use crate::catalog::ec::build_ec_circuit;
use crate::catalog::grow::{build_grow_circuit, GrowEntry};
use crate::catalog::hm::build_hm_circuit;
use crate::catalog::CatalogEntry;
use crate::framesim::{
    compile, propagate_range, AbortReason, CompiledEntry, FrameState, TrialRecord, TrialVerdict,
};
use crate::lattice::{build_lattice, CodeLattice, LogicalClass};
use crate::noise::{EncodedNoise, Fault, FaultSampler, LogicalNoiseModel, NoiseModel};
use crate::pauli::Pauli;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One sub-circuit of a protocol trial.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Segment {
    Grow,
    Hm(usize),
    Ec(usize),
}

/// A deterministic fault planted after one item (flat step-major index) of
/// one segment; everything else follows the sampler.
#[derive(Clone, Copy, Debug)]
pub struct Injection {
    pub segment: Segment,
    pub item: usize,
    pub fault: Fault,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ProtocolMode {
    /// Circuit-level depolarizing noise on physical qubits.
    Physical,
    /// Logical-level fault injection for the encoded protocol.
    Encoded(LogicalNoiseModel),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub d: usize,
    pub mode: ProtocolMode,
}

impl ProtocolSpec {
    pub fn rounds(&self) -> usize {
        (self.d - 1) / 2
    }
}

/// Compiled circuits and classical processing for one distance.
pub struct Protocol {
    pub d: usize,
    pub rounds: usize,
    pub lat: CodeLattice,
    pub grow: GrowEntry,
    pub hm_entry: CatalogEntry,
    pub ec_entry: CatalogEntry,
    grow_c: CompiledEntry,
    hm_c: CompiledEntry,
    ec_c: CompiledEntry,
    data_mask: u128,
}

impl Protocol {
    pub fn new(d: usize) -> anyhow::Result<Protocol> {
        let lat = build_lattice(d)?;
        let grow = build_grow_circuit(1, d)?;
        let hm_entry = build_hm_circuit(d)?;
        let (ec_entry, _) = build_ec_circuit(d)?;
        let grow_c = compile(&grow.entry);
        let hm_c = compile(&hm_entry);
        let ec_c = compile(&ec_entry);
        Ok(Protocol {
            d,
            rounds: (d - 1) / 2,
            data_mask: (1u128 << lat.n) - 1,
            lat,
            grow,
            hm_entry,
            ec_entry,
            grow_c,
            hm_c,
            ec_c,
        })
    }

    /// The protocol's stage-2 schedule: Hadamard measurement and stabilizer
    /// readout strictly alternating, one pair per round.
    pub fn paired_schedule(&self) -> Vec<Segment> {
        (0..self.rounds)
            .flat_map(|r| [Segment::Hm(r), Segment::Ec(r)])
            .collect()
    }

    pub fn segment_entry(&self, seg: Segment) -> &CatalogEntry {
        match seg {
            Segment::Grow => &self.grow.entry,
            Segment::Hm(_) => &self.hm_entry,
            Segment::Ec(_) => &self.ec_entry,
        }
    }

    pub fn run_trial<N: FaultSampler, R: Rng>(&self, nm: &N, rng: &mut R) -> TrialRecord {
        self.run_trial_scheduled(&self.paired_schedule(), nm, rng, &[])
    }

    pub fn run_trial_injected<N: FaultSampler, R: Rng>(
        &self,
        nm: &N,
        rng: &mut R,
        injections: &[Injection],
    ) -> TrialRecord {
        self.run_trial_scheduled(&self.paired_schedule(), nm, rng, injections)
    }

    /// Trial with an explicit stage-2 segment order. Only tests pass
    /// non-paired schedules, to demonstrate why the pairing matters.
    pub fn run_trial_scheduled<N: FaultSampler, R: Rng>(
        &self,
        schedule: &[Segment],
        nm: &N,
        rng: &mut R,
        injections: &[Injection],
    ) -> TrialRecord {
        let seg_inj = |seg: Segment| -> Vec<(usize, Fault)> {
            injections
                .iter()
                .filter(|i| i.segment == seg)
                .map(|i| (i.item, i.fault))
                .collect()
        };
        let mut flag_bits: Vec<bool> = Vec::new();
        let mut syndrome_parities: Vec<bool> = Vec::new();
        let mut ghz_parity = false;

        // Stage 1: grow the injected physical state, applying the
        // outcome-conditioned corrections (an outcome-deviation bit means
        // the actual run applies a correction the reference does not).
        let ce = &self.grow_c;
        let gi = seg_inj(Segment::Grow);
        let mut st = FrameState::new(ce, &Pauli::identity());
        let split = self.grow.phase_a_end_step + 1;
        propagate_range(ce, &mut st, nm, rng, 0..split, &gi);
        for &(i, ref p) in &self.grow.mid_corrections {
            if st.flips[i] {
                st.x ^= p.x;
                st.z ^= p.z;
            }
        }
        propagate_range(ce, &mut st, nm, rng, split..ce.depth(), &gi);
        for &(i, ref p) in &self.grow.end_corrections {
            if st.flips[i] {
                st.x ^= p.x;
                st.z ^= p.z;
            }
        }
        flag_bits.extend(ce.flag_bits(&st.flips));
        syndrome_parities.extend(ce.check_parities(&st.flips));
        let mut residual = st.frame().restrict(self.data_mask);
        let finish = |residual: Pauli,
                      flag_bits: Vec<bool>,
                      syndrome_parities: Vec<bool>,
                      ghz_parity: bool,
                      verdict: TrialVerdict| TrialRecord {
            residual,
            flag_bits,
            syndrome_parities,
            ghz_parity,
            verdict,
        };
        match self.lat.logical_class(&residual) {
            LogicalClass::NotInNormalizer => {
                return finish(
                    residual,
                    flag_bits,
                    syndrome_parities,
                    ghz_parity,
                    TrialVerdict::Aborted(AbortReason::Stage1Syndrome),
                );
            }
            // Clean syndrome and trivial class: the frame is exactly a
            // stabilizer element (an artifact of the correction
            // convention), so the grown state is a perfect codeword. Reset
            // the representative to identity; otherwise the stage-2 twirl
            // would branch the redundant stabilizer frame into spurious
            // errors.
            LogicalClass::I => residual = Pauli::identity(),
            _ => {
                return finish(
                    residual,
                    flag_bits,
                    syndrome_parities,
                    ghz_parity,
                    TrialVerdict::Aborted(AbortReason::Stage1Logical),
                );
            }
        }

        // Stage 2.
        for &seg in schedule {
            let ce = match seg {
                Segment::Hm(_) => &self.hm_c,
                Segment::Ec(_) => &self.ec_c,
                Segment::Grow => panic!("grow is not a stage-2 segment"),
            };
            let inj = seg_inj(seg);
            let mut st = FrameState::new(ce, &residual);
            propagate_range(ce, &mut st, nm, rng, 0..ce.depth(), &inj);
            flag_bits.extend(ce.flag_bits(&st.flips));
            syndrome_parities.extend(ce.check_parities(&st.flips));
            residual = st.frame().restrict(self.data_mask);
            if ce.any_flag(&st.flips) {
                return finish(
                    residual,
                    flag_bits,
                    syndrome_parities,
                    ghz_parity,
                    TrialVerdict::Aborted(AbortReason::Flag),
                );
            }
            match seg {
                Segment::Hm(_) => {
                    let odd = ce.ghz_parity(&st.flips).expect("hm has a register parity");
                    ghz_parity |= odd;
                    if odd {
                        return finish(
                            residual,
                            flag_bits,
                            syndrome_parities,
                            ghz_parity,
                            TrialVerdict::Aborted(AbortReason::GhzParity),
                        );
                    }
                }
                Segment::Ec(_) => {
                    if let Some(reason) = ce.first_check_abort(&st.flips) {
                        return finish(
                            residual,
                            flag_bits,
                            syndrome_parities,
                            ghz_parity,
                            TrialVerdict::Aborted(reason),
                        );
                    }
                }
                Segment::Grow => unreachable!(),
            }
        }
        finish(
            residual,
            flag_bits,
            syndrome_parities,
            ghz_parity,
            TrialVerdict::Accepted,
        )
    }
}

/// Dispatch one trial according to a protocol spec at physical rate `p`.
pub fn run_spec_trial<R: Rng>(
    proto: &Protocol,
    spec: &ProtocolSpec,
    p: f64,
    rng: &mut R,
) -> TrialRecord {
    match &spec.mode {
        ProtocolMode::Physical => proto.run_trial(&NoiseModel::new(p), rng),
        ProtocolMode::Encoded(lnm) => proto.run_trial(&EncodedNoise::from_logical(lnm, p), rng),
    }
}
