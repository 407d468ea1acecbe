//! Circuit-level depolarizing noise model.
//!
//! Channel table, with p the physical error rate:
//!   single-qubit gate  → uniform {X, Y, Z} with probability p
//!   two-qubit gate     → uniform over the 15 nontrivial two-qubit Paulis
//!                        with probability p
//!   prep |0⟩           → prepared as |1⟩ with probability 2p/3
//!   prep |+⟩           → prepared as |−⟩ with probability 2p/3
//!   prep |H⟩           → uniform {X, Y, Z} with probability p
//!   measurement        → outcome flipped with probability 2p/3
//!   idle               → uniform {X, Y, Z} with probability p

use crate::circuit::LocationKind;
use crate::pauli::Pauli;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
}

/// The effect of one fault: a Pauli inserted after the location (empty for
/// pure measurement faults) and/or an outcome flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fault {
    pub pauli: Pauli,
    pub flip_outcome: bool,
}

fn single_qubit_paulis(q: usize) -> [Pauli; 3] {
    [Pauli::single_x(q), Pauli::single_y(q), Pauli::single_z(q)]
}

/// The 15 nontrivial two-qubit Paulis on (a, b), in a fixed order.
pub fn two_qubit_paulis(a: usize, b: usize) -> Vec<Pauli> {
    let letters = |q: usize| {
        [
            Pauli::identity(),
            Pauli::single_x(q),
            Pauli::single_y(q),
            Pauli::single_z(q),
        ]
    };
    let mut out = Vec::with_capacity(15);
    for pa in letters(a) {
        for pb in letters(b) {
            let p = pa.mul(&pb);
            if !p.is_identity() {
                out.push(p);
            }
        }
    }
    out
}

/// Every possible fault at a location of the given kind, probability
/// stripped. This is the support set the flag verifier quantifies over.
pub fn fault_support(kind: LocationKind, qubits: (usize, Option<usize>)) -> Vec<Fault> {
    let (a, b) = qubits;
    match kind {
        LocationKind::SingleQubitGate | LocationKind::Idle | LocationKind::PrepH => {
            single_qubit_paulis(a)
                .into_iter()
                .map(|pauli| Fault {
                    pauli,
                    flip_outcome: false,
                })
                .collect()
        }
        LocationKind::TwoQubitGate => two_qubit_paulis(a, b.expect("two-qubit location"))
            .into_iter()
            .map(|pauli| Fault {
                pauli,
                flip_outcome: false,
            })
            .collect(),
        LocationKind::PrepZ => vec![Fault {
            pauli: Pauli::single_x(a),
            flip_outcome: false,
        }],
        LocationKind::PrepX => vec![Fault {
            pauli: Pauli::single_z(a),
            flip_outcome: false,
        }],
        LocationKind::Measurement => vec![Fault {
            pauli: Pauli::identity(),
            flip_outcome: true,
        }],
    }
}

/// Probability that a location of this kind faults at all.
pub fn fault_probability(kind: LocationKind, p: f64) -> f64 {
    match kind {
        LocationKind::SingleQubitGate
        | LocationKind::TwoQubitGate
        | LocationKind::Idle
        | LocationKind::PrepH => p,
        LocationKind::PrepZ | LocationKind::PrepX | LocationKind::Measurement => 2.0 * p / 3.0,
    }
}

impl NoiseModel {
    pub fn new(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p));
        NoiseModel { p }
    }

    /// Sample a fault for one location. The conditional distribution given
    /// that a fault occurs is uniform over the kind's support set.
    pub fn sample_fault(
        &self,
        kind: LocationKind,
        qubits: (usize, Option<usize>),
        rng: &mut impl Rng,
    ) -> Option<Fault> {
        if rng.gen::<f64>() >= fault_probability(kind, self.p) {
            return None;
        }
        Some(self.sample_fault_given_occurrence(kind, qubits, rng))
    }

    /// Sample from the conditional fault distribution (a fault definitely
    /// occurs). Used by the location-skipping trial driver.
    pub fn sample_fault_given_occurrence(
        &self,
        kind: LocationKind,
        qubits: (usize, Option<usize>),
        rng: &mut impl Rng,
    ) -> Fault {
        let support = fault_support(kind, qubits);
        support[rng.gen_range(0..support.len())]
    }
}

/// Source of sampled faults, one opportunity per circuit location. The
/// physical `NoiseModel` is the standard implementation; the encoded
/// (logical-level) mode substitutes per-kind rates.
pub trait FaultSampler {
    fn sample_fault_at<R: Rng>(
        &self,
        kind: LocationKind,
        qubits: (usize, Option<usize>),
        rng: &mut R,
    ) -> Option<Fault>;
}

impl FaultSampler for NoiseModel {
    fn sample_fault_at<R: Rng>(
        &self,
        kind: LocationKind,
        qubits: (usize, Option<usize>),
        rng: &mut R,
    ) -> Option<Fault> {
        self.sample_fault(kind, qubits, rng)
    }
}

/// Logical-level noise for the encoded-Clifford protocol mode: each encoded
/// Clifford location fails with rate given by a polynomial in p, and each
/// injected magic state carries an error with rate `p_inject`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogicalNoiseModel {
    /// Coefficients c_k of p_LC(p) = Σ c_k p^k.
    pub p_lc_coeffs: Vec<f64>,
    pub p_inject: f64,
}

impl LogicalNoiseModel {
    pub fn p_lc(&self, p: f64) -> f64 {
        self.p_lc_coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * p + c)
    }
}

/// Fault sampler for the encoded protocol skeleton: Clifford, preparation,
/// measurement, and idle locations fault like the physical model at the
/// logical-Clifford rate, while T/T† gates and the injected input state
/// (the only single-qubit-gate and |H⟩-preparation locations in the
/// skeleton circuits) each consume an injected magic state carrying a
/// uniform logical Pauli error with probability `p_inject`.
#[derive(Clone, Copy, Debug)]
pub struct EncodedNoise {
    pub base: NoiseModel,
    pub p_inject: f64,
}

impl EncodedNoise {
    pub fn from_logical(lnm: &LogicalNoiseModel, p: f64) -> EncodedNoise {
        EncodedNoise {
            base: NoiseModel::new(lnm.p_lc(p)),
            p_inject: lnm.p_inject,
        }
    }
}

impl FaultSampler for EncodedNoise {
    fn sample_fault_at<R: Rng>(
        &self,
        kind: LocationKind,
        qubits: (usize, Option<usize>),
        rng: &mut R,
    ) -> Option<Fault> {
        match kind {
            LocationKind::SingleQubitGate | LocationKind::PrepH => {
                if rng.gen::<f64>() < self.p_inject {
                    let paulis = single_qubit_paulis(qubits.0);
                    Some(Fault {
                        pauli: paulis[rng.gen_range(0..3)],
                        flip_outcome: false,
                    })
                } else {
                    None
                }
            }
            _ => self.base.sample_fault(kind, qubits, rng),
        }
    }
}

/// Deterministic per-trial RNG stream: a SplitMix64-style mix of the master
/// seed and trial index seeds a counter-based ChaCha stream, so trials are
/// reproducible independent of worker scheduling.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut z = master_seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(trial);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&z.to_le_bytes());
    seed[8..16].copy_from_slice(&master_seed.to_le_bytes());
    seed[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_sizes() {
        assert_eq!(
            fault_support(LocationKind::SingleQubitGate, (0, None)).len(),
            3
        );
        assert_eq!(
            fault_support(LocationKind::TwoQubitGate, (0, Some(1))).len(),
            15
        );
        assert_eq!(fault_support(LocationKind::PrepZ, (0, None)).len(), 1);
        assert_eq!(fault_support(LocationKind::Measurement, (0, None)).len(), 1);
        let pairs = two_qubit_paulis(2, 5);
        assert_eq!(pairs.len(), 15);
        let unique: std::collections::HashSet<_> = pairs.iter().collect();
        assert_eq!(unique.len(), 15);
    }

    #[test]
    fn zero_rate_never_faults() {
        let nm = NoiseModel::new(0.0);
        let mut rng = trial_rng(1, 1);
        for _ in 0..1000 {
            assert!(nm
                .sample_fault(LocationKind::TwoQubitGate, (0, Some(1)), &mut rng)
                .is_none());
        }
    }

    #[test]
    fn empirical_rates_match_table() {
        // 10^6 samples at p = 0.1: two-qubit faults hit each of the 15
        // Paulis with rate p/15; prep |0> flips with rate 2p/3.
        let nm = NoiseModel::new(0.1);
        let mut rng = trial_rng(7, 0);
        let trials = 1_000_000u32;
        let mut counts = std::collections::HashMap::new();
        let mut prep_flips = 0u32;
        for _ in 0..trials {
            if let Some(f) = nm.sample_fault(LocationKind::TwoQubitGate, (0, Some(1)), &mut rng) {
                *counts.entry(f.pauli).or_insert(0u32) += 1;
            }
            if nm
                .sample_fault(LocationKind::PrepZ, (0, None), &mut rng)
                .is_some()
            {
                prep_flips += 1;
            }
        }
        let per_pauli = 0.1 / 15.0;
        let sigma = (trials as f64 * per_pauli).sqrt();
        for p in two_qubit_paulis(0, 1) {
            let c = *counts.get(&p).unwrap_or(&0) as f64;
            assert!(
                (c - trials as f64 * per_pauli).abs() < 5.0 * sigma,
                "pauli {p:?} count {c}"
            );
        }
        let expect = trials as f64 * (2.0 * 0.1 / 3.0);
        assert!((prep_flips as f64 - expect).abs() < 5.0 * expect.sqrt());
    }

    #[test]
    fn trial_streams_reproduce() {
        let mut r1 = trial_rng(42, 9);
        let mut r2 = trial_rng(42, 9);
        let a: Vec<u64> = (0..8).map(|_| r1.gen()).collect();
        let b: Vec<u64> = (0..8).map(|_| r2.gen()).collect();
        assert_eq!(a, b);
        let mut r3 = trial_rng(42, 10);
        let c: Vec<u64> = (0..8).map(|_| r3.gen()).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn logical_polynomial_evaluation() {
        let lnm = LogicalNoiseModel {
            p_lc_coeffs: vec![0.0, 0.0, 100.0],
            p_inject: 1e-8,
        };
        assert!((lnm.p_lc(1e-3) - 1e-4).abs() < 1e-12);
    }
}
