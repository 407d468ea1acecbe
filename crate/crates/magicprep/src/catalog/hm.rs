//! Logical-Hadamard measurement circuits.
//!
//! A GHZ ancilla register is prepared by a CNOT chain, a transversal
//! controlled-Hadamard layer (decomposed as T† / CZ / T on the data) couples
//! it to the code block, flag qubits check ZZ parities of the GHZ
//! repetition code, and the register is read out transversally in the X
//! basis. The XOR of all X outcomes is the logical-Hadamard measurement
//! result; on the |H⟩ eigenstate it is deterministically even.
//!
//! The flag structure works by chain-cut coverage: an X error entering the
//! CNOT chain spreads to a suffix of the register and lands as Z errors on
//! the data qubits controlled by that suffix. A checked pair (i, j) fires
//! iff the spread covers exactly one of i, j. The data-to-register
//! assignment concentrates or pads loads so that every cut whose induced
//! data error is not benign (weight ≤ t or ≥ n − t after global-Z
//! canonicalization) crosses enough checked pairs to survive flag-killing
//! faults, which is what the claimed t-flag order requires.

use super::{CatalogEntry, MeasuredOperator};
use crate::circuit::{Circuit, Gate, QubitRole};
use crate::lattice::build_lattice;

/// Register size, checked pairs (register-local indices), and per-register
/// data loads for each supported distance.
pub struct HmPlan {
    pub ghz_size: usize,
    /// loads[i] = number of data qubits controlled by register qubit i;
    /// data qubits are assigned in ascending order.
    pub loads: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

pub fn hm_plan(d: usize) -> Option<HmPlan> {
    match d {
        3 => Some(HmPlan {
            ghz_size: 6,
            loads: vec![3, 3, 1, 0, 0, 0],
            pairs: vec![(0, 1), (2, 5), (3, 4)],
        }),
        5 => {
            let mut loads = vec![1usize; 21];
            loads[0] = 0;
            loads[20] = 0;
            Some(HmPlan {
                ghz_size: 21,
                loads,
                pairs: (2..=16).map(|i| (i, i + 2)).collect(),
            })
        }
        7 => {
            let mut loads = vec![1usize; 45];
            for i in 0..4 {
                loads[i] = 0;
                loads[44 - i] = 0;
            }
            let mut pairs: Vec<(usize, usize)> = (5..=36).map(|i| (i, i + 3)).collect();
            pairs.extend([(3, 6), (4, 7), (37, 40), (38, 41)]);
            Some(HmPlan {
                ghz_size: 45,
                loads,
                pairs,
            })
        }
        _ => None,
    }
}

/// Build the measurement circuit for transversal logical Hadamard,
/// restricted to the first `num_pairs` checked pairs (None = all). The
/// restricted form exists to exhibit that dropping flags breaks the t-flag
/// property.
pub fn build_hm_variant(
    d: usize,
    num_pairs: Option<usize>,
) -> Result<CatalogEntry, crate::lattice::LatticeError> {
    let lat = build_lattice(d)?;
    let n = lat.n;
    let plan = hm_plan(d).ok_or(crate::lattice::LatticeError::InvalidDistance(d))?;
    let m = plan.ghz_size;
    let pairs: Vec<(usize, usize)> = match num_pairs {
        Some(k) => plan.pairs.iter().copied().take(k).collect(),
        None => plan.pairs.clone(),
    };
    let k = pairs.len();
    assert_eq!(plan.loads.iter().sum::<usize>(), n);

    let ghz = |i: usize| n + i;
    let flag = |i: usize| n + m + i;
    let num_qubits = n + m + k;
    let mut roles = vec![QubitRole::Data; n];
    roles.extend(vec![QubitRole::Ancilla; m]);
    roles.extend(vec![QubitRole::Flag; k]);
    let mut c = Circuit::new(num_qubits, roles);

    // Data assignment: register qubit i controls loads[i] consecutive data
    // qubits.
    let mut assigned: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut next_data = 0;
    for &l in &plan.loads {
        assigned.push((next_data..next_data + l).collect());
        next_data += l;
    }
    assert_eq!(next_data, n);

    // GHZ chain preparation; each register qubit is prepared one step
    // before its incoming CNOT to limit idling.
    c.push_step(vec![Gate::PrepX(ghz(0)), Gate::PrepZ(ghz(1))]);
    for j in 1..m {
        let mut step = vec![Gate::Cnot(ghz(j - 1), ghz(j))];
        if j + 1 < m {
            step.push(Gate::PrepZ(ghz(j + 1)));
        }
        c.push_step(step);
    }

    // T† layer on all data.
    let tdg_step = c.depth();
    c.push_step((0..n).map(Gate::TDagger).collect());

    // CZ layer: one step per load level.
    let max_load = *plan.loads.iter().max().unwrap();
    for lvl in 0..max_load {
        let mut step = Vec::new();
        for (i, qs) in assigned.iter().enumerate() {
            if lvl < qs.len() {
                step.push(Gate::Cz(ghz(i), qs[lvl]));
            }
        }
        c.push_step(step);
    }

    // T layer on all data; flags are prepared here, just before their
    // couplings, to minimize their idle exposure.
    let t_step = c.depth();
    let mut step: Vec<Gate> = (0..n).map(Gate::TGate).collect();
    step.extend((0..k).map(|i| Gate::PrepZ(flag(i))));
    c.push_step(step);

    // Flag couplings: two CNOTs per flag in distinct steps; greedy packing
    // with one gate per qubit per step.
    let mut coupling_steps: Vec<Vec<Gate>> = Vec::new();
    let mut busy: Vec<u128> = Vec::new();
    let place = |coupling_steps: &mut Vec<Vec<Gate>>,
                     busy: &mut Vec<u128>,
                     g: usize,
                     f: usize,
                     not_before: usize|
     -> usize {
        let mask = (1u128 << g) | (1u128 << f);
        let mut s = not_before;
        loop {
            if s == coupling_steps.len() {
                coupling_steps.push(Vec::new());
                busy.push(0);
            }
            if busy[s] & mask == 0 {
                busy[s] |= mask;
                coupling_steps[s].push(Gate::Cnot(g, f));
                return s;
            }
            s += 1;
        }
    };
    for (fi, &(i, j)) in pairs.iter().enumerate() {
        let s1 = place(&mut coupling_steps, &mut busy, ghz(i), flag(fi), 0);
        let _s2 = place(&mut coupling_steps, &mut busy, ghz(j), flag(fi), s1 + 1);
    }
    assert!(coupling_steps.len() <= 4, "flag couplings too deep");
    for s in coupling_steps {
        c.push_step(s);
    }

    // Transversal readout.
    let mut meas: Vec<Gate> = (0..m).map(|i| Gate::MeasX(ghz(i))).collect();
    meas.extend((0..k).map(|i| Gate::MeasZ(flag(i))));
    c.push_step(meas);

    let ghz_meas: Vec<usize> = (0..m).collect();
    let flag_meas: Vec<usize> = (m..m + k).collect();
    let entry = CatalogEntry {
        id: match num_pairs {
            None => format!("hm-d{d}"),
            Some(k) => format!("hm-d{d}-reduced{k}"),
        },
        circuit: c,
        measured: MeasuredOperator::LogicalHadamard,
        claimed_t: (d - 1) / 2,
        num_data: n,
        flag_meas,
        checks: vec![],
        ghz_parity: Some(ghz_meas),
        twirl_steps: vec![tdg_step, t_step],
    };
    Ok(entry)
}

pub fn build_hm_circuit(d: usize) -> Result<CatalogEntry, crate::lattice::LatticeError> {
    build_hm_variant(d, None)
}
