//! Sign-tracking stabilizer tableau simulator.
//!
//! Used as an independent oracle in tests: it verifies that the
//! Clifford parts of catalog circuits (growing, stabilizer measurement)
//! produce states with the claimed stabilizers for every measurement-outcome
//! pattern. The Monte Carlo engine does not use this module; it runs the much
//! faster Pauli-frame simulation.
//!
//! Standard destabilizer/stabilizer representation: rows 0..n are
//! destabilizers, rows n..2n are stabilizers, with quarter-phase exponents
//! tracked during row multiplication.

use crate::pauli::Pauli;

#[derive(Clone)]
struct Row {
    x: u128,
    z: u128,
    /// Phase exponent: the row represents i^phase · (Pauli word); stabilizer
    /// rows always hold phase ∈ {0, 2} (i.e. ±1).
    phase: u8,
}

pub struct Tableau {
    n: usize,
    rows: Vec<Row>, // destabilizers then stabilizers
}

/// Phase exponent (mod 4) contributed by multiplying single-qubit Paulis
/// (x1,z1)·(x2,z2), per the usual Levi-Civita bookkeeping.
fn phase_contribution(x1: bool, z1: bool, x2: bool, z2: bool) -> u8 {
    // Represent each letter: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1). Y carries an
    // implicit i (Y = iXZ); multiply XZ-words and count reorderings.
    // Lookup derived from direct multiplication of Pauli matrices.
    const TABLE: [[u8; 4]; 4] = [
        // cols: I X Y Z (of second operand); rows: first operand
        [0, 0, 0, 0], // I·_
        [0, 0, 1, 3], // X·{I,X,Y,Z} -> {X, I, iZ, -iY}
        [0, 3, 0, 1], // Y·{I,X,Y,Z} -> {Y, -iZ, I, iX}
        [0, 1, 3, 0], // Z·{I,X,Y,Z} -> {Z, iY, -iX, I}
    ];
    let idx = |x: bool, z: bool| match (x, z) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    };
    TABLE[idx(x1, z1)][idx(x2, z2)]
}

impl Row {
    fn mul_assign(&mut self, other: &Row) {
        let mut phase = (self.phase + other.phase) % 4;
        let support = (self.x | self.z | other.x | other.z) as u128;
        let mut s = support;
        while s != 0 {
            let q = s.trailing_zeros() as usize;
            s &= s - 1;
            phase = (phase
                + phase_contribution(
                    self.x >> q & 1 == 1,
                    self.z >> q & 1 == 1,
                    other.x >> q & 1 == 1,
                    other.z >> q & 1 == 1,
                ))
                % 4;
        }
        self.x ^= other.x;
        self.z ^= other.z;
        self.phase = phase;
    }

    fn anticommutes(&self, p: &Pauli) -> bool {
        ((self.x & p.z).count_ones() + (self.z & p.x).count_ones()) % 2 == 1
    }
}

impl Tableau {
    /// All-|0⟩ state.
    pub fn new(n: usize) -> Self {
        assert!(n <= 128);
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(Row {
                x: 1 << q,
                z: 0,
                phase: 0,
            });
        }
        for q in 0..n {
            rows.push(Row {
                x: 0,
                z: 1 << q,
                phase: 0,
            });
        }
        Tableau { n, rows }
    }

    pub fn h(&mut self, q: usize) {
        for r in &mut self.rows {
            let (xb, zb) = (r.x >> q & 1, r.z >> q & 1);
            if xb & zb == 1 {
                r.phase = (r.phase + 2) % 4;
            }
            r.x = (r.x & !(1 << q)) | (zb << q);
            r.z = (r.z & !(1 << q)) | (xb << q);
        }
    }

    pub fn s_gate(&mut self, q: usize) {
        for r in &mut self.rows {
            let (xb, zb) = (r.x >> q & 1, r.z >> q & 1);
            if xb & zb == 1 {
                r.phase = (r.phase + 2) % 4;
            }
            r.z ^= xb << q;
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for r in &mut self.rows {
            let (xc, zc) = (r.x >> c & 1, r.z >> c & 1);
            let (xt, zt) = (r.x >> t & 1, r.z >> t & 1);
            if xc & zt == 1 && xt ^ zc == 0 {
                r.phase = (r.phase + 2) % 4;
            }
            r.x ^= xc << t;
            r.z ^= zt << c;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    pub fn apply_pauli(&mut self, p: &Pauli) {
        // Conjugation by a Pauli only flips signs of anticommuting rows.
        for r in &mut self.rows {
            if r.anticommutes(p) {
                r.phase = (r.phase + 2) % 4;
            }
        }
    }

    /// Measure a Hermitian Pauli observable. `forced`: require this outcome
    /// when the result is random (panics if the outcome is deterministic and
    /// disagrees). Returns (outcome bit, was_random).
    pub fn measure_pauli(&mut self, p: &Pauli, forced: bool) -> (bool, bool) {
        let n = self.n;
        let pivot = (n..2 * n).find(|&i| self.rows[i].anticommutes(p));
        match pivot {
            Some(pv) => {
                let pivot_row = self.rows[pv].clone();
                for i in 0..2 * n {
                    if i != pv && i != pv - n && self.rows[i].anticommutes(p) {
                        self.rows[i].mul_assign(&pivot_row);
                    }
                }
                self.rows[pv - n] = pivot_row;
                self.rows[pv] = Row {
                    x: p.x,
                    z: p.z,
                    phase: if forced { 2 } else { 0 },
                };
                (forced, true)
            }
            None => {
                let bit = self.deterministic_outcome(p);
                (bit, false)
            }
        }
    }

    /// Expectation of a Pauli stabilizer candidate: Some(false) if the state
    /// is a +1 eigenstate, Some(true) if −1, None if the outcome would be
    /// random.
    pub fn expectation(&self, p: &Pauli) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|i| self.rows[i].anticommutes(p)) {
            return None;
        }
        Some(self.deterministic_outcome(p))
    }

    fn deterministic_outcome(&self, p: &Pauli) -> bool {
        // Accumulate the product of stabilizer rows selected by the
        // destabilizers anticommuting with p; the result must be ±p.
        let n = self.n;
        let mut acc = Row {
            x: 0,
            z: 0,
            phase: 0,
        };
        for i in 0..n {
            if self.rows[i].anticommutes(p) {
                let stab = self.rows[i + n].clone();
                acc.mul_assign(&stab);
            }
        }
        assert_eq!(acc.x, p.x, "deterministic measurement reconstruction");
        assert_eq!(acc.z, p.z, "deterministic measurement reconstruction");
        assert!(acc.phase % 2 == 0);
        acc.phase == 2
    }

    /// Execute a Clifford circuit, returning measurement outcomes in
    /// location order. Magic-state preparations are substituted per
    /// `prep_h_as` (false → |0⟩, true → |+⟩), which is how logical-content
    /// transport is checked by linearity; None panics on PrepH. Whenever a
    /// measurement outcome is intrinsically random, the state is projected
    /// onto the outcome supplied by `random_outcome` — callers enumerate or
    /// sample outcome patterns through it. T gates are outside this oracle's
    /// scope and panic.
    pub fn run_circuit(
        &mut self,
        c: &crate::circuit::Circuit,
        prep_h_as: Option<bool>,
        random_outcome: &mut dyn FnMut() -> bool,
    ) -> Vec<bool> {
        let mut outcomes = Vec::new();
        self.run_circuit_range(c, 0..c.steps.len(), prep_h_as, random_outcome, &mut outcomes);
        outcomes
    }

    /// Execute a contiguous step range, appending outcomes; running the
    /// ranges of a circuit in order is equivalent to `run_circuit` and lets
    /// callers interleave classical corrections (Pauli applications) between
    /// phases, as the growing circuits require.
    pub fn run_circuit_range(
        &mut self,
        c: &crate::circuit::Circuit,
        steps: std::ops::Range<usize>,
        prep_h_as: Option<bool>,
        random_outcome: &mut dyn FnMut() -> bool,
        outcomes: &mut Vec<bool>,
    ) {
        use crate::circuit::Gate;
        // Only intrinsically random measurements consume a bit from
        // `random_outcome`, so callers can enumerate exactly the free
        // outcome patterns.
        let mut measure = |t: &mut Self, p: Pauli| {
            let wanted = if t.expectation(&p).is_none() {
                random_outcome()
            } else {
                false
            };
            t.measure_pauli(&p, wanted).0
        };
        for step in &c.steps[steps] {
            for g in step {
                match *g {
                    Gate::PrepZ(q) => self.prep_z(q),
                    Gate::PrepX(q) => self.prep_x(q),
                    Gate::PrepH(q) => match prep_h_as {
                        Some(false) => self.prep_z(q),
                        Some(true) => self.prep_x(q),
                        None => panic!("PrepH in Clifford-only oracle run"),
                    },
                    Gate::Cnot(a, b) => self.cnot(a, b),
                    Gate::Cz(a, b) => self.cz(a, b),
                    Gate::Hadamard(q) => self.h(q),
                    Gate::TGate(_) | Gate::TDagger(_) => {
                        panic!("non-Clifford gate in tableau oracle run")
                    }
                    Gate::MeasZ(q) => outcomes.push(measure(self, Pauli::single_z(q))),
                    Gate::MeasX(q) => outcomes.push(measure(self, Pauli::single_x(q))),
                    Gate::MeasY(q) => outcomes.push(measure(self, Pauli::single_y(q))),
                }
            }
        }
    }

    /// Reset a qubit to |0⟩ regardless of its current state.
    pub fn prep_z(&mut self, q: usize) {
        let (bit, _) = self.measure_pauli(&Pauli::single_z(q), false);
        if bit {
            self.apply_pauli(&Pauli::single_x(q));
        }
    }

    /// Reset a qubit to |+⟩.
    pub fn prep_x(&mut self, q: usize) {
        let (bit, _) = self.measure_pauli(&Pauli::single_x(q), false);
        if bit {
            self.apply_pauli(&Pauli::single_z(q));
        }
    }
}
