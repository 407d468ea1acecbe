//! Phaseless n-qubit Pauli operators packed into a pair of 128-bit masks.
//!
//! Bit `q` of `x` means the operator acts with an X component on qubit `q`;
//! bit `q` of `z` means a Z component. A qubit with both bits set carries Y.
//! Global phase is not tracked: everywhere in this crate Paulis appear as
//! error frames or stabilizer supports, where only the symplectic content
//! matters.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Pauli {
    pub x: u128,
    pub z: u128,
}

impl Pauli {
    pub const IDENTITY: Pauli = Pauli { x: 0, z: 0 };

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    pub fn single_x(q: usize) -> Self {
        Pauli { x: 1 << q, z: 0 }
    }

    pub fn single_z(q: usize) -> Self {
        Pauli { x: 0, z: 1 << q }
    }

    pub fn single_y(q: usize) -> Self {
        Pauli {
            x: 1 << q,
            z: 1 << q,
        }
    }

    pub fn x_on(mask: u128) -> Self {
        Pauli { x: mask, z: 0 }
    }

    pub fn z_on(mask: u128) -> Self {
        Pauli { x: 0, z: mask }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Product (phaseless): component-wise XOR.
    pub fn mul(&self, other: &Pauli) -> Pauli {
        Pauli {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// True when the two operators commute.
    pub fn commutes(&self, other: &Pauli) -> bool {
        let overlap = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        overlap % 2 == 0
    }

    /// Restriction to the qubits selected by `mask`.
    pub fn restrict(&self, mask: u128) -> Pauli {
        Pauli {
            x: self.x & mask,
            z: self.z & mask,
        }
    }

    pub fn support(&self) -> u128 {
        self.x | self.z
    }
}

impl std::fmt::Debug for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for q in 0..128 {
            let bit = 1u128 << q;
            let label = match ((self.x & bit) != 0, (self.z & bit) != 0) {
                (false, false) => continue,
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            if !first {
                write!(f, ".")?;
            }
            write!(f, "{label}{q}")?;
            first = false;
        }
        Ok(())
    }
}
