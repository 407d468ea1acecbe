//! Fault-tolerant |H⟩ magic-state preparation on triangular color codes:
//! circuit catalog, flag verification, Monte Carlo estimation, and resource
//! overhead accounting.

pub mod catalog;
pub mod circuit;
pub mod decoder;
pub mod framesim;
pub mod lattice;
pub mod montecarlo;
pub mod noise;
pub mod overhead;
pub mod pauli;
pub mod protocol;
pub mod tableau;
pub mod verifier;
