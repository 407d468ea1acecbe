//! Authoritative circuit constructions: stabilizer-measurement rounds
//! (`ec`), logical-Hadamard measurement (`hm`), and code-growing circuits
//! (`grow`), plus the metadata (checks, flags, twirl layers, outcome
//! corrections) the simulator and verifier consume.

pub mod ec;
pub mod grow;
pub mod hm;

use crate::circuit::Circuit;
use crate::pauli::Pauli;
use serde::{Deserialize, Serialize};

/// What a catalog circuit measures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum MeasuredOperator {
    /// A set of commuting Pauli stabilizers (one per syndrome check).
    Stabilizers(Vec<Pauli>),
    /// Transversal logical Hadamard H⊗n on the data qubits.
    LogicalHadamard,
}

/// One syndrome check: the XOR of the listed measurement outcomes must be
/// even, otherwise the protocol aborts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SyndromeCheck {
    pub meas_indices: Vec<usize>,
    /// Index of the face in the lattice face list, where applicable.
    pub face: Option<usize>,
    pub x_type: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub circuit: Circuit,
    pub measured: MeasuredOperator,
    /// The t-flag order this entry is claimed (and verified) to satisfy.
    pub claimed_t: usize,
    pub num_data: usize,
    /// Measurement indices whose nonzero outcome means "a flag was raised".
    pub flag_meas: Vec<usize>,
    /// Syndrome checks (abort on odd parity). Empty for growing circuits,
    /// whose outcomes are consumed by corrections instead.
    pub checks: Vec<SyndromeCheck>,
    /// Measurement indices whose XOR forms the GHZ X⊗m parity (H_m only).
    pub ghz_parity: Option<Vec<usize>>,
    /// Steps (0-based) holding a transversal T/T† layer on data; the frame
    /// simulator canonicalizes the Z-component and twirls at these steps.
    pub twirl_steps: Vec<usize>,
}

impl CatalogEntry {
    pub fn num_flags(&self) -> usize {
        self.flag_meas.len()
    }
}

/// Step-slot reservation helper used by the schedulers.
#[derive(Clone)]
pub struct SlotGrid {
    /// busy[s] = bitmask of qubits occupied in step s.
    pub busy: Vec<u128>,
    pub gates: Vec<Vec<crate::circuit::Gate>>,
}

impl SlotGrid {
    pub fn new(num_steps: usize) -> Self {
        SlotGrid {
            busy: vec![0; num_steps],
            gates: vec![Vec::new(); num_steps],
        }
    }

    pub fn free(&self, step: usize, mask: u128) -> bool {
        self.busy[step] & mask == 0
    }

    pub fn place(&mut self, step: usize, gate: crate::circuit::Gate) {
        let (a, b) = gate.qubits();
        let mut mask = 1u128 << a;
        if let Some(b) = b {
            mask |= 1 << b;
        }
        assert!(self.free(step, mask), "slot collision at step {step}");
        self.busy[step] |= mask;
        self.gates[step].push(gate);
    }

    pub fn unplace(&mut self, step: usize, gate: crate::circuit::Gate) {
        let (a, b) = gate.qubits();
        let mut mask = 1u128 << a;
        if let Some(b) = b {
            mask |= 1 << b;
        }
        self.busy[step] &= !mask;
        let pos = self
            .gates[step]
            .iter()
            .rposition(|g| *g == gate)
            .expect("unplace of absent gate");
        self.gates[step].remove(pos);
    }

    /// Convert into circuit steps (dropping empty trailing steps is the
    /// caller's choice; here all steps are kept).
    pub fn into_steps(self) -> Vec<Vec<crate::circuit::Gate>> {
        self.gates
    }
}

/// Proper edge coloring of a bipartite multigraph with Δ colors (König).
/// Edges are (left, right) pairs; returns a color index per edge.
/// Used to pack ancilla→data CNOT layers into minimal depth.
pub fn bipartite_edge_coloring(
    num_left: usize,
    num_right: usize,
    edges: &[(usize, usize)],
) -> (usize, Vec<usize>) {
    let delta = {
        let mut dl = vec![0usize; num_left];
        let mut dr = vec![0usize; num_right];
        for &(u, v) in edges {
            dl[u] += 1;
            dr[v] += 1;
        }
        dl.iter().chain(dr.iter()).copied().max().unwrap_or(0)
    };
    // color_left[u][c] = edge index using color c at left vertex u (usize::MAX = free)
    let mut color_left = vec![vec![usize::MAX; delta]; num_left];
    let mut color_right = vec![vec![usize::MAX; delta]; num_right];
    let mut color = vec![usize::MAX; edges.len()];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        let a = (0..delta).find(|&c| color_left[u][c] == usize::MAX).unwrap();
        let b = (0..delta)
            .find(|&c| color_right[v][c] == usize::MAX)
            .unwrap();
        if a == b {
            color[idx] = a;
            color_left[u][a] = idx;
            color_right[v][a] = idx;
            continue;
        }
        // Flip the a/b alternating path starting at v (which lacks color a).
        // Walk: v has some edge colored a? No (b was chosen because free?
        // v lacks b; v may have a). Standard König recoloring: free color a
        // at v by swapping along the path of alternating a/b edges from v.
        let mut cur_vertex_is_right = true;
        let mut cur = v;
        let (ca, cb) = (a, b);
        let mut swap_edges: Vec<usize> = Vec::new();
        let mut want = ca; // color to vacate at current vertex
        loop {
            let e = if cur_vertex_is_right {
                color_right[cur][want]
            } else {
                color_left[cur][want]
            };
            if e == usize::MAX {
                break;
            }
            swap_edges.push(e);
            let (eu, ev) = edges[e];
            cur = if cur_vertex_is_right { eu } else { ev };
            cur_vertex_is_right = !cur_vertex_is_right;
            want = if want == ca { cb } else { ca };
        }
        for &e in &swap_edges {
            let (eu, ev) = edges[e];
            let old = color[e];
            let new = if old == ca { cb } else { ca };
            color_left[eu][old] = usize::MAX;
            color_right[ev][old] = usize::MAX;
            color[e] = new;
            color_left[eu][new] = idx; // placeholder, fixed below
            color_right[ev][new] = idx;
        }
        // Rewrite the tables for swapped edges with their own indices.
        for &e in &swap_edges {
            let (eu, ev) = edges[e];
            color_left[eu][color[e]] = e;
            color_right[ev][color[e]] = e;
        }
        // Now color a is free at v as well as at u.
        debug_assert_eq!(color_left[u][a], usize::MAX);
        debug_assert_eq!(color_right[v][a], usize::MAX);
        color[idx] = a;
        color_left[u][a] = idx;
        color_right[v][a] = idx;
    }
    (delta, color)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_coloring_is_proper_and_uses_delta_colors() {
        // K_{3,3} plus a pendant edge: delta = 4.
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in 0..3 {
                edges.push((u, v));
            }
        }
        edges.push((0, 3));
        let (delta, color) = bipartite_edge_coloring(4, 4, &edges);
        assert_eq!(delta, 4);
        for (i, &(u1, v1)) in edges.iter().enumerate() {
            assert!(color[i] < delta);
            for (j, &(u2, v2)) in edges.iter().enumerate() {
                if i != j && color[i] == color[j] {
                    assert!(u1 != u2 && v1 != v2, "improper coloring");
                }
            }
        }
    }

    #[test]
    fn edge_coloring_handles_multigraph_paths() {
        // A path graph alternating sides, delta 2.
        let edges = vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)];
        let (delta, color) = bipartite_edge_coloring(3, 3, &edges);
        assert_eq!(delta, 2);
        for (i, &(u1, v1)) in edges.iter().enumerate() {
            for (j, &(u2, v2)) in edges.iter().enumerate() {
                if i != j && color[i] == color[j] {
                    assert!(u1 != u2 && v1 != v2);
                }
            }
        }
    }
}
