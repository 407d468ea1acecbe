//! Code-growing circuits: from a bare physical qubit into a distance-d
//! block, and from a smaller block into a larger one.
//!
//! Growing from a physical qubit (`d_from == 1`): the injected qubit becomes
//! qubit 0 of the target lattice, every other data qubit starts in |0⟩, and
//! one round measures all face X-generators plus the weight-2 pair
//! X-operators in parallel (bare ancillas, CNOT layers packed by bipartite
//! edge coloring), followed by a Z-type measurement of the white faces.
//! Every outcome is consumed by a Pauli correction: non-white outcomes by
//! single-qubit Z strings (a fixed GF(2) solve), white outcomes by products
//! of pair operators found by minimum-weight matching on a 1-D path graph.
//!
//! Growing a block (`d_from > 1`): the input block occupies qubits
//! 0..n_from, new qubits start in |0⟩. Phase A fixes the outside stabilizer
//! state (outside faces and pairs, bare ancillas); its corrections must be
//! applied before phase B so that the merged-face outcomes become
//! deterministic. Phase B measures every non-block face, X-type then Z-type,
//! with flagged gadgets (weight-4: 1 ancilla + 2 flags; weight-6: 1 ancilla
//! + 3 flags with interleaved double couplings), repeated `d_from` times;
//! repeats of the random white outcomes must agree, all other face outcomes
//! must be trivial, and the first-repeat white outcomes feed the matching
//! corrections.

use super::ec::{schedule_gadgets, w4_gadget, Gadget, GadgetOp, OpEnd};
use super::{bipartite_edge_coloring, CatalogEntry, MeasuredOperator, SyndromeCheck};
use crate::circuit::{Circuit, Gate, QubitRole};
use crate::lattice::{build_grow_structure, GrowError, GrowStructure};
use crate::pauli::Pauli;

/// Edge of a 1-D matching graph: a weight-2 pair operator, incident to the
/// one or two white-face vertices it anticommutes with.
#[derive(Clone, Debug)]
pub struct MatchingEdge {
    /// Indices into the white-face (vertex) list; length 1 for a boundary
    /// edge, 2 for an interior edge.
    pub vertices: Vec<usize>,
    /// Index of the pair in `GrowStructure::pairs`.
    pub pair: usize,
    /// Support mask of the pair operator.
    pub mask: u128,
}

/// Path-shaped matching graph over white-face measurement bits. The same
/// incidence serves both X-type outcomes (repaired by Z-type pair products)
/// and Z-type outcomes (repaired by X-type pair products).
#[derive(Clone, Debug)]
pub struct MatchingGraph1D {
    /// true: corrections are Z-type (repairing X-type white outcomes).
    pub z_corrections: bool,
    pub num_vertices: usize,
    pub edges: Vec<MatchingEdge>,
}

/// Build the X-outcome and Z-outcome matching graphs of a growing step.
pub fn matching_graphs(s: &GrowStructure) -> (MatchingGraph1D, MatchingGraph1D) {
    let edges: Vec<MatchingEdge> = s
        .pairs
        .iter()
        .enumerate()
        .map(|(p, &(a, b))| {
            let vertices: Vec<usize> = (0..s.whites.len())
                .filter(|&w| s.correction_matrix[w][p] == 1)
                .collect();
            assert!(
                vertices.len() == 1 || vertices.len() == 2,
                "pair must touch one or two whites"
            );
            MatchingEdge {
                vertices,
                pair: p,
                mask: (1u128 << a) | (1u128 << b),
            }
        })
        .collect();
    let make = |z_corrections| MatchingGraph1D {
        z_corrections,
        num_vertices: s.whites.len(),
        edges: edges.clone(),
    };
    (make(true), make(false))
}

/// Minimum-weight correction making every white outcome even: exact dynamic
/// programming left-to-right along the path, carrying the parity owed by the
/// interior edge into the next vertex.
pub fn matching_correction(g: &MatchingGraph1D, outcomes: &[u8]) -> Pauli {
    assert_eq!(outcomes.len(), g.num_vertices);
    // Classify edges; the interior edges must form disjoint simple chains,
    // in general not in vertex-index order.
    let mut boundary: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices];
    for (ei, e) in g.edges.iter().enumerate() {
        match e.vertices.as_slice() {
            &[v] => boundary[v].push(ei),
            &[a, b] => {
                adj[a].push(ei);
                adj[b].push(ei);
            }
            _ => unreachable!(),
        }
    }
    assert!(
        adj.iter().all(|a| a.len() <= 2),
        "interior edges must form simple chains"
    );
    // Walk out the chains: each is a vertex sequence with the connecting
    // interior edge between consecutive entries.
    let mut visited = vec![false; g.num_vertices];
    let mut chains: Vec<Vec<(usize, Option<usize>)>> = Vec::new(); // (vertex, edge to next)
    for start in 0..g.num_vertices {
        if visited[start] || adj[start].len() == 2 {
            continue;
        }
        let mut chain = Vec::new();
        let (mut v, mut came_by) = (start, usize::MAX);
        loop {
            visited[v] = true;
            let next_edge = adj[v].iter().copied().find(|&e| e != came_by);
            chain.push((v, next_edge));
            match next_edge {
                None => break,
                Some(e) => {
                    let &[a, b] = g.edges[e].vertices.as_slice() else {
                        unreachable!()
                    };
                    v = if a == v { b } else { a };
                    came_by = e;
                }
            }
        }
        chains.push(chain);
    }
    assert!(visited.iter().all(|&b| b), "interior edges form a cycle");

    // Exact DP per chain: state = parity carried into the current vertex by
    // the previous interior edge.
    const INF: u32 = u32::MAX;
    let mut total_set = 0u64;
    for chain in &chains {
        let mut dp: [(u32, u64); 2] = [(0, 0), (INF, 0)];
        for (pos, &(v, next_edge)) in chain.iter().enumerate() {
            let mut next: [(u32, u64); 2] = [(INF, 0), (INF, 0)];
            for carry in 0..2usize {
                if dp[carry].0 == INF {
                    continue;
                }
                for bsel in 0u32..(1 << boundary[v].len()) {
                    let bpar = (bsel.count_ones() & 1) as usize;
                    let mut cost = dp[carry].0;
                    let mut set = dp[carry].1;
                    for (k, &ei) in boundary[v].iter().enumerate() {
                        if bsel >> k & 1 == 1 {
                            cost += 2;
                            set |= 1 << ei;
                        }
                    }
                    let need = (outcomes[v] as usize) ^ carry ^ bpar;
                    match next_edge {
                        Some(ei) => {
                            // Take the next interior edge iff the vertex
                            // still owes parity, carrying it onward.
                            let (c2, s2) = if need == 1 {
                                (cost + 2, set | (1 << ei))
                            } else {
                                (cost, set)
                            };
                            if c2 < next[need].0 {
                                next[need] = (c2, s2);
                            }
                        }
                        None => {
                            // End of the chain: parity must balance here.
                            if need == 0 && cost < next[0].0 {
                                next[0] = (cost, set);
                            }
                        }
                    }
                }
            }
            dp = next;
            let _ = pos;
        }
        assert_ne!(dp[0].0, INF, "white outcome pattern is not correctable");
        total_set |= dp[0].1;
    }
    let mut mask = 0u128;
    for (ei, e) in g.edges.iter().enumerate() {
        if total_set >> ei & 1 == 1 {
            mask ^= e.mask;
        }
    }
    if g.z_corrections {
        Pauli::z_on(mask)
    } else {
        Pauli::x_on(mask)
    }
}

/// A growing circuit plus the classical processing attached to it.
pub struct GrowEntry {
    pub entry: CatalogEntry,
    pub structure: GrowStructure,
    pub graph_x: MatchingGraph1D,
    pub graph_z: MatchingGraph1D,
    /// Number of times the phase-B measurement round repeats (1 when growing
    /// from a physical qubit, d_from otherwise).
    pub repetitions: usize,
    /// Index of the step holding the phase-A measurements. `mid_corrections`
    /// apply after this step; applying them there makes every deterministic
    /// phase-B outcome trivial.
    pub phase_a_end_step: usize,
    /// (measurement index, correction): apply the Pauli iff the outcome bit
    /// flips, immediately after `phase_a_end_step`.
    pub mid_corrections: Vec<(usize, Pauli)>,
    /// Same, applied after the full circuit.
    pub end_corrections: Vec<(usize, Pauli)>,
    /// Measurement indices of the white X-type outcomes feeding `graph_x`
    /// (first repeat), in white order; likewise for Z.
    pub white_x_meas: Vec<usize>,
    pub white_z_meas: Vec<usize>,
}

/// For each op (row) find a Z-string inside `allowed` that anticommutes with
/// exactly that op among all the rows: a GF(2) right inverse via
/// Gauss–Jordan with rhs columns tracking row combinations. Returns None if
/// the rows are dependent (no such correctors exist).
fn gf2_unit_correctors(ops: &[u128], allowed: u128) -> Option<Vec<u128>> {
    let k = ops.len();
    assert!(k <= 64);
    // (row mask over allowed columns, combination of original rows)
    let mut reduced: Vec<(u128, u64, usize)> = Vec::new(); // (mask, rhs, pivot col)
    for (i, &m0) in ops.iter().enumerate() {
        let mut m = m0 & allowed;
        let mut rhs = 1u64 << i;
        for &(pm, prhs, pcol) in &reduced {
            if m >> pcol & 1 == 1 {
                m ^= pm;
                rhs ^= prhs;
            }
        }
        if m == 0 {
            return None;
        }
        let pcol = m.trailing_zeros() as usize;
        for prev in &mut reduced {
            if prev.0 >> pcol & 1 == 1 {
                prev.0 ^= m;
                prev.1 ^= rhs;
            }
        }
        reduced.push((m, rhs, pcol));
    }
    // With free variables at zero, row r forces x[pivot_r] = <rhs_r, b>; for
    // b = e_i collect the pivots whose combination contains row i.
    let mut out = vec![0u128; k];
    for &(_m, rhs, pcol) in &reduced {
        for (i, o) in out.iter_mut().enumerate() {
            if rhs >> i & 1 == 1 {
                *o |= 1u128 << pcol;
            }
        }
    }
    // Paranoia: verify the defining property.
    for (i, &c) in out.iter().enumerate() {
        for (j, &op) in ops.iter().enumerate() {
            let anti = (c & op).count_ones() % 2 == 1;
            assert_eq!(anti, i == j, "corrector property violated");
        }
    }
    Some(out)
}

fn mask_qubits(mut m: u128) -> Vec<usize> {
    let mut v = Vec::new();
    while m != 0 {
        v.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    v
}

pub fn build_grow_circuit(d_from: usize, d_to: usize) -> Result<GrowEntry, GrowError> {
    let s = build_grow_structure(d_from, d_to)?;
    Ok(if d_from == 1 {
        build_grow_from_physical(s)
    } else {
        build_grow_from_block(s)
    })
}

fn build_grow_from_physical(s: GrowStructure) -> GrowEntry {
    let lat = &s.lattice;
    let n = lat.n;
    let f_count = lat.faces.len();
    let w_count = s.whites.len();
    // The injected qubit's X value is random on a magic state; every face
    // touching it must therefore be white (repairable), or the construction
    // would destroy the input.
    for (i, f) in lat.faces.iter().enumerate() {
        if f.mask & 1 == 1 {
            assert!(s.whites.contains(&i), "face {i} touches qubit 0 but is not white");
        }
    }

    // Phase-A ops in measurement order: all faces (X-type), then all pairs.
    let mut ops: Vec<u128> = lat.faces.iter().map(|f| f.mask).collect();
    ops.extend(s.pairs.iter().map(|&(a, b)| (1u128 << a) | (1u128 << b)));
    let a_count = ops.len();
    let anc_a = |i: usize| n + i;
    let anc_b = |w: usize| n + a_count + w;
    let num_qubits = n + a_count + w_count;

    let mut roles = vec![QubitRole::Data; n];
    roles.extend(vec![QubitRole::Ancilla; a_count + w_count]);
    let mut c = Circuit::new(num_qubits, roles);

    // Preparations.
    let mut s0: Vec<Gate> = vec![Gate::PrepH(0)];
    s0.extend((1..n).map(Gate::PrepZ));
    s0.extend((0..a_count).map(|i| Gate::PrepX(anc_a(i))));
    c.push_step(s0);

    // X-coupling layers, packed by edge coloring (ancilla side degree =
    // operator weight <= 6; data side degree <= #faces + 1 <= 4).
    let edges: Vec<(usize, usize)> = ops
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| mask_qubits(m).into_iter().map(move |q| (i, q)))
        .collect();
    let (delta, colors) = bipartite_edge_coloring(a_count, n, &edges);
    for col in 0..delta {
        let step: Vec<Gate> = edges
            .iter()
            .zip(&colors)
            .filter(|(_, &cc)| cc == col)
            .map(|(&(i, q), _)| Gate::Cnot(anc_a(i), q))
            .collect();
        c.push_step(step);
    }

    // Phase-A readout; the white Z-ancillas are prepared in the same step.
    let mut sm: Vec<Gate> = (0..a_count).map(|i| Gate::MeasX(anc_a(i))).collect();
    sm.extend((0..w_count).map(|w| Gate::PrepZ(anc_b(w))));
    let phase_a_end_step = c.depth();
    c.push_step(sm);

    // White Z-type couplings and readout.
    let bedges: Vec<(usize, usize)> = s
        .whites
        .iter()
        .enumerate()
        .flat_map(|(w, &f)| {
            lat.faces[f].qubits.iter().map(move |&q| (w, q)).collect::<Vec<_>>()
        })
        .collect();
    let (bdelta, bcolors) = bipartite_edge_coloring(w_count, n, &bedges);
    for col in 0..bdelta {
        let step: Vec<Gate> = bedges
            .iter()
            .zip(&bcolors)
            .filter(|(_, &cc)| cc == col)
            .map(|(&(w, q), _)| Gate::Cnot(q, anc_b(w)))
            .collect();
        c.push_step(step);
    }
    c.push_step((0..w_count).map(|w| Gate::MeasZ(anc_b(w))).collect());

    // Pad with idle steps to the fixed 14-step growing window.
    assert!(c.depth() <= 14, "growing round exceeds its window");
    while c.depth() < 14 {
        c.push_step(vec![]);
    }

    let (graph_x, graph_z) = matching_graphs(&s);

    // Corrections. Non-white outcomes (faces and pairs) are repaired by
    // Z-strings on qubits 1..n; their side effect on the simultaneously
    // measured white X-outcomes is folded in as an extra pair correction,
    // keeping the whole map linear in the outcome bits.
    let allowed: u128 = ((1u128 << n) - 1) & !1;
    let nonwhite: Vec<(usize, u128)> = ops
        .iter()
        .enumerate()
        .filter(|(i, _)| *i >= f_count || !s.whites.contains(i))
        .map(|(i, &m)| (i, m))
        .collect();
    let correctors = gf2_unit_correctors(
        &nonwhite.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        allowed,
    )
    .expect("non-white growing outcomes must be independently correctable");
    let mut end_corrections: Vec<(usize, Pauli)> = Vec::new();
    for (j, &(mi, _)) in nonwhite.iter().enumerate() {
        let cmask = correctors[j];
        let adj: Vec<u8> = s
            .whites
            .iter()
            .map(|&w| ((cmask & lat.faces[w].mask).count_ones() % 2) as u8)
            .collect();
        let p = Pauli::z_on(cmask).mul(&matching_correction(&graph_x, &adj));
        end_corrections.push((mi, p));
    }
    let mut white_x_meas = Vec::new();
    let mut white_z_meas = Vec::new();
    for (wi, &w) in s.whites.iter().enumerate() {
        let mut unit = vec![0u8; w_count];
        unit[wi] = 1;
        end_corrections.push((w, matching_correction(&graph_x, &unit)));
        end_corrections.push((a_count + wi, matching_correction(&graph_z, &unit)));
        white_x_meas.push(w);
        white_z_meas.push(a_count + wi);
    }

    let entry = CatalogEntry {
        id: format!("grow-1-{}", s.d_to),
        circuit: c,
        measured: MeasuredOperator::Stabilizers(vec![]),
        claimed_t: 0,
        num_data: n,
        flag_meas: vec![],
        checks: vec![],
        ghz_parity: None,
        twirl_steps: vec![],
    };
    GrowEntry {
        entry,
        structure: s,
        graph_x,
        graph_z,
        repetitions: 1,
        phase_a_end_step,
        mid_corrections: vec![],
        end_corrections,
        white_x_meas,
        white_z_meas,
    }
}

/// Weight-6 face gadget for block growth: one syndrome ancilla and three
/// double-coupled flags whose windows jointly cover every dangerous hook
/// position (an ancilla X arising with 2..4 data CNOTs still to come).
fn w6_grow_gadget(face_qubits: &[usize], anc: usize, fl: [usize; 3]) -> Gadget {
    let d = |after: Vec<usize>| GadgetOp {
        control: OpEnd::Fixed(anc),
        target: OpEnd::Data,
        after,
        cz: false,
    };
    let f = |t: usize, after: Vec<usize>| GadgetOp {
        control: OpEnd::Fixed(anc),
        target: OpEnd::Fixed(t),
        after,
        cz: false,
    };
    Gadget {
        ops: vec![
            d(vec![]),           // 0: data 1
            f(fl[0], vec![0]),   // 1
            d(vec![1]),          // 2: data 2
            f(fl[1], vec![2]),   // 3
            d(vec![3]),          // 4: data 3
            f(fl[2], vec![4]),   // 5
            d(vec![5]),          // 6: data 4
            f(fl[0], vec![6]),   // 7
            d(vec![7]),          // 8: data 5
            f(fl[1], vec![8]),   // 9
            d(vec![9]),          // 10: data 6
            f(fl[2], vec![10]),  // 11
        ],
        data_pool: face_qubits.to_vec(),
        window: None,
        x_phase: false,
        z_phase: false,
        suffix_face: None,
    }
}

fn dual_gate(g: &Gate) -> Gate {
    match *g {
        Gate::PrepX(q) => Gate::PrepZ(q),
        Gate::PrepZ(q) => Gate::PrepX(q),
        Gate::MeasX(q) => Gate::MeasZ(q),
        Gate::MeasZ(q) => Gate::MeasX(q),
        Gate::Cnot(a, b) => Gate::Cnot(b, a),
        ref other => panic!("no dual for {other:?}"),
    }
}

fn build_grow_from_block(s: GrowStructure) -> GrowEntry {
    let lat = &s.lattice;
    let n = lat.n;
    let n1 = s.n_from;
    let block_mask: u128 = (1u128 << n1) - 1;
    let p_count = s.pairs.len();
    let reps = s.d_from;

    // Faces not fully inside the block get a flagged gadget.
    let non_block: Vec<usize> = (0..lat.faces.len())
        .filter(|&f| lat.faces[f].mask & !block_mask != 0)
        .collect();
    struct FaceQ {
        face: usize,
        anc: usize,
        flags: Vec<usize>,
    }
    let mut next = n;
    let face_q: Vec<FaceQ> = non_block
        .iter()
        .map(|&f| {
            let nf = if lat.faces[f].qubits.len() == 4 { 2 } else { 3 };
            let anc = next;
            let flags: Vec<usize> = (0..nf).map(|k| next + 1 + k).collect();
            next += 1 + nf;
            FaceQ { face: f, anc, flags }
        })
        .collect();
    let pair_anc: Vec<usize> = (0..p_count).map(|i| next + i).collect();
    let num_qubits = next + p_count;

    let mut roles = vec![QubitRole::Data; n];
    roles.resize(num_qubits, QubitRole::Ancilla);
    for fq in &face_q {
        for &f in &fq.flags {
            roles[f] = QubitRole::Flag;
        }
    }
    let mut c = Circuit::new(num_qubits, roles);

    // Phase A: outside faces (reusing their gadget ancilla) and pairs.
    let a_ops: Vec<(u128, usize)> = s
        .outside_faces
        .iter()
        .map(|&f| {
            let anc = face_q.iter().find(|fq| fq.face == f).unwrap().anc;
            (lat.faces[f].mask, anc)
        })
        .chain(
            s.pairs
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| ((1u128 << a) | (1u128 << b), pair_anc[i])),
        )
        .collect();
    let a_count = a_ops.len();
    let mut s0: Vec<Gate> = (n1..n).map(Gate::PrepZ).collect();
    s0.extend(a_ops.iter().map(|&(_, anc)| Gate::PrepX(anc)));
    c.push_step(s0);
    let edges: Vec<(usize, usize)> = a_ops
        .iter()
        .enumerate()
        .flat_map(|(i, &(m, _))| mask_qubits(m).into_iter().map(move |q| (i, q)))
        .collect();
    let (delta, colors) = bipartite_edge_coloring(a_count, n, &edges);
    for col in 0..delta {
        let step: Vec<Gate> = edges
            .iter()
            .zip(&colors)
            .filter(|(_, &cc)| cc == col)
            .map(|(&(i, q), _)| Gate::Cnot(a_ops[i].1, q))
            .collect();
        c.push_step(step);
    }
    let phase_a_end_step = c.depth();
    c.push_step(a_ops.iter().map(|&(_, anc)| Gate::MeasX(anc)).collect());

    // Phase B: one scheduled X-round template, its dual Z-round, repeated.
    // Schedule the most constrained (weight-6) gadgets first.
    let mut order: Vec<usize> = (0..face_q.len()).collect();
    order.sort_by_key(|&k| {
        (
            std::cmp::Reverse(lat.faces[face_q[k].face].qubits.len()),
            k,
        )
    });
    let gadgets: Vec<Gadget> = order
        .iter()
        .map(|&k| {
            let fq = &face_q[k];
            let face = &lat.faces[fq.face];
            if face.qubits.len() == 4 {
                w4_gadget(&face.qubits, fq.anc, fq.flags[0], fq.flags[1])
            } else {
                w6_grow_gadget(&face.qubits, fq.anc, [fq.flags[0], fq.flags[1], fq.flags[2]])
            }
        })
        .collect();
    let sched = (12..=24)
        .find_map(|i| schedule_gadgets(&gadgets, i, num_qubits).map(|sc| (i, sc)))
        .expect("growing round scheduling failed");
    let (interior_slots, sched) = sched;
    let mut interior: Vec<Vec<Gate>> = vec![Vec::new(); interior_slots];
    for placed in &sched.placed {
        for &(slot, c0, t0) in placed {
            interior[slot].push(Gate::Cnot(c0, t0));
        }
    }
    let mut preps: Vec<Gate> = Vec::new();
    let mut meas: Vec<Gate> = Vec::new();
    for fq in &face_q {
        preps.push(Gate::PrepX(fq.anc));
        for &f in &fq.flags {
            preps.push(Gate::PrepZ(f));
        }
        meas.push(Gate::MeasX(fq.anc));
        for &f in &fq.flags {
            meas.push(Gate::MeasZ(f));
        }
    }
    for _rep in 0..reps {
        // X round, then its dual Z round.
        c.push_step(preps.clone());
        for step in &interior {
            c.push_step(step.clone());
        }
        c.push_step(meas.clone());
        c.push_step(preps.iter().map(dual_gate).collect());
        for step in &interior {
            c.push_step(step.iter().map(dual_gate).collect());
        }
        c.push_step(meas.iter().map(dual_gate).collect());
    }

    // Measurement indexing: phase A first, then per repeat the X round's
    // face-major (ancilla, flags...) block and the Z round's.
    let per_round: usize = face_q.iter().map(|fq| 1 + fq.flags.len()).sum();
    let mut anc_offset: Vec<usize> = Vec::with_capacity(face_q.len());
    {
        let mut off = 0;
        for fq in &face_q {
            anc_offset.push(off);
            off += 1 + fq.flags.len();
        }
    }
    let anc_idx = |rep: usize, x_round: bool, k: usize| {
        a_count + 2 * per_round * rep + if x_round { 0 } else { per_round } + anc_offset[k]
    };

    let mut checks: Vec<SyndromeCheck> = Vec::new();
    let mut stabs: Vec<Pauli> = Vec::new();
    let mut flag_meas: Vec<usize> = Vec::new();
    for rep in 0..reps {
        for x_round in [true, false] {
            for (k, fq) in face_q.iter().enumerate() {
                let idx = anc_idx(rep, x_round, k);
                flag_meas.extend((1..=fq.flags.len()).map(|j| idx + j));
                let stab = if x_round {
                    lat.x_stabilizer(fq.face)
                } else {
                    lat.z_stabilizer(fq.face)
                };
                if s.whites.contains(&fq.face) {
                    if rep > 0 {
                        // Repeats of a random white outcome must agree.
                        checks.push(SyndromeCheck {
                            meas_indices: vec![anc_idx(0, x_round, k), idx],
                            face: Some(fq.face),
                            x_type: x_round,
                        });
                        stabs.push(stab);
                    }
                } else {
                    checks.push(SyndromeCheck {
                        meas_indices: vec![idx],
                        face: Some(fq.face),
                        x_type: x_round,
                    });
                    stabs.push(stab);
                }
            }
        }
    }

    // Phase-A corrections: Z-strings on the new qubits, one per outcome.
    let new_mask: u128 = ((1u128 << n) - 1) & !block_mask;
    let correctors = gf2_unit_correctors(
        &a_ops.iter().map(|&(m, _)| m).collect::<Vec<_>>(),
        new_mask,
    )
    .expect("outside-state outcomes must be independently correctable");
    let mid_corrections: Vec<(usize, Pauli)> = correctors
        .iter()
        .enumerate()
        .map(|(i, &m)| (i, Pauli::z_on(m)))
        .collect();

    // End corrections: first-repeat white outcomes feed the matching graphs.
    let (graph_x, graph_z) = matching_graphs(&s);
    let mut white_x_meas = Vec::new();
    let mut white_z_meas = Vec::new();
    let mut end_corrections: Vec<(usize, Pauli)> = Vec::new();
    for (wi, &w) in s.whites.iter().enumerate() {
        let k = face_q.iter().position(|fq| fq.face == w).unwrap();
        let mut unit = vec![0u8; s.whites.len()];
        unit[wi] = 1;
        let xi = anc_idx(0, true, k);
        let zi = anc_idx(0, false, k);
        end_corrections.push((xi, matching_correction(&graph_x, &unit)));
        end_corrections.push((zi, matching_correction(&graph_z, &unit)));
        white_x_meas.push(xi);
        white_z_meas.push(zi);
    }

    let entry = CatalogEntry {
        id: format!("grow-{}-{}", s.d_from, s.d_to),
        circuit: c,
        measured: MeasuredOperator::Stabilizers(stabs),
        claimed_t: 1,
        num_data: n,
        flag_meas,
        checks,
        ghz_parity: None,
        twirl_steps: vec![],
    };
    GrowEntry {
        entry,
        structure: s,
        graph_x,
        graph_z,
        repetitions: reps,
        phase_a_end_step,
        mid_corrections,
        end_corrections,
        white_x_meas,
        white_z_meas,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;
    use crate::tableau::Tableau;
    use std::collections::VecDeque;

    #[test]
    fn smallest_growth_has_one_matching_vertex() {
        let ge = build_grow_circuit(1, 3).unwrap();
        assert_eq!(ge.graph_x.num_vertices, 1);
        assert_eq!(ge.graph_x.edges.len(), 1);
        assert_eq!(ge.graph_x.edges[0].vertices.len(), 1);
        let id = matching_correction(&ge.graph_x, &[0]);
        assert!(id.is_identity());
        let fix = matching_correction(&ge.graph_x, &[1]);
        assert_eq!(fix.support(), ge.graph_x.edges[0].mask);
        assert_eq!(fix.x, 0);
    }

    #[test]
    fn matching_agrees_with_linear_solver_on_all_patterns() {
        for (df, dt) in [(1, 3), (1, 5), (1, 7), (3, 5), (3, 7), (5, 7)] {
            let s = build_grow_structure(df, dt).unwrap();
            let (gx, gz) = matching_graphs(&s);
            let w = s.whites.len();
            for pat in 0..1u32 << w {
                let flips: Vec<u8> = (0..w).map(|i| (pat >> i & 1) as u8).collect();
                let want = s.correction_support(&flips);
                assert_eq!(matching_correction(&gx, &flips).support(), want);
                assert_eq!(matching_correction(&gz, &flips).support(), want);
                assert_eq!(matching_correction(&gx, &flips).x, 0);
                assert_eq!(matching_correction(&gz, &flips).z, 0);
            }
        }
    }

    /// Published four-case and eight-case correction tables, through the
    /// matching decoder.
    #[test]
    fn published_correction_tables() {
        let pm = |a: usize, b: usize| (1u128 << (a - 1)) | (1u128 << (b - 1));
        let ge = build_grow_circuit(1, 5).unwrap();
        let (g1, g2) = (pm(3, 5), pm(11, 15));
        let table = [(0u8, 0u8, 0u128), (0, 1, g2), (1, 0, g1 | g2), (1, 1, g1)];
        // whites ordered by face index: {1,2,3,4} then {5,8,11,12}.
        for (m1, m2, want) in table {
            let got = matching_correction(&ge.graph_x, &[m1, m2]);
            assert_eq!(got.support(), want, "({m1},{m2})");
        }
        let ge = build_grow_circuit(3, 7).unwrap();
        let (g1, g2, g3) = (pm(8, 9), pm(11, 15), pm(25, 31));
        // whites by face index: {5,8,11,12}, {6,7,9,10,13,14}, {15,20,25,26}
        // in 1-based labels; map the published (m1,m2,m3) ordering onto it.
        let lat = &ge.structure.lattice;
        let wpos = |set1: Vec<usize>| {
            let set0: Vec<usize> = set1.iter().map(|q| q - 1).collect();
            ge.structure
                .whites
                .iter()
                .position(|&w| lat.faces[w].qubits == set0)
                .unwrap()
        };
        let w1 = wpos(vec![6, 7, 9, 10, 13, 14]);
        let w2 = wpos(vec![5, 8, 11, 12]);
        let w3 = wpos(vec![15, 20, 25, 26]);
        let table: [(u8, u8, u8, u128); 8] = [
            (0, 0, 0, 0),
            (0, 0, 1, g3),
            (0, 1, 0, g2 | g3),
            (0, 1, 1, g2),
            (1, 0, 0, g1 | g2 | g3),
            (1, 0, 1, g1 | g2),
            (1, 1, 0, g1),
            (1, 1, 1, g1 | g3),
        ];
        for (m1, m2, m3, want) in table {
            let mut flips = vec![0u8; 3];
            flips[w1] = m1;
            flips[w2] = m2;
            flips[w3] = m3;
            assert_eq!(
                matching_correction(&ge.graph_x, &flips).support(),
                want,
                "({m1},{m2},{m3})"
            );
        }
    }

    #[test]
    fn physical_growth_shape() {
        for dt in [3usize, 5, 7] {
            let ge = build_grow_circuit(1, dt).unwrap();
            assert_eq!(ge.entry.circuit.depth(), 14, "d={dt}");
            assert_eq!(ge.repetitions, 1);
            assert!(ge.entry.checks.is_empty());
            assert_eq!(ge.entry.num_flags(), 0);
            assert!(ge.mid_corrections.is_empty());
            // Every measurement outcome is consumed by some correction.
            let meas = ge.entry.circuit.num_measurements();
            let mut seen: Vec<bool> = vec![false; meas];
            for &(i, _) in &ge.end_corrections {
                seen[i] = true;
            }
            assert!(seen.iter().all(|&b| b), "d={dt}");
        }
    }

    #[test]
    fn block_growth_shape() {
        for (df, dt) in [(3usize, 5usize), (3, 7), (5, 7)] {
            let ge = build_grow_circuit(df, dt).unwrap();
            let lat = build_lattice(dt).unwrap();
            // Faces fully inside the block keep no gadget; note that block
            // faces on the old boundary grow to weight 6 and need one.
            let n1 = (3 * df * df + 1) / 4;
            let block_mask: u128 = (1u128 << n1) - 1;
            let (mut w4, mut w6) = (0usize, 0usize);
            for f in &lat.faces {
                if f.mask & !block_mask != 0 {
                    if f.qubits.len() == 4 {
                        w4 += 1;
                    } else {
                        w6 += 1;
                    }
                }
            }
            let gadget_qubits = 3 * w4 + 4 * w6;
            let p = (dt - 1) / 2;
            assert_eq!(
                ge.entry.circuit.num_qubits,
                lat.n + gadget_qubits + p,
                "{df}->{dt}"
            );
            assert_eq!(ge.repetitions, df);
            assert_eq!(ge.entry.num_flags(), 2 * df * (2 * w4 + 3 * w6));
            // Deterministic checks: per repeat and round, every non-white
            // non-block face; plus white agreement checks for repeats > 0.
            let whites = ge.structure.whites.len();
            let non_block = w4 + w6;
            let expect = 2 * df * (non_block - whites) + 2 * (df - 1) * whites;
            assert_eq!(ge.entry.checks.len(), expect);
        }
    }

    /// Noiseless oracle: for every white outcome pattern (and sampled
    /// patterns of the remaining intrinsically random bits), running the
    /// growing circuit and applying its corrections leaves a state fixed by
    /// every X- and Z-generator of the target code, with the input's logical
    /// content transported (|0⟩ -> Z̄, |+⟩ -> X̄; linearity covers |H⟩).
    #[test]
    fn noiseless_growth_stabilizes_target_code() {
        for (df, dt) in [(1usize, 3usize), (1, 5), (1, 7), (3, 5), (3, 7), (5, 7)] {
            check_noiseless(df, dt, 3);
        }
    }

    fn check_noiseless(df: usize, dt: usize, samples: u64) {
        let ge = build_grow_circuit(df, dt).unwrap();
        let lat = &ge.structure.lattice;
        let w = ge.structure.whites.len();
        let circ = &ge.entry.circuit;
        for input_plus in [false, true] {
            for wx_pat in 0..1u32 << w {
                for wz_pat in 0..1u32 << w {
                    for sample in 0..samples {
                        let bits = expected_random_bits(&ge, wx_pat, wz_pat, sample);
                        let mut queue: VecDeque<bool> = bits.into();
                        let mut t = Tableau::new(circ.num_qubits);
                        if df > 1 {
                            prepare_block(&mut t, df, input_plus);
                        }
                        let mut outcomes = Vec::new();
                        let prep = if df == 1 { Some(input_plus) } else { None };
                        {
                            let mut rnd = || queue.pop_front().unwrap_or_else(|| panic!("{df}->{dt}: ran out of planned bits"));
                            t.run_circuit_range(
                                circ,
                                0..ge.phase_a_end_step + 1,
                                prep,
                                &mut rnd,
                                &mut outcomes,
                            );
                        }
                        for &(i, ref p) in &ge.mid_corrections {
                            if outcomes[i] {
                                t.apply_pauli(p);
                            }
                        }
                        {
                            let mut rnd = || queue.pop_front().unwrap_or_else(|| panic!("{df}->{dt}: ran out of planned bits"));
                            t.run_circuit_range(
                                circ,
                                ge.phase_a_end_step + 1..circ.depth(),
                                prep,
                                &mut rnd,
                                &mut outcomes,
                            );
                        }
                        assert!(queue.is_empty(), "{df}->{dt}: unconsumed planned bits");
                        for &(i, ref p) in &ge.end_corrections {
                            if outcomes[i] {
                                t.apply_pauli(p);
                            }
                        }
                        // Flags quiet, checks even.
                        for &fi in &ge.entry.flag_meas {
                            assert!(!outcomes[fi], "{df}->{dt}: flag raised noiselessly");
                        }
                        for ch in &ge.entry.checks {
                            let par = ch.meas_indices.iter().fold(false, |p, &i| p ^ outcomes[i]);
                            assert!(!par, "{df}->{dt}: check failed on face {:?}", ch.face);
                        }
                        // Target code fixed with +1 generators.
                        for f in 0..lat.faces.len() {
                            assert_eq!(
                                t.expectation(&lat.x_stabilizer(f)),
                                Some(false),
                                "{df}->{dt} X face {f}"
                            );
                            assert_eq!(
                                t.expectation(&lat.z_stabilizer(f)),
                                Some(false),
                                "{df}->{dt} Z face {f}"
                            );
                        }
                        let logical = if input_plus {
                            lat.logical_x()
                        } else {
                            lat.logical_z()
                        };
                        assert_eq!(
                            t.expectation(&logical),
                            Some(false),
                            "{df}->{dt}: logical content lost (plus={input_plus})"
                        );
                    }
                }
            }
        }
    }

    /// Project the block qubits of a fresh tableau onto the input logical
    /// state of the smaller code (|0̄⟩ or |+̄⟩).
    fn prepare_block(t: &mut Tableau, df: usize, plus: bool) {
        let small = build_lattice(df).unwrap();
        if plus {
            for q in 0..small.n {
                t.prep_x(q);
            }
            for f in 0..small.faces.len() {
                let (bit, _) = t.measure_pauli(&small.z_stabilizer(f), false);
                assert!(!bit);
            }
        } else {
            for f in 0..small.faces.len() {
                let (bit, _) = t.measure_pauli(&small.x_stabilizer(f), false);
                assert!(!bit);
            }
        }
    }

    /// Plan the exact sequence of bits the oracle run will request: the
    /// intrinsically random outcomes in measurement order. Phase-A outcomes
    /// are all random (pseudo-random from `sample`, except that white faces
    /// take their enumerated bits in the physical-qubit construction); in
    /// phase B only the first-repeat white outcomes are random and take the
    /// enumerated bits.
    fn expected_random_bits(ge: &GrowEntry, wx: u32, wz: u32, sample: u64) -> Vec<bool> {
        let s = &ge.structure;
        let mut state = sample
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(ge.structure.d_to as u64);
        let mut pseudo = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 63 == 1
        };
        let mut bits = Vec::new();
        if s.d_from == 1 {
            let f_count = s.lattice.faces.len();
            for i in 0..f_count + s.pairs.len() {
                if let Some(wi) = s.whites.iter().position(|&wf| wf == i) {
                    bits.push(wx >> wi & 1 == 1);
                } else {
                    bits.push(pseudo());
                }
            }
            for wi in 0..s.whites.len() {
                bits.push(wz >> wi & 1 == 1);
            }
        } else {
            let a_count = s.outside_faces.len() + s.pairs.len();
            for _ in 0..a_count {
                bits.push(pseudo());
            }
            // First-repeat rounds: whites are random in face-major order.
            for round_x in [true, false] {
                for wi in 0..s.whites.len() {
                    let pat = if round_x { wx } else { wz };
                    bits.push(pat >> wi & 1 == 1);
                }
            }
        }
        bits
    }
}
