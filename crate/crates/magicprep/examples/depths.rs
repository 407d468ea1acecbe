use magicprep::catalog::{ec, grow, hm};
fn main() {
    for d in [3usize, 5, 7] {
        let g = grow::build_grow_circuit(1, d).unwrap();
        let h = hm::build_hm_circuit(d).unwrap();
        let (e, _) = ec::build_ec_circuit(d).unwrap();
        println!(
            "d={d} grow_depth={} grow_locs={} hm_depth={} hm_locs={} ec_depth={} ec_locs={}",
            g.entry.circuit.steps.len(),
            g.entry.circuit.locations().len(),
            h.circuit.steps.len(),
            h.circuit.locations().len(),
            e.circuit.steps.len(),
            e.circuit.locations().len()
        );
    }
}
