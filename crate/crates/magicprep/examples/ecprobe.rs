//! Build the stabilizer round for the distance given on the command line
//! and print its depth and flag/check counts.
fn main() {
    let d: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let t0 = std::time::Instant::now();
    let (entry, layout) = magicprep::catalog::ec::build_ec_circuit(d).unwrap();
    println!(
        "d={d} depth={} qubits={} flags={} checks={} built in {:.1}s",
        entry.circuit.depth(),
        layout.num_qubits,
        entry.num_flags(),
        entry.checks.len(),
        t0.elapsed().as_secs_f64()
    );
}
