use magicprep::catalog::ec;
fn main() {
    let d: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let (e, _) = ec::build_ec_circuit(d).unwrap();
    println!("{}", e.circuit.to_text());
    let locs = e.circuit.locations();
    let mut idle = 0;
    for l in &locs { if l.kind == magicprep::circuit::LocationKind::Idle { idle += 1; } }
    println!("locations={} idle={}", locs.len(), idle);
}
