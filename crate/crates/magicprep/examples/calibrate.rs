//! Quick calibration probe: logical error and acceptance rates for chosen
//! (d, p, trials) triples, printed as one line each.

use magicprep::montecarlo::run_campaign;
use magicprep::protocol::{Protocol, ProtocolMode, ProtocolSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let d: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(3);
    let p: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(5e-4);
    let trials: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1_000_000);
    let proto = Protocol::new(d).unwrap();
    let spec = ProtocolSpec {
        d,
        mode: ProtocolMode::Physical,
    };
    let stats = run_campaign(&proto, &spec, p, trials, 2024, 0);
    println!(
        "d={d} p={p:.1e} trials={trials} p_acc={:.4} [{:.4},{:.4}] p_L={:.3e} [{:.3e},{:.3e}] fails={} decode_fails={} wall={:.1}s",
        stats.p_acc,
        stats.p_acc_ci.0,
        stats.p_acc_ci.1,
        stats.p_l,
        stats.p_l_ci.0,
        stats.p_l_ci.1,
        stats.counters.failures(),
        stats.counters.decode_failures,
        stats.wall_clock_secs
    );
}
