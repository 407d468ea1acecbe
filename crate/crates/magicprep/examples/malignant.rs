//! Exhaustive two-fault census at d=3: enumerate all ordered pairs of fault
//! locations and fault choices, run a few twirl seeds each, and accumulate
//! the quadratic coefficient of the logical error rate broken down by
//! (segment, location-kind) pair.

use magicprep::circuit::LocationKind;
use magicprep::decoder::{classify_built, Classification};
use magicprep::framesim::TrialVerdict;
use magicprep::montecarlo::build_decoder;
use magicprep::noise::{fault_probability, fault_support, trial_rng, Fault, NoiseModel};
use magicprep::protocol::{Injection, Protocol, Segment};
use rayon::prelude::*;
use std::collections::HashMap;

fn main() {
    let d: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().unwrap())
        .unwrap_or(3);
    let seeds: u64 = std::env::args()
        .nth(2)
        .map(|s| s.parse().unwrap())
        .unwrap_or(4);
    let proto = Protocol::new(d).unwrap();
    let table = build_decoder(&proto);
    let noiseless = NoiseModel { p: 0.0 };

    // Flatten all fault locations across the schedule.
    let mut segs = vec![Segment::Grow];
    segs.extend(proto.paired_schedule());
    let mut locs: Vec<(Segment, usize, LocationKind, (usize, Option<usize>))> = Vec::new();
    for &seg in &segs {
        let entry = proto.segment_entry(seg);
        for (item, loc) in entry.circuit.locations().iter().enumerate() {
            locs.push((seg, item, loc.kind, loc.qubits));
        }
    }
    println!("d={d} total locations={}", locs.len());
    let p = 1.0f64; // nominal; we report coefficient of p^2 assuming all rates scale with p

    // alpha contribution of an ordered pair = P(fault1)P(fault2)/(s1*s2*p^2)
    // summed over fault choices that are accepted+logical-failure, averaged
    // over twirl seeds. Accumulate by (seg-class, kind) x (seg-class, kind).
    let results: Vec<HashMap<(String, String), f64>> = (0..locs.len())
        .into_par_iter()
        .map(|i| {
            let mut acc: HashMap<(String, String), f64> = HashMap::new();
            let (seg1, item1, kind1, q1) = &locs[i];
            let sup1 = fault_support(*kind1, *q1);
            let w1 = fault_probability(*kind1, p) / sup1.len() as f64;
            for j in (i + 1)..locs.len() {
                let (seg2, item2, kind2, q2) = &locs[j];
                if seg1 == seg2 && item1 == item2 {
                    continue;
                }
                let sup2 = fault_support(*kind2, *q2);
                let w2 = fault_probability(*kind2, p) / sup2.len() as f64;
                let mut fail_weight = 0.0f64;
                for f1 in &sup1 {
                    for f2 in &sup2 {
                        let mut fails = 0u64;
                        for s in 0..seeds {
                            let mut rng = trial_rng(7777, (i as u64) << 32 | (j as u64) ^ s << 20);
                            let rec = proto.run_trial_injected(
                                &noiseless,
                                &mut rng,
                                &[
                                    Injection {
                                        segment: *seg1,
                                        item: *item1,
                                        fault: f1.clone(),
                                    },
                                    Injection {
                                        segment: *seg2,
                                        item: *item2,
                                        fault: f2.clone(),
                                    },
                                ],
                            );
                            if rec.verdict == TrialVerdict::Accepted {
                                match classify_built(&proto.lat, &table, &rec.residual) {
                                    Ok(Classification::Success) => {}
                                    _ => fails += 1,
                                }
                            }
                        }
                        fail_weight += w1 * w2 * fails as f64 / seeds as f64;
                    }
                }
                if fail_weight > 0.0 {
                    let k1 = format!("{:?}/{:?}", seg1, kind1);
                    let k2 = format!("{:?}/{:?}", seg2, kind2);
                    *acc.entry((k1, k2)).or_default() += fail_weight;
                }
            }
            acc
        })
        .collect();

    let mut total: HashMap<(String, String), f64> = HashMap::new();
    for m in results {
        for (k, v) in m {
            *total.entry(k).or_default() += v;
        }
    }
    let alpha: f64 = total.values().sum();
    println!("alpha (coefficient of p^2 in failure probability) = {alpha:.1}");
    let mut rows: Vec<_> = total.into_iter().collect();
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    for ((a, b), v) in rows.iter().take(25) {
        println!("{v:10.2}  {a}  x  {b}");
    }
}

fn _unused(_: Fault) {}
