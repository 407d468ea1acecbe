//! Monte-Carlo campaign orchestration: trial batching, acceptance and
//! logical-error statistics with Wilson confidence intervals, and power-law
//! fitting and extrapolation of the logical error rate.
//!
//! Determinism: every trial draws from its own counter-based RNG stream
//! seeded by (campaign seed, trial index), and statistics are assembled by
//! associative counter addition, so results are bit-identical for a fixed
//! (seed, trials) at any worker count.

use crate::decoder::{classify_built, Classification, SyndromeTable};
use crate::framesim::{AbortReason, TrialVerdict};
use crate::noise::trial_rng;
use crate::protocol::{run_spec_trial, Protocol, ProtocolSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Abort tally, one counter per mutually exclusive reason.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbortCounts {
    pub stage1_syndrome: u64,
    pub stage1_logical: u64,
    pub flag: u64,
    pub w4_syndrome: u64,
    pub w6_parity: u64,
    pub ghz_parity: u64,
}

impl AbortCounts {
    pub fn total(&self) -> u64 {
        self.stage1_syndrome
            + self.stage1_logical
            + self.flag
            + self.w4_syndrome
            + self.w6_parity
            + self.ghz_parity
    }

    fn bump(&mut self, reason: AbortReason) {
        match reason {
            AbortReason::Stage1Syndrome => self.stage1_syndrome += 1,
            AbortReason::Stage1Logical => self.stage1_logical += 1,
            AbortReason::Flag => self.flag += 1,
            AbortReason::W4Syndrome => self.w4_syndrome += 1,
            AbortReason::W6Parity => self.w6_parity += 1,
            AbortReason::GhzParity => self.ghz_parity += 1,
        }
    }
}

/// Raw campaign counters; the checkpointable unit of progress.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub trials: u64,
    pub accepted: u64,
    pub aborts: AbortCounts,
    pub fail_x: u64,
    pub fail_y: u64,
    pub fail_z: u64,
    /// Accepted residuals whose syndrome exceeded the decoder table; counted
    /// as failures (conservatively) and reported separately.
    pub decode_failures: u64,
}

impl Counters {
    pub fn failures(&self) -> u64 {
        self.fail_x + self.fail_y + self.fail_z + self.decode_failures
    }

    pub fn merge(mut self, other: Counters) -> Counters {
        self.trials += other.trials;
        self.accepted += other.accepted;
        self.aborts.stage1_syndrome += other.aborts.stage1_syndrome;
        self.aborts.stage1_logical += other.aborts.stage1_logical;
        self.aborts.flag += other.aborts.flag;
        self.aborts.w4_syndrome += other.aborts.w4_syndrome;
        self.aborts.w6_parity += other.aborts.w6_parity;
        self.aborts.ghz_parity += other.aborts.ghz_parity;
        self.fail_x += other.fail_x;
        self.fail_y += other.fail_y;
        self.fail_z += other.fail_z;
        self.decode_failures += other.decode_failures;
        self
    }
}

/// 95% Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if phat == 1.0 { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Campaign summary: counters plus derived rates and provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MCStats {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub counters: Counters,
    pub p_acc: f64,
    pub p_acc_ci: (f64, f64),
    /// Failure rate among delivered (accepted) states.
    pub p_l: f64,
    pub p_l_ci: (f64, f64),
    pub decoder: String,
    pub wall_clock_secs: f64,
}

/// Decoder used for trial classification, built once and shared read-only.
/// The table is extended far enough to cover every syndrome reachable at
/// the correction radius; rarer, heavier syndromes are explicit decode
/// failures.
pub fn build_decoder(proto: &Protocol) -> SyndromeTable {
    let mut table = SyndromeTable::with_default_cap(&proto.lat);
    let build_w = match proto.d {
        3 => 5,
        5 => 4,
        _ => 3,
    };
    table.extend(&proto.lat, build_w);
    table
}

pub fn decoder_id(table: &SyndromeTable) -> String {
    format!(
        "exact-min-weight-table-w{}-cap{}",
        table.max_weight_built, table.weight_cap
    )
}

/// Run trials `range.start..range.end` and tally them. Deterministic for a
/// fixed seed at any worker count.
pub fn run_trial_range(
    proto: &Protocol,
    spec: &ProtocolSpec,
    table: &SyndromeTable,
    p: f64,
    seed: u64,
    range: std::ops::Range<u64>,
) -> Counters {
    const CHUNK: u64 = 1024;
    let start = range.start;
    let total = range.end.saturating_sub(range.start);
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * CHUNK;
            let hi = (lo + CHUNK).min(range.end);
            let mut acc = Counters::default();
            for t in lo..hi {
                let mut rng = trial_rng(seed, t);
                let rec = run_spec_trial(proto, spec, p, &mut rng);
                acc.trials += 1;
                match rec.verdict {
                    TrialVerdict::Aborted(reason) => acc.aborts.bump(reason),
                    TrialVerdict::Accepted => {
                        acc.accepted += 1;
                        match classify_built(&proto.lat, table, &rec.residual) {
                            Ok(Classification::Success) => {}
                            Ok(Classification::FailX) => acc.fail_x += 1,
                            Ok(Classification::FailY) => acc.fail_y += 1,
                            Ok(Classification::FailZ) => acc.fail_z += 1,
                            Err(_) => acc.decode_failures += 1,
                        }
                    }
                }
            }
            acc
        })
        .reduce(Counters::default, Counters::merge)
}

pub fn assemble_stats(
    proto: &Protocol,
    table: &SyndromeTable,
    p: f64,
    seed: u64,
    counters: Counters,
    wall_clock_secs: f64,
) -> MCStats {
    MCStats {
        d: proto.d,
        p,
        seed,
        counters,
        p_acc: counters.accepted as f64 / counters.trials.max(1) as f64,
        p_acc_ci: wilson_interval(counters.accepted, counters.trials),
        p_l: counters.failures() as f64 / counters.accepted.max(1) as f64,
        p_l_ci: wilson_interval(counters.failures(), counters.accepted),
        decoder: decoder_id(table),
        wall_clock_secs,
    }
}

/// Full campaign: build the decoder, run all trials on `workers` threads
/// (0 = rayon default), summarize.
pub fn run_campaign(
    proto: &Protocol,
    spec: &ProtocolSpec,
    p: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> MCStats {
    let table = build_decoder(proto);
    let start = std::time::Instant::now();
    let counters = if workers == 0 {
        run_trial_range(proto, spec, &table, p, seed, 0..trials)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(|| run_trial_range(proto, spec, &table, p, seed, 0..trials))
    };
    assemble_stats(proto, &table, p, seed, counters, start.elapsed().as_secs_f64())
}

/// One measured (p, p_L) point with its 95% CI, the fitting input.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitPoint {
    pub p: f64,
    pub p_l: f64,
    pub ci: (f64, f64),
}

/// Power law p_L = α · p^((d+1)/2), fitted in log space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub d: usize,
    pub alpha: f64,
    pub exponent: f64,
    /// Per-point log-space residuals ln(p_L) − ln(α p^e).
    pub residuals: Vec<f64>,
    pub points: Vec<FitPoint>,
    /// Present when any input p exceeds the model's validity range.
    pub warning: Option<String>,
}

/// Log-space standard deviation implied by a point's CI; falls back to a
/// unit weight when the interval is degenerate (e.g. zero failures).
fn log_sigma(pt: &FitPoint) -> f64 {
    let (lo, hi) = pt.ci;
    if lo > 0.0 && hi > lo && pt.p_l > 0.0 {
        ((hi / lo).ln() / (2.0 * 1.959_963_984_540_054)).max(1e-12)
    } else {
        1.0
    }
}

/// Weighted least squares for α with the exponent pinned to (d+1)/2.
pub fn fit_alpha(points: &[FitPoint], d: usize) -> PowerLawFit {
    assert!(!points.is_empty(), "fit needs at least one point");
    assert!(points.iter().all(|pt| pt.p > 0.0 && pt.p_l > 0.0));
    let exponent = (d + 1) as f64 / 2.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for pt in points {
        let w = 1.0 / log_sigma(pt).powi(2);
        num += w * (pt.p_l.ln() - exponent * pt.p.ln());
        den += w;
    }
    let ln_alpha = num / den;
    let alpha = ln_alpha.exp();
    let residuals = points
        .iter()
        .map(|pt| pt.p_l.ln() - (ln_alpha + exponent * pt.p.ln()))
        .collect();
    let warning = if points.iter().any(|pt| pt.p > 1e-3) {
        Some("input points above p = 1e-3: higher-order terms are not negligible".to_string())
    } else {
        None
    };
    PowerLawFit {
        d,
        alpha,
        exponent,
        residuals,
        points: points.to_vec(),
        warning,
    }
}

/// Pure evaluation of a fitted power law.
pub fn extrapolate(fit: &PowerLawFit, p: f64) -> f64 {
    fit.alpha * p.powf(fit.exponent)
}

/// Unweighted free-exponent regression ln p_L = ln α + e·ln p, used to check
/// the (d+1)/2 scaling empirically.
pub fn fit_free_exponent(points: &[FitPoint]) -> (f64, f64) {
    assert!(points.len() >= 2);
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|pt| pt.p.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|pt| pt.p_l.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let e = sxy / sxx;
    let alpha = (my - e * mx).exp();
    (alpha, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ProtocolMode;
    use rand::Rng;

    fn physical(d: usize) -> ProtocolSpec {
        ProtocolSpec {
            d,
            mode: ProtocolMode::Physical,
        }
    }

    #[test]
    fn zero_noise_accepts_everything() {
        let proto = Protocol::new(3).unwrap();
        let stats = run_campaign(&proto, &physical(3), 0.0, 1000, 5, 0);
        assert_eq!(stats.counters.trials, 1000);
        assert_eq!(stats.counters.accepted, 1000);
        assert_eq!(stats.p_acc, 1.0);
        assert_eq!(stats.p_l, 0.0);
        assert_eq!(stats.counters.aborts.total(), 0);
    }

    #[test]
    fn counters_are_bit_identical_across_worker_counts() {
        let proto = Protocol::new(3).unwrap();
        let spec = physical(3);
        let a = run_campaign(&proto, &spec, 2e-3, 20_000, 99, 1);
        let b = run_campaign(&proto, &spec, 2e-3, 20_000, 99, 4);
        let c = run_campaign(&proto, &spec, 2e-3, 20_000, 99, 0);
        assert_eq!(a.counters, b.counters);
        assert_eq!(a.counters, c.counters);
        // A different seed must disagree somewhere.
        let d = run_campaign(&proto, &spec, 2e-3, 20_000, 100, 0);
        assert_ne!(a.counters, d.counters);
    }

    #[test]
    fn split_ranges_reassemble_exactly() {
        // Checkpointing model: summing disjoint trial ranges equals one run.
        let proto = Protocol::new(3).unwrap();
        let spec = physical(3);
        let table = build_decoder(&proto);
        let whole = run_trial_range(&proto, &spec, &table, 1e-3, 7, 0..30_000);
        let parts = run_trial_range(&proto, &spec, &table, 1e-3, 7, 0..11_000)
            .merge(run_trial_range(&proto, &spec, &table, 1e-3, 7, 11_000..23_000))
            .merge(run_trial_range(&proto, &spec, &table, 1e-3, 7, 23_000..30_000));
        assert_eq!(whole, parts);
    }

    #[test]
    fn abort_accounting_is_exhaustive_and_exclusive() {
        let proto = Protocol::new(3).unwrap();
        let stats = run_campaign(&proto, &physical(3), 3e-3, 50_000, 11, 0);
        let c = &stats.counters;
        assert_eq!(c.accepted + c.aborts.total(), c.trials);
        assert!(c.failures() <= c.accepted);
        assert!(c.aborts.total() > 0, "this rate must produce aborts");
        // Every major channel should fire at this rate.
        assert!(c.aborts.stage1_syndrome > 0);
        assert!(c.aborts.flag > 0);
        assert!(c.aborts.ghz_parity > 0);
    }

    #[test]
    fn acceptance_rate_sanity_at_low_noise() {
        let proto = Protocol::new(3).unwrap();
        let stats = run_campaign(&proto, &physical(3), 1e-4, 100_000, 13, 0);
        assert!(
            stats.p_acc > 0.90 && stats.p_acc < 0.98,
            "p_acc = {}",
            stats.p_acc
        );
    }

    #[test]
    fn wilson_interval_brackets_the_rate() {
        let (lo, hi) = wilson_interval(0, 0);
        assert_eq!((lo, hi), (0.0, 1.0));
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.06);
        // Coverage on synthetic Bernoulli streams.
        let p = 0.3;
        let n = 1000u64;
        let mut rng = crate::noise::trial_rng(17, 0);
        let mut covered = 0;
        let reps = 400;
        for _ in 0..reps {
            let k = (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64;
            let (lo, hi) = wilson_interval(k, n);
            if lo <= p && p <= hi {
                covered += 1;
            }
        }
        let frac = covered as f64 / reps as f64;
        assert!(frac > 0.90 && frac <= 1.0, "coverage {frac}");
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let points: Vec<FitPoint> = [1e-4, 2e-4, 5e-4, 1e-3]
            .iter()
            .map(|&p| FitPoint {
                p,
                p_l: 10.0 * p * p,
                ci: (9.0 * p * p, 11.0 * p * p),
            })
            .collect();
        let fit = fit_alpha(&points, 3);
        assert!((fit.alpha - 10.0).abs() < 1e-6, "alpha = {}", fit.alpha);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-9));
        assert!(fit.warning.is_none());
        assert!((extrapolate(&fit, 1e-5) - 1e-9).abs() < 1e-15);
        let (alpha_free, e_free) = fit_free_exponent(&points);
        assert!((alpha_free - 10.0).abs() < 1e-6);
        assert!((e_free - 2.0).abs() < 1e-9);
    }

    #[test]
    fn single_point_fit_is_exact_division() {
        let pt = FitPoint {
            p: 3e-4,
            p_l: 4.2e-6,
            ci: (3e-6, 5e-6),
        };
        let fit = fit_alpha(&[pt], 5);
        assert_eq!(fit.exponent, 3.0);
        let expect = 4.2e-6 / (3e-4f64).powi(3);
        assert!((fit.alpha - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn out_of_range_points_attach_a_warning() {
        let points = [
            FitPoint {
                p: 5e-4,
                p_l: 1e-5,
                ci: (8e-6, 1.2e-5),
            },
            FitPoint {
                p: 2e-3,
                p_l: 1.5e-4,
                ci: (1e-4, 2e-4),
            },
        ];
        assert!(fit_alpha(&points, 3).warning.is_some());
    }
}
