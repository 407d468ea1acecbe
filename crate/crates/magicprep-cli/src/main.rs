//! Command-line front end: circuit catalog export, flag verification,
//! Monte Carlo campaigns, power-law fits, and overhead tables.
//!
//! Exit codes: 0 success, 1 domain error (including a Violated verdict from
//! `verify`), 2 usage/config error.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use magicprep::catalog::ec::build_ec_circuit;
use magicprep::catalog::grow::build_grow_circuit;
use magicprep::catalog::hm::build_hm_circuit;
use magicprep::catalog::CatalogEntry;
use magicprep::lattice::build_lattice;
use magicprep::montecarlo::{
    assemble_stats, build_decoder, decoder_id, fit_alpha, run_trial_range, Counters, FitPoint,
    MCStats,
};
use magicprep::overhead::{
    encoded_min_qubits, encoded_report, optimize_batch, physical_overhead, Depths, EncodedConfig,
};
use magicprep::protocol::{Protocol, ProtocolMode, ProtocolSpec, Segment};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Trial count above which a campaign needs an explicit acknowledgment.
const LONG_RUN_TRIALS: u64 = 100_000_000;

#[derive(Parser)]
#[command(name = "magicprep", version, about = "Magic-state preparation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the measurement/growing circuits and lattice data for one
    /// distance.
    Catalog {
        #[arg(long)]
        d: usize,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustively verify the flag property of a catalog circuit up to
    /// fault order t.
    Verify {
        /// Catalog id (e.g. "ec-d3", "hm-d5", "grow-1-5") or a path to a
        /// circuit-entry JSON file.
        #[arg(long)]
        circuit: String,
        /// Fault-set order to check; defaults to the circuit's claimed
        /// order.
        #[arg(long)]
        t: Option<usize>,
        /// Work-unit budget for the enumeration.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "i-know-this-is-long")]
        acknowledge_long: bool,
    },
    /// Run Monte Carlo campaigns described by a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Checkpoint file for resumable campaigns; defaults to
        /// `<scratch>/simulate-<confighash>.ckpt.json` when the scratch
        /// directory env var is set.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long = "i-know-this-is-long")]
        acknowledge_long: bool,
    },
    /// Fit the leading power law to measured (p, p_L) points.
    Fit {
        #[arg(long)]
        d: usize,
        /// JSON file holding an array of {p, p_l, ci} points (campaign
        /// stats files also work).
        #[arg(long)]
        points: PathBuf,
        /// Extrapolate the fit at these p values.
        #[arg(long, value_delimiter = ',')]
        at: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form qubit/space-time overhead tables.
    Overhead {
        #[command(subcommand)]
        which: OverheadCmd,
    },
    /// Re-run one logical-error-rate table row and write a stats file.
    ReproduceTable1 {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',')]
        p: Vec<String>,
        /// Trial count; scientific notation accepted (e.g. 1e7).
        #[arg(long)]
        trials: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "i-know-this-is-long")]
        acknowledge_long: bool,
    },
    /// The three exact minimum qubit counts of the two-level scheme.
    ReproduceTable2Min {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OverheadCmd {
    Physical(OverheadArgs),
    Encoded(OverheadArgs),
}

#[derive(Args)]
struct OverheadArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse(); // usage errors exit 2 via clap
    std::process::exit(match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    });
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Catalog { d, out } => cmd_catalog(d, &out),
        Command::Verify {
            circuit,
            t,
            budget,
            jobs,
            out,
            acknowledge_long,
        } => cmd_verify(&circuit, t, budget, jobs, out.as_deref(), acknowledge_long),
        Command::Simulate {
            config,
            out,
            jobs,
            checkpoint,
            acknowledge_long,
        } => cmd_simulate(&config, out.as_deref(), jobs, checkpoint, acknowledge_long),
        Command::Fit { d, points, at, out } => cmd_fit(d, &points, &at, out.as_deref()),
        Command::Overhead { which } => match which {
            OverheadCmd::Physical(a) => cmd_overhead_physical(&a.config, a.out.as_deref()),
            OverheadCmd::Encoded(a) => cmd_overhead_encoded(&a.config, a.out.as_deref()),
        },
        Command::ReproduceTable1 {
            d,
            p,
            trials,
            seed,
            jobs,
            out,
            acknowledge_long,
        } => cmd_table1(d, &p, &trials, seed, jobs, out.as_deref(), acknowledge_long),
        Command::ReproduceTable2Min { out } => cmd_table2_min(out.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// Provenance
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit hash of the canonical (serde_json) config encoding.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn config_hash<T: Serialize>(cfg: &T) -> String {
    format!("fnv1a:{:016x}", fnv1a(serde_json::to_string(cfg).unwrap().as_bytes()))
}

#[derive(Serialize)]
struct Provenance<T: Serialize> {
    version: String,
    seed: Option<u64>,
    decoder: Option<String>,
    config_hash: String,
    config: T,
}

impl<T: Serialize> Provenance<T> {
    fn new(config: T, seed: Option<u64>, decoder: Option<String>) -> Self {
        let config_hash = config_hash(&config);
        Provenance {
            version: VERSION.to_string(),
            seed,
            decoder,
            config_hash,
            config,
        }
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(p, contents).with_context(|| format!("writing {}", p.display()))?;
        }
        None => println!("{contents}"),
    }
    Ok(())
}

fn scratch_dir() -> Option<PathBuf> {
    std::env::var_os("MAGICPREP_SCRATCH").map(PathBuf::from)
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if jobs > 0 {
        b = b.num_threads(jobs);
    }
    Ok(b.build()?)
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

fn cmd_catalog(d: usize, out: &Path) -> Result<i32> {
    if !matches!(d, 3 | 5 | 7) {
        eprintln!("config error: d must be one of 3, 5, 7 (got {d})");
        return Ok(2);
    }
    std::fs::create_dir_all(out)?;
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let (ec, _) = build_ec_circuit(d)?;
    entries.push(ec);
    entries.push(build_hm_circuit(d)?);
    for d_from in [1usize, 3, 5] {
        if d_from < d {
            entries.push(build_grow_circuit(d_from, d)?.entry);
        }
    }
    for e in &entries {
        std::fs::write(out.join(format!("{}.txt", e.id)), e.circuit.to_text())?;
        std::fs::write(
            out.join(format!("{}.json", e.id)),
            serde_json::to_string_pretty(e)?,
        )?;
    }
    let lat = build_lattice(d)?;
    std::fs::write(
        out.join("lattice.json"),
        serde_json::to_string_pretty(&lat)?,
    )?;
    println!(
        "wrote {} circuits + lattice.json to {}",
        entries.len(),
        out.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn resolve_entry(spec: &str) -> Result<CatalogEntry> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return serde_json::from_str(&text)
            .with_context(|| format!("parsing circuit entry {}", path.display()));
    }
    let parts: Vec<&str> = spec.split('-').collect();
    match parts.as_slice() {
        ["ec", dd] => Ok(build_ec_circuit(parse_d(dd)?)?.0),
        ["hm", dd] => Ok(build_hm_circuit(parse_d(dd)?)?),
        ["grow", a, b] => Ok(build_grow_circuit(a.parse()?, b.parse()?)?.entry),
        _ => bail!("unknown circuit id or missing file: {spec}"),
    }
}

fn parse_d(s: &str) -> Result<usize> {
    s.strip_prefix('d')
        .ok_or_else(|| anyhow!("expected d<n>, got {s}"))?
        .parse()
        .map_err(Into::into)
}

fn cmd_verify(
    circuit: &str,
    t: Option<usize>,
    budget: Option<u64>,
    jobs: usize,
    out: Option<&Path>,
    acknowledge_long: bool,
) -> Result<i32> {
    let entry = resolve_entry(circuit)?;
    let t = t.unwrap_or(entry.claimed_t);
    if t >= 3 && !acknowledge_long {
        eprintln!(
            "order-{t} verification enumerates an enormous fault set and can \
             run for hours; pass --i-know-this-is-long to proceed"
        );
        return Ok(2);
    }
    let pool = thread_pool(jobs)?;
    let report = pool.install(|| match budget {
        Some(b) => magicprep::verifier::verify_t_flag_with_budget(&entry, t, b),
        None => magicprep::verifier::verify_t_flag(&entry, t),
    })?;
    #[derive(Serialize)]
    struct VerifyConfig<'a> {
        circuit: &'a str,
        t: usize,
        budget: Option<u64>,
    }
    let wrapped = Provenance::new(VerifyConfig { circuit, t, budget }, None, None);
    #[derive(Serialize)]
    struct Out<T: Serialize, R: Serialize> {
        #[serde(flatten)]
        provenance: T,
        report: R,
    }
    let ok = report.verdict == magicprep::verifier::Verdict::TFlag;
    write_output(
        out,
        &serde_json::to_string_pretty(&Out {
            provenance: wrapped,
            report,
        })?,
    )?;
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Schema for `simulate --config`; unknown keys are rejected.
#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    d: usize,
    p: Vec<f64>,
    trials: u64,
    seed: u64,
    #[serde(default)]
    mode: ModeConfig,
}

#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum ModeConfig {
    #[default]
    Physical,
    Encoded {
        p_lc_coeffs: Vec<f64>,
        p_inject: f64,
    },
}

impl SimulateConfig {
    fn validate(&self) -> std::result::Result<(), String> {
        if !matches!(self.d, 3 | 5 | 7) {
            return Err(format!("d must be one of 3, 5, 7 (got {})", self.d));
        }
        if self.p.is_empty() {
            return Err("p must be a non-empty list".into());
        }
        if self.p.iter().any(|&p| !(0.0..=0.1).contains(&p)) {
            return Err("each p must lie in [0, 0.1]".into());
        }
        if self.trials == 0 {
            return Err("trials must be positive".into());
        }
        Ok(())
    }

    fn protocol_spec(&self) -> ProtocolSpec {
        ProtocolSpec {
            d: self.d,
            mode: match &self.mode {
                ModeConfig::Physical => ProtocolMode::Physical,
                ModeConfig::Encoded {
                    p_lc_coeffs,
                    p_inject,
                } => ProtocolMode::Encoded(magicprep::noise::LogicalNoiseModel {
                    p_lc_coeffs: p_lc_coeffs.clone(),
                    p_inject: *p_inject,
                }),
            },
        }
    }
}

/// Resumable campaign progress, keyed by the config hash so a checkpoint
/// can never silently continue a different campaign.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config_hash: String,
    /// Completed trials and counters per p index.
    progress: Vec<(u64, Counters)>,
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> std::result::Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("reading {}: {e}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_simulate(
    config_path: &Path,
    out: Option<&Path>,
    jobs: usize,
    checkpoint: Option<PathBuf>,
    acknowledge_long: bool,
) -> Result<i32> {
    let cfg: SimulateConfig = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(2);
        }
    };
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e}");
        return Ok(2);
    }
    let total = cfg.trials.saturating_mul(cfg.p.len() as u64);
    if total > LONG_RUN_TRIALS && !acknowledge_long {
        eprintln!(
            "{total} total trials requested; pass --i-know-this-is-long (and \
             consider --checkpoint) to proceed"
        );
        return Ok(2);
    }
    let hash = config_hash(&cfg);
    let ckpt_path = checkpoint.or_else(|| {
        scratch_dir().map(|d| d.join(format!("simulate-{}.ckpt.json", &hash[6..])))
    });

    let mut progress: Vec<(u64, Counters)> = vec![(0, Counters::default()); cfg.p.len()];
    if let Some(cp) = ckpt_path.as_deref() {
        if cp.exists() {
            let saved: Checkpoint = serde_json::from_str(&std::fs::read_to_string(cp)?)
                .with_context(|| format!("parsing checkpoint {}", cp.display()))?;
            if saved.config_hash == hash && saved.progress.len() == progress.len() {
                progress = saved.progress;
                let done: u64 = progress.iter().map(|&(n, _)| n).sum();
                eprintln!("resuming from checkpoint ({done} trials already done)");
            } else {
                eprintln!(
                    "checkpoint {} belongs to a different config; ignoring",
                    cp.display()
                );
            }
        }
    }

    let proto = Protocol::new(cfg.d)?;
    let spec = cfg.protocol_spec();
    let table = build_decoder(&proto);
    let pool = thread_pool(jobs)?;
    const SLICE: u64 = 1 << 20;
    let mut stats: Vec<MCStats> = Vec::new();
    for (pi, &p) in cfg.p.iter().enumerate() {
        let start = std::time::Instant::now();
        while progress[pi].0 < cfg.trials {
            let lo = progress[pi].0;
            let hi = (lo + SLICE).min(cfg.trials);
            let c = pool.install(|| run_trial_range(&proto, &spec, &table, p, cfg.seed, lo..hi));
            progress[pi].0 = hi;
            progress[pi].1 = progress[pi].1.merge(c);
            if let Some(cp) = ckpt_path.as_deref() {
                if let Some(dir) = cp.parent() {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(
                    cp,
                    serde_json::to_string(&Checkpoint {
                        config_hash: hash.clone(),
                        progress: progress.clone(),
                    })?,
                )?;
            }
        }
        stats.push(assemble_stats(
            &proto,
            &table,
            p,
            cfg.seed,
            progress[pi].1,
            start.elapsed().as_secs_f64(),
        ));
    }

    #[derive(Serialize)]
    struct Out<T: Serialize> {
        #[serde(flatten)]
        provenance: T,
        stats: Vec<MCStats>,
    }
    let provenance = Provenance::new(cfg.clone(), Some(cfg.seed), Some(decoder_id(&table)));
    write_output(
        out,
        &serde_json::to_string_pretty(&Out { provenance, stats })?,
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

fn cmd_fit(d: usize, points_path: &Path, at: &[f64], out: Option<&Path>) -> Result<i32> {
    // Accept either a bare array of points or a campaign stats file.
    let text = std::fs::read_to_string(points_path)?;
    let points: Vec<FitPoint> = if let Ok(pts) = serde_json::from_str::<Vec<FitPoint>>(&text) {
        pts
    } else {
        #[derive(Deserialize)]
        struct StatsLike {
            p: f64,
            p_l: f64,
            p_l_ci: (f64, f64),
        }
        #[derive(Deserialize)]
        struct CampaignLike {
            stats: Vec<StatsLike>,
        }
        let c: CampaignLike = serde_json::from_str(&text).map_err(|e| {
            anyhow!(
                "{} is neither a point array nor a campaign stats file: {e}",
                points_path.display()
            )
        })?;
        c.stats
            .into_iter()
            .map(|s| FitPoint {
                p: s.p,
                p_l: s.p_l,
                ci: s.p_l_ci,
            })
            .collect()
    };
    if points.len() < 2 {
        eprintln!("config error: need at least 2 points to fit (got {})", points.len());
        return Ok(2);
    }
    let fit = fit_alpha(&points, d);
    #[derive(Serialize)]
    struct Out<T: Serialize, F: Serialize> {
        #[serde(flatten)]
        provenance: T,
        fit: F,
        extrapolations: Vec<(f64, f64)>,
    }
    #[derive(Serialize)]
    struct FitConfig<'a> {
        d: usize,
        points: &'a [FitPoint],
    }
    let extrapolations = at
        .iter()
        .map(|&p| (p, magicprep::montecarlo::extrapolate(&fit, p)))
        .collect();
    let provenance = Provenance::new(FitConfig { d, points: &points }, None, None);
    write_output(
        out,
        &serde_json::to_string_pretty(&Out {
            provenance,
            fit,
            extrapolations,
        })?,
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// overhead
// ---------------------------------------------------------------------------

/// Depths measured from the constructed circuits for one distance.
fn measured_depths(d: usize) -> Result<Depths> {
    let proto = Protocol::new(d)?;
    Ok(Depths {
        t_hm: proto.segment_entry(Segment::Hm(0)).circuit.depth() as u64,
        t_ec: proto.segment_entry(Segment::Ec(0)).circuit.depth() as u64,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicalOverheadConfig {
    rows: Vec<PhysicalRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicalRow {
    d: usize,
    p_acc: f64,
}

fn cmd_overhead_physical(config: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg: PhysicalOverheadConfig = match load_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(2);
        }
    };
    let mut csv = String::from("d,p_acc,min_qubits,avg_qubits,spacetime\n");
    for row in &cfg.rows {
        let depths = measured_depths(row.d)?;
        let r = physical_overhead(row.d, row.p_acc, depths.t_hm, depths.t_ec)?;
        csv.push_str(&format!(
            "{},{},{},{:.2},{:.4e}\n",
            r.d, row.p_acc, r.min_qubits, r.avg_qubits, r.spacetime
        ));
    }
    csv.push_str(&format!("# version={VERSION} config_hash={}\n", config_hash(&cfg)));
    write_output(out, csv.trim_end())?;
    Ok(0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodedOverheadConfig {
    rows: Vec<EncodedRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodedRow {
    d1: usize,
    d2: usize,
    d_f: usize,
    p_acc_d1: f64,
    #[serde(default = "one")]
    p_acc_outer: f64,
    /// Batch size; omitted = optimize for minimum average qubits.
    m: Option<u64>,
}

fn one() -> f64 {
    1.0
}

fn cmd_overhead_encoded(config: &Path, out: Option<&Path>) -> Result<i32> {
    let cfg: EncodedOverheadConfig = match load_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return Ok(2);
        }
    };
    let mut csv = String::from("d1,d2,d_f,m,min_qubits,avg_qubits,s_tot\n");
    for row in &cfg.rows {
        let m = match row.m {
            Some(m) => m,
            None => optimize_batch(row.d1, row.d2, row.d_f, row.p_acc_d1, row.p_acc_outer)?,
        };
        let ec = EncodedConfig {
            d1: row.d1,
            d2: row.d2,
            d_f: row.d_f,
            p_acc_d1: row.p_acc_d1,
            p_acc_outer: row.p_acc_outer,
            m,
        };
        let r = encoded_report(&ec, measured_depths(row.d1)?, measured_depths(row.d_f)?)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{:.0},{:.4e}\n",
            row.d1, row.d2, row.d_f, m, r.min_qubits, r.avg_qubits, r.spacetime.s_tot
        ));
    }
    csv.push_str(&format!("# version={VERSION} config_hash={}\n", config_hash(&cfg)));
    write_output(out, csv.trim_end())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// reproduce-table1 / reproduce-table2-min
// ---------------------------------------------------------------------------

fn parse_count(s: &str) -> Result<u64> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let f: f64 = s.parse().context("trial count")?;
    if f.fract() != 0.0 || f < 0.0 || f > 1e15 {
        bail!("trial count must be a non-negative integer (got {s})");
    }
    Ok(f as u64)
}

fn cmd_table1(
    d: usize,
    p: &[String],
    trials: &str,
    seed: u64,
    jobs: usize,
    out: Option<&Path>,
    acknowledge_long: bool,
) -> Result<i32> {
    let p: Vec<f64> = p
        .iter()
        .map(|s| s.parse::<f64>().context("p value"))
        .collect::<Result<_>>()?;
    let cfg = SimulateConfig {
        d,
        p,
        trials: parse_count(trials)?,
        seed,
        mode: ModeConfig::Physical,
    };
    if let Err(e) = cfg.validate() {
        eprintln!("config error: {e}");
        return Ok(2);
    }
    let total = cfg.trials.saturating_mul(cfg.p.len() as u64);
    if total > LONG_RUN_TRIALS && !acknowledge_long {
        eprintln!("{total} total trials requested; pass --i-know-this-is-long to proceed");
        return Ok(2);
    }
    let proto = Protocol::new(cfg.d)?;
    let spec = cfg.protocol_spec();
    let table = build_decoder(&proto);
    let pool = thread_pool(jobs)?;
    let mut stats = Vec::new();
    for &pp in &cfg.p {
        let start = std::time::Instant::now();
        let c = pool.install(|| run_trial_range(&proto, &spec, &table, pp, cfg.seed, 0..cfg.trials));
        stats.push(assemble_stats(
            &proto,
            &table,
            pp,
            cfg.seed,
            c,
            start.elapsed().as_secs_f64(),
        ));
    }
    #[derive(Serialize)]
    struct Out<T: Serialize> {
        #[serde(flatten)]
        provenance: T,
        stats: Vec<MCStats>,
    }
    let provenance = Provenance::new(cfg.clone(), Some(cfg.seed), Some(decoder_id(&table)));
    write_output(
        out,
        &serde_json::to_string_pretty(&Out { provenance, stats })?,
    )?;
    Ok(0)
}

fn cmd_table2_min(out: Option<&Path>) -> Result<i32> {
    let rows = [(7usize, 11usize, 3usize), (5, 9, 5), (3, 7, 7)];
    let mut csv = String::from("d1,d2,d_f,min_qubits\n");
    for (d1, d2, d_f) in rows {
        csv.push_str(&format!(
            "{d1},{d2},{d_f},{}\n",
            encoded_min_qubits(d1, d2, d_f)
        ));
    }
    csv.push_str(&format!("# version={VERSION}\n"));
    write_output(out, csv.trim_end())?;
    Ok(0)
}
