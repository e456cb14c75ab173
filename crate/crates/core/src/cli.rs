//! Command-line front end. The binary in `src/bin` only calls [`main`].
//!
//! Every run resolves a [`RunConfig`] from an optional JSON file (`--config`)
//! overridden by flags, then writes either CSV with `#`-prefixed JSON metadata
//! lines or a single JSON document.
//!
//! Exit codes: 0 success, 1 a checked bound failed (suppressed by
//! `--no-assert`), 2 usage error, 3 computation error.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{
    power_law_fit, scan_connectivity, single_power_fit, ScanConfig, ScanResult, BOUND_TOLERANCE, FORMAT_VERSION,
};
use crate::channel::{attractor_projection, superoperator_beta_star, trajectory_with, DensityMatrix};
use crate::groupwalk::{
    bipartiteness_check, build_walk_matrix, generate_group, graph_generators, trace_phi_power, trace_phi_power_direct,
    walk_spectrum, DEFAULT_GROUP_CAP,
};
use crate::induced::BasisState;
use crate::network::{InteractionGraph, Link, Topology};
use crate::rng::GENERATOR;
use crate::spectral::{lanczos_extreme, subleading_of, LanczosConfig, Which};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Inclusive qubit-count range, written `6` or `3..13`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid qubit count '{t}'"));
        let r = match s.split_once("..") {
            Some((a, b)) => Self { lo: parse(a)?, hi: parse(b.trim_start_matches('='))? },
            None => {
                let n = parse(s)?;
                Self { lo: n, hi: n }
            }
        };
        if r.lo > r.hi {
            return Err(format!("empty range {s}"));
        }
        Ok(r)
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

impl Serialize for NRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        match v {
            Value::Number(n) => {
                let n = n.as_u64().ok_or_else(|| serde::de::Error::custom("qubit count must be a positive integer"))?;
                Ok(Self { lo: n as usize, hi: n as usize })
            }
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("expected a number or a range string")),
        }
    }
}

/// Exponent pair written `e1,e2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents(pub f64, pub f64);

impl FromStr for Exponents {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected e1,e2, got '{s}'"))?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("invalid exponent '{t}'"));
        Ok(Self(p(a)?, p(b)?))
    }
}

impl Serialize for Exponents {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.0, self.1).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exponents {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        match v {
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            other => {
                let (a, b): (f64, f64) = serde_json::from_value(other).map_err(serde::de::Error::custom)?;
                Ok(Self(a, b))
            }
        }
    }
}

/// Everything a run depends on. Fields left `None` take command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub topology: Option<Topology>,
    pub n: Option<NRange>,
    pub epsilon: Option<f64>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub fit: Option<Exponents>,
    pub fit_min: Option<usize>,
    pub init: Option<Vec<String>>,
    pub steps: Option<usize>,
    pub p: Option<f64>,
    pub cap: Option<usize>,
    pub max_power: Option<usize>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub no_assert: Option<bool>,
    pub lanczos: Option<LanczosConfig>,
}

impl RunConfig {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            command: self.command.or(base.command),
            topology: self.topology.or(base.topology),
            n: self.n.or(base.n),
            epsilon: self.epsilon.or(base.epsilon),
            replicas: self.replicas.or(base.replicas),
            seed: self.seed.or(base.seed),
            threads: self.threads.or(base.threads),
            format: self.format.or(base.format),
            fit: self.fit.or(base.fit),
            fit_min: self.fit_min.or(base.fit_min),
            init: self.init.or(base.init),
            steps: self.steps.or(base.steps),
            p: self.p.or(base.p),
            cap: self.cap.or(base.cap),
            max_power: self.max_power.or(base.max_power),
            input: self.input.or(base.input),
            output: self.output.or(base.output),
            no_assert: self.no_assert.or(base.no_assert),
            lanczos: self.lanczos.or(base.lanczos),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Parser, Debug)]
#[command(name = "cnotnet", version, about = "Relaxation rates of random CNOT networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Master seed for noise replicas.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report bound violations without failing.
    #[arg(long, global = true)]
    pub no_assert: bool,
    /// Write to a file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scan γ over a range of N, optionally with weight noise and a fit.
    Connectivity(ScanArgs),
    /// Distance to the attractor manifold along channel iterations.
    Trajectory(TrajectoryArgs),
    /// Group order, walk matrix, spectrum and trace identity.
    Group(GroupArgs),
    /// Per-instance bound report.
    Bounds(ScanArgs),
    /// Two-term power-law fit of a scan.
    Fit(FitArgs),
}

#[derive(Args, Debug, Default)]
pub struct ScanArgs {
    /// complete, circle, circle-bidirectional, star or unbalanced.
    #[arg(long)]
    pub topology: Option<Topology>,
    /// Qubit count or inclusive range such as 3..13.
    #[arg(long)]
    pub n: Option<NRange>,
    /// Weight-noise amplitude in [0, 1].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Noise replicas per N (default 20).
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Fit exponents e1,e2.
    #[arg(long)]
    pub fit: Option<Exponents>,
    /// Smallest N used by the fit (default 8).
    #[arg(long)]
    pub fit_min: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct TrajectoryArgs {
    /// Network topology (default complete).
    #[arg(long)]
    pub topology: Option<Topology>,
    /// Qubit count, at most 6 (default 6).
    #[arg(long)]
    pub n: Option<NRange>,
    /// Comma-separated basis labels, qubit 0 first.
    #[arg(long, value_delimiter = ',')]
    pub init: Option<Vec<String>>,
    /// Channel applications (default 50).
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct GroupArgs {
    /// Qubit count (default 2).
    #[arg(long)]
    pub n: Option<NRange>,
    /// Probability of CNOT 0→1 for N = 2 (1→0 gets 1 − p).
    #[arg(long)]
    pub p: Option<f64>,
    /// Largest group order explored.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Highest power in the trace table.
    #[arg(long)]
    pub max_power: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct FitArgs {
    /// Scan CSV to fit; without it a fresh scan is run.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub scan: ScanArgs,
}

impl Cli {
    fn to_config(&self) -> RunConfig {
        let mut c = RunConfig {
            format: self.format,
            seed: self.seed,
            threads: self.threads,
            output: self.output.clone(),
            no_assert: self.no_assert.then_some(true),
            ..Default::default()
        };
        let scan = |c: &mut RunConfig, a: &ScanArgs| {
            c.topology = a.topology;
            c.n = a.n;
            c.epsilon = a.epsilon;
            c.replicas = a.replicas;
            c.fit = a.fit;
            c.fit_min = a.fit_min;
        };
        match &self.command {
            Command::Connectivity(a) => {
                c.command = Some("connectivity".into());
                scan(&mut c, a);
            }
            Command::Bounds(a) => {
                c.command = Some("bounds".into());
                scan(&mut c, a);
            }
            Command::Fit(a) => {
                c.command = Some("fit".into());
                scan(&mut c, &a.scan);
                c.input = a.input.clone();
            }
            Command::Trajectory(a) => {
                c.command = Some("trajectory".into());
                c.topology = a.topology;
                c.n = a.n;
                c.init = a.init.clone();
                c.steps = a.steps;
            }
            Command::Group(a) => {
                c.command = Some("group".into());
                c.n = a.n;
                c.p = a.p;
                c.cap = a.cap;
                c.max_power = a.max_power;
            }
        }
        c
    }
}

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// What a command produced.
pub struct Report {
    /// CSV body (header row included).
    pub csv: String,
    /// Command-specific JSON result.
    pub json: Value,
    /// Extra metadata entries (seeds, fit, notes).
    pub meta: Value,
    /// Checked bounds that failed.
    pub violations: Vec<String>,
}

/// Parses `args`, runs the command and writes the output. Returns the exit code.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let kind = if e.downcast_ref::<UsageError>().is_some() { "usage" } else { "computation" };
            let msg = json!({ "error": kind, "message": format!("{e:#}") });
            let _ = writeln!(stderr, "{msg}");
            if kind == "usage" {
                2
            } else {
                3
            }
        }
    }
}

pub fn main() -> i32 {
    let out = std::io::stdout();
    let err = std::io::stderr();
    run_from(std::env::args_os(), &mut out.lock(), &mut err.lock())
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<i32> {
    let flags = cli.to_config();
    let cfg = match &cli.config {
        Some(path) => flags.over(RunConfig::load(path)?),
        None => flags,
    };
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        // Fails harmlessly if a pool already exists (repeated in-process runs).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let (resolved, report) = match cfg.command.as_deref() {
        Some("connectivity") => cmd_connectivity(cfg)?,
        Some("bounds") => cmd_bounds(cfg)?,
        Some("fit") => cmd_fit(cfg)?,
        Some("trajectory") => cmd_trajectory(cfg)?,
        Some("group") => cmd_group(cfg)?,
        other => return Err(usage(format!("unknown command {other:?}"))),
    };
    let runtime = start.elapsed().as_secs_f64();
    let metadata = json!({
        "tool": "cnotnet",
        "version": env!("CARGO_PKG_VERSION"),
        "format_version": FORMAT_VERSION,
        "generator": GENERATOR,
        "config": resolved,
        "runtime_seconds": runtime,
        "extra": report.meta,
    });
    let format = resolved.format.unwrap_or(Format::Csv);
    let text = match format {
        Format::Csv => {
            let mut s = String::new();
            for line in serde_json::to_string(&metadata)?.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
            s.push_str(&report.csv);
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "metadata": metadata, "result": report.json }))?;
            s.push('\n');
            s
        }
    };
    match &resolved.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    if report.violations.is_empty() {
        return Ok(0);
    }
    for v in &report.violations {
        writeln!(stderr, "{}", json!({ "warning": "bound violated", "detail": v }))?;
    }
    Ok(if resolved.no_assert.unwrap_or(false) { 0 } else { 1 })
}

fn lanczos_of(cfg: &RunConfig) -> LanczosConfig {
    cfg.lanczos.clone().unwrap_or_default()
}

fn scan_config(cfg: &mut RunConfig) -> anyhow::Result<ScanConfig> {
    let topology = *cfg.topology.get_or_insert(Topology::Complete);
    let n = *cfg.n.get_or_insert(NRange { lo: 3, hi: 13 });
    let seed = *cfg.seed.get_or_insert(0);
    let mut sc = ScanConfig::new(topology, n.lo, n.hi);
    sc.lanczos = lanczos_of(cfg);
    if let Some(eps) = cfg.epsilon {
        let replicas = *cfg.replicas.get_or_insert(20);
        sc = sc.with_noise(eps, replicas, seed);
    }
    sc.validate().map_err(|e| usage(e.to_string()))?;
    Ok(sc)
}

fn run_scan(cfg: &mut RunConfig) -> anyhow::Result<ScanResult> {
    let sc = scan_config(cfg)?;
    Ok(scan_connectivity(&sc)?)
}

fn scan_violations(scan: &ScanResult) -> Vec<String> {
    scan.violations()
        .iter()
        .map(|i| {
            format!(
                "N={} replica={} gamma={:.6e} bound_diameter={:.6e} bound_min_p={:?}",
                i.n_qubits, i.replica, i.gamma, i.bounds.diameter_bound, i.bounds.min_weight_bound
            )
        })
        .collect()
}

fn fit_json(points: &[(usize, f64)], cfg: &mut RunConfig) -> anyhow::Result<Option<Value>> {
    let Some(Exponents(e1, e2)) = cfg.fit else {
        return Ok(None);
    };
    let n_min = *cfg.fit_min.get_or_insert(8);
    let fit = power_law_fit(points, (e1, e2), n_min).map_err(|e| usage(e.to_string()))?;
    let single = single_power_fit(points, e1, n_min)?;
    Ok(Some(json!({
        "fit": fit,
        "single_power": { "exponent": e1, "a": single.0, "rss": single.1 },
    })))
}

fn cmd_connectivity(mut cfg: RunConfig) -> anyhow::Result<(RunConfig, Report)> {
    let scan = run_scan(&mut cfg)?;
    let fit = fit_json(&scan.points(), &mut cfg)?;
    let seeds: Vec<Value> = scan
        .instances
        .iter()
        .filter_map(|i| i.seed.map(|s| json!({ "n": i.n_qubits, "replica": i.replica, "seed": s })))
        .collect();
    let report = Report {
        csv: scan.to_csv(),
        json: json!({ "scan": &scan, "fit": fit }),
        meta: json!({ "seeds": seeds, "fit": fit }),
        violations: scan_violations(&scan),
    };
    Ok((cfg, report))
}

fn cmd_bounds(mut cfg: RunConfig) -> anyhow::Result<(RunConfig, Report)> {
    let scan = run_scan(&mut cfg)?;
    let mut csv = String::from(
        "N,replica,gamma,diameter,bound_diameter,holds_diameter,slack_diameter,bound_min_p,holds_min_p,slack_min_p\n",
    );
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
    for i in &scan.instances {
        let b = &i.bounds;
        csv.push_str(&format!(
            "{},{},{:.12e},{},{:.12e},{},{:.6},{},{},{}\n",
            i.n_qubits,
            i.replica,
            i.gamma,
            b.diameter,
            b.diameter_bound,
            b.diameter_bound_holds,
            b.diameter_slack,
            opt(b.min_weight_bound),
            b.min_weight_bound_holds.map(|h| h.to_string()).unwrap_or_default(),
            b.min_weight_slack.map(|x| format!("{x:.6}")).unwrap_or_default(),
        ));
    }
    let reports: Vec<_> = scan.instances.iter().map(|i| &i.bounds).collect();
    let report = Report {
        csv,
        json: json!({ "tolerance": BOUND_TOLERANCE, "instances": reports }),
        meta: json!({ "tolerance": BOUND_TOLERANCE }),
        violations: scan_violations(&scan),
    };
    Ok((cfg, report))
}

/// Reads `(N, gamma_mean)` from a scan CSV, skipping `#` lines.
pub fn read_scan_csv(text: &str) -> anyhow::Result<Vec<(usize, f64)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| anyhow!("empty scan file"))?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let n_col = col("N").ok_or_else(|| anyhow!("scan file lacks an N column"))?;
    let g_col = col("gamma_mean").or_else(|| col("gamma")).ok_or_else(|| anyhow!("scan file lacks gamma_mean"))?;
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let n = f.get(n_col).ok_or_else(|| anyhow!("short row '{l}'"))?.trim().parse()?;
            let g = f.get(g_col).ok_or_else(|| anyhow!("short row '{l}'"))?.trim().parse()?;
            Ok((n, g))
        })
        .collect()
}

fn cmd_fit(mut cfg: RunConfig) -> anyhow::Result<(RunConfig, Report)> {
    if cfg.fit.is_none() {
        cfg.fit = Some(match cfg.topology.unwrap_or(Topology::Complete) {
            Topology::Circle | Topology::CircleBidirectional => Exponents(1.5, 2.5),
            Topology::Unbalanced => Exponents(2.0, 4.0),
            _ => Exponents(1.0, 2.0),
        });
    }
    let points = match &cfg.input {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            read_scan_csv(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => run_scan(&mut cfg)?.points(),
    };
    let fit = fit_json(&points, &mut cfg)?.expect("exponents set above");
    let f = &fit["fit"];
    let mut csv = format!(
        "e1,e2,a,b,rss,n_min,n_max\n{},{},{:.12e},{:.12e},{:.6e},{},{}\n",
        f["exponents"][0],
        f["exponents"][1],
        f["a"].as_f64().unwrap_or(f64::NAN),
        f["b"].as_f64().unwrap_or(f64::NAN),
        f["rss"].as_f64().unwrap_or(f64::NAN),
        f["n_min"],
        f["n_max"]
    );
    csv.push_str("\nN,residual\n");
    if let Some(res) = f["residuals"].as_array() {
        for r in res {
            csv.push_str(&format!("{},{:.6e}\n", r[0], r[1].as_f64().unwrap_or(f64::NAN)));
        }
    }
    let report = Report { csv, json: fit.clone(), meta: json!({ "points": points.len() }), violations: vec![] };
    Ok((cfg, report))
}

fn cmd_trajectory(mut cfg: RunConfig) -> anyhow::Result<(RunConfig, Report)> {
    let topology = *cfg.topology.get_or_insert(Topology::Complete);
    let n = *cfg.n.get_or_insert(NRange { lo: 6, hi: 6 });
    if n.lo != n.hi {
        return Err(usage("trajectory takes a single N"));
    }
    let n = n.lo;
    let steps = *cfg.steps.get_or_insert(50);
    let inits = cfg.init.get_or_insert_with(|| vec!["000001".into(), "101010".into(), "111111".into()]).clone();
    let mut states = Vec::new();
    for label in &inits {
        if label.len() != n {
            return Err(usage(format!("initial state '{label}' has {} qubits, expected {n}", label.len())));
        }
        states.push(BasisState::from_label(label).map_err(|e| usage(e.to_string()))?);
    }
    let g = topology.build(n).map_err(|e| usage(e.to_string()))?;
    let proj = attractor_projection(&g)?;
    let beta = superoperator_beta_star(&g, &proj, &lanczos_of(&cfg))?;
    let mut csv = String::from("init,step,distance,bound\n");
    let mut curves = Vec::new();
    let mut violations = Vec::new();
    for (label, state) in inits.iter().zip(states) {
        let rho = DensityMatrix::basis_projector(n, state)?;
        let t = trajectory_with(&g, &proj, beta, &rho, steps, label)?;
        for p in &t.points {
            csv.push_str(&format!("{label},{},{:.12e},{:.12e}\n", p.step, p.distance, p.bound));
            if p.distance > p.bound + 1e-9 {
                violations
                    .push(format!("{label} step {}: distance {:.6e} > bound {:.6e}", p.step, p.distance, p.bound));
            }
        }
        curves.push(t);
    }
    let report = Report {
        csv,
        json: json!({ "beta_star": beta, "attractor_dimension": proj.dimension(), "curves": curves }),
        meta: json!({ "beta_star": beta, "attractor_dimension": proj.dimension() }),
        violations,
    };
    Ok((cfg, report))
}

fn cmd_group(mut cfg: RunConfig) -> anyhow::Result<(RunConfig, Report)> {
    let n = *cfg.n.get_or_insert(NRange { lo: 2, hi: 2 });
    if n.lo != n.hi {
        return Err(usage("group takes a single N"));
    }
    let n = n.lo;
    let cap = *cfg.cap.get_or_insert(DEFAULT_GROUP_CAP);
    let max_power = *cfg.max_power.get_or_insert(10);
    let g = match cfg.p {
        Some(p) if n == 2 => {
            if !(0.0..=1.0).contains(&p) {
                return Err(usage(format!("--p {p} outside [0, 1]")));
            }
            InteractionGraph::new(2, vec![Link::new(0, 1, p), Link::new(1, 0, 1.0 - p)])?
        }
        Some(_) => return Err(usage("--p applies to N = 2 only")),
        None => Topology::Complete.build(n).map_err(|e| usage(e.to_string()))?,
    };
    let (gens, probs) = graph_generators(&g)?;
    let gt = generate_group(&gens, cap)?;
    let w = build_walk_matrix(&gt, &probs)?;
    let m = gt.order();
    let (spectrum, subleading) = match walk_spectrum(&w) {
        Ok(eig) => {
            let sub = subleading_of(&eig.values);
            (Some(eig.values), sub)
        }
        Err(_) => {
            let u = vec![1.0 / (m as f64).sqrt(); m];
            let lc = lanczos_of(&cfg);
            let hi = lanczos_extreme(&w, Which::Largest, &[u], &lc)?.eigenvalue;
            (None, hi)
        }
    };
    let bip = bipartiteness_check(&gt, &w);
    let mut csv = String::from("n,trace_group,trace_direct,difference\n");
    let mut table = Vec::new();
    for k in 0..=max_power {
        let via = trace_phi_power(&gt, &w, k);
        let direct = trace_phi_power_direct(&g, k)?;
        csv.push_str(&format!("{k},{via:.15e},{direct:.15e},{:.3e}\n", via - direct));
        table.push(json!({ "n": k, "trace_group": via, "trace_direct": direct }));
    }
    let traces = gt.traces();
    let w_dense = (m <= 256).then(|| w.to_dense().to_rows());
    let result = json!({
        "n_qubits": n,
        "order": m,
        "generators": gens.len(),
        "probabilities": probs,
        "w": w_dense,
        "spectrum": spectrum,
        "subleading": subleading,
        "bipartite": bip.bipartite,
        "trace_sum": traces.iter().sum::<u64>(),
        "trace_table": table,
    });
    let meta = json!({ "order": m, "subleading": subleading, "bipartite": bip.bipartite });
    Ok((cfg, Report { csv, json: result, meta, violations: vec![] }))
}
