//! Lower bounds on the algebraic connectivity, connectivity scans over `N`,
//! and two-term power-law fits.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::induced::{build_induced_graph, unweighted_diameter, InducedGraph};
use crate::network::{apply_noise, InteractionGraph, NoiseSpec, Topology};
use crate::rng::derive_seed;
use crate::spectral::{algebraic_connectivity, LanczosConfig};

/// Version tag written into scan and fit outputs.
pub const FORMAT_VERSION: &str = "1";

/// Slack allowed when checking a bound against a computed value.
pub const BOUND_TOLERANCE: f64 = 1e-10;

/// `4 / ((2^N − 1) · diam)` for an induced graph.
pub fn diameter_bound(ig: &InducedGraph) -> Result<f64> {
    let diam = unweighted_diameter(ig)?;
    Ok(diameter_bound_from(ig.n_qubits(), diam))
}

pub fn diameter_bound_from(n_qubits: usize, diameter: usize) -> f64 {
    4.0 / (((1u64 << n_qubits) - 1) as f64 * diameter as f64)
}

/// Smallest link probability; defined for complete topologies only.
pub fn min_weight_bound(g: &InteractionGraph) -> Result<f64> {
    if !g.is_complete_topology() {
        return Err(Error::BoundInapplicable);
    }
    Ok(g.min_probability())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_qubits: usize,
    pub gamma: f64,
    pub diameter: usize,
    pub diameter_bound: f64,
    pub diameter_bound_holds: bool,
    /// `gamma / diameter_bound`.
    pub diameter_slack: f64,
    pub min_weight_bound: Option<f64>,
    pub min_weight_bound_holds: Option<bool>,
    pub min_weight_slack: Option<f64>,
}

impl BoundReport {
    pub fn new(g: &InteractionGraph, gamma: f64, diameter: usize) -> Self {
        let db = diameter_bound_from(g.n_qubits(), diameter);
        let mw = min_weight_bound(g).ok();
        Self {
            n_qubits: g.n_qubits(),
            gamma,
            diameter,
            diameter_bound: db,
            diameter_bound_holds: db <= gamma + BOUND_TOLERANCE,
            diameter_slack: gamma / db,
            min_weight_bound: mw,
            min_weight_bound_holds: mw.map(|b| b <= gamma + BOUND_TOLERANCE),
            min_weight_slack: mw.map(|b| gamma / b),
        }
    }

    /// Every applicable bound holds.
    pub fn all_hold(&self) -> bool {
        self.diameter_bound_holds && self.min_weight_bound_holds.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponents: (f64, f64),
    pub a: f64,
    pub b: f64,
    pub rss: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// `(N, γ − fit)` per point used.
    pub residuals: Vec<(usize, f64)>,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        self.a * n.powf(-self.exponents.0) + self.b * n.powf(-self.exponents.1)
    }
}

/// Least squares for `γ ≈ a·N^−e₁ + b·N^−e₂` over points with `N ≥ n_min`.
pub fn power_law_fit(points: &[(usize, f64)], exponents: (f64, f64), n_min: usize) -> Result<FitResult> {
    let (e1, e2) = exponents;
    if e1.is_nan() || e2.is_nan() || e1 >= e2 {
        return Err(Error::InvalidArgument(format!("exponents must satisfy e1 < e2, got ({e1}, {e2})")));
    }
    let used: Vec<(usize, f64)> = points.iter().copied().filter(|&(n, _)| n >= n_min).collect();
    if used.len() < 3 {
        return Err(Error::InvalidArgument(format!("{} points with N >= {n_min}; need at least 3", used.len())));
    }
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, y) in &used {
        let (x1, x2) = ((n as f64).powf(-e1), (n as f64).powf(-e2));
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1 * y;
        r2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * s11 * s22 {
        return Err(Error::RankDeficient(format!("design matrix determinant {det:e}")));
    }
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    let mut fit = FitResult {
        exponents,
        a,
        b,
        rss: 0.0,
        n_min: used.iter().map(|p| p.0).min().unwrap_or(n_min),
        n_max: used.iter().map(|p| p.0).max().unwrap_or(n_min),
        residuals: Vec::with_capacity(used.len()),
    };
    for &(n, y) in &used {
        let r = y - fit.predict(n as f64);
        fit.rss += r * r;
        fit.residuals.push((n, r));
    }
    Ok(fit)
}

/// One-term fit `γ ≈ a·N^−e`; returns `(a, rss)`.
pub fn single_power_fit(points: &[(usize, f64)], exponent: f64, n_min: usize) -> Result<(f64, f64)> {
    let used: Vec<(f64, f64)> =
        points.iter().filter(|p| p.0 >= n_min).map(|&(n, y)| ((n as f64).powf(-exponent), y)).collect();
    if used.len() < 2 {
        return Err(Error::InvalidArgument(format!("{} points with N >= {n_min}; need at least 2", used.len())));
    }
    let sxx: f64 = used.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = used.iter().map(|(x, y)| x * y).sum();
    let a = sxy / sxx;
    Ok((a, used.iter().map(|(x, y)| (y - a * x).powi(2)).sum()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub topology: Topology,
    pub n_min: usize,
    pub n_max: usize,
    /// Noise amplitude; `None` scans the noiseless graph once per `N`.
    pub epsilon: Option<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub lanczos: LanczosConfig,
}

impl ScanConfig {
    pub fn new(topology: Topology, n_min: usize, n_max: usize) -> Self {
        Self { topology, n_min, n_max, epsilon: None, replicas: 1, seed: 0, lanczos: LanczosConfig::default() }
    }

    pub fn with_noise(mut self, epsilon: f64, replicas: usize, seed: u64) -> Self {
        self.epsilon = Some(epsilon);
        self.replicas = replicas;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < self.topology.min_qubits() || self.n_min > self.n_max {
            return Err(Error::InvalidSize(format!(
                "range {}..{} invalid for {} (needs N >= {})",
                self.n_min,
                self.n_max,
                self.topology,
                self.topology.min_qubits()
            )));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidArgument("replicas must be at least 1".into()));
        }
        if let Some(eps) = self.epsilon {
            NoiseSpec::new(eps, 0)?;
        }
        self.lanczos.validate()
    }

    fn replicas_per_n(&self) -> usize {
        if self.epsilon.is_some() {
            self.replicas
        } else {
            1
        }
    }
}

/// Per-task seed: `derive_seed(master, N << 32 | replica)`.
pub fn instance_seed(master: u64, n_qubits: usize, replica: usize) -> u64 {
    derive_seed(master, (n_qubits as u64) << 32 | replica as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanInstance {
    pub n_qubits: usize,
    pub replica: usize,
    pub seed: Option<u64>,
    pub gamma: f64,
    pub lambda_min: f64,
    pub residual: f64,
    pub bounds: BoundReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n_qubits: usize,
    pub replicas: usize,
    pub gamma_mean: f64,
    /// Sample standard deviation; 0 for a single replica.
    pub gamma_std: f64,
    pub diameter: usize,
    pub bound_diameter: f64,
    /// Mean smallest link probability over replicas, when applicable.
    pub bound_min_p: Option<f64>,
    pub bounds_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub version: String,
    pub config: ScanConfig,
    pub rows: Vec<ScanRow>,
    pub instances: Vec<ScanInstance>,
}

/// Builds the graph of one scan task.
pub fn scan_graph(cfg: &ScanConfig, n: usize, replica: usize) -> Result<(InteractionGraph, Option<u64>)> {
    let base = cfg.topology.build(n)?;
    match cfg.epsilon {
        None => Ok((base, None)),
        Some(eps) => {
            let seed = instance_seed(cfg.seed, n, replica);
            Ok((apply_noise(&base, &NoiseSpec::new(eps, seed)?)?, Some(seed)))
        }
    }
}

/// `γ` for every `(N, replica)` in parallel; results are ordered by `N` then
/// replica regardless of scheduling.
pub fn scan_connectivity(cfg: &ScanConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let sizes: Vec<usize> = (cfg.n_min..=cfg.n_max).collect();
    // Noise rescales weights but keeps the skeleton, so one diameter per N.
    let diameters: HashMap<usize, usize> = sizes
        .par_iter()
        .map(|&n| {
            let ig = build_induced_graph(&cfg.topology.build(n)?)?;
            Ok((n, unweighted_diameter(&ig)?))
        })
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, usize)> =
        sizes.iter().flat_map(|&n| (0..cfg.replicas_per_n()).map(move |r| (n, r))).collect();
    let instances: Vec<ScanInstance> = tasks
        .par_iter()
        .map(|&(n, replica)| {
            let (g, seed) = scan_graph(cfg, n, replica)?;
            let ig = build_induced_graph(&g)?;
            let diameter = if g.min_probability() > 0.0 { diameters[&n] } else { unweighted_diameter(&ig)? };
            let s = algebraic_connectivity(&ig, &cfg.lanczos)?;
            Ok(ScanInstance {
                n_qubits: n,
                replica,
                seed,
                gamma: s.gamma,
                lambda_min: s.lambda_min,
                residual: s.residual_norms[1].max(s.residual_norms[2]),
                bounds: BoundReport::new(&g, s.gamma, diameter),
            })
        })
        .collect::<Result<_>>()?;
    let rows = sizes
        .iter()
        .map(|&n| {
            let group: Vec<&ScanInstance> = instances.iter().filter(|i| i.n_qubits == n).collect();
            let k = group.len() as f64;
            let mean = group.iter().map(|i| i.gamma).sum::<f64>() / k;
            let std = if group.len() > 1 {
                (group.iter().map(|i| (i.gamma - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
            } else {
                0.0
            };
            let bound_min_p = group
                .iter()
                .map(|i| i.bounds.min_weight_bound)
                .collect::<Option<Vec<f64>>>()
                .map(|v| v.iter().sum::<f64>() / k);
            ScanRow {
                n_qubits: n,
                replicas: group.len(),
                gamma_mean: mean,
                gamma_std: std,
                diameter: group[0].bounds.diameter,
                bound_diameter: group[0].bounds.diameter_bound,
                bound_min_p,
                bounds_hold: group.iter().all(|i| i.bounds.all_hold()),
            }
        })
        .collect();
    Ok(ScanResult { version: FORMAT_VERSION.to_string(), config: cfg.clone(), rows, instances })
}

impl ScanResult {
    /// `(N, mean γ)` pairs for fitting.
    pub fn points(&self) -> Vec<(usize, f64)> {
        self.rows.iter().map(|r| (r.n_qubits, r.gamma_mean)).collect()
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.bounds_hold)
    }

    /// Instances violating an applicable bound.
    pub fn violations(&self) -> Vec<&ScanInstance> {
        self.instances.iter().filter(|i| !i.bounds.all_hold()).collect()
    }

    pub fn csv_header() -> &'static str {
        "N,gamma_mean,gamma_std,bound_diameter,bound_min_p,diameter,replicas,bounds_hold"
    }

    /// CSV body, one row per `N`, without metadata.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for r in &self.rows {
            let min_p = r.bound_min_p.map(|b| format!("{b:.12e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{},{},{},{}\n",
                r.n_qubits, r.gamma_mean, r.gamma_std, r.bound_diameter, min_p, r.diameter, r.replicas, r.bounds_hold
            ));
        }
        out
    }
}
