//! Interaction graphs: which ordered qubit pairs carry a CNOT, and with what
//! probability.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Default upper limit on the number of qubits.
pub const DEFAULT_MAX_QUBITS: usize = 16;

const SUM_TOLERANCE: f64 = 1e-12;

/// A directed CNOT link. Serialized as `[control, target, probability]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Link {
    pub control: usize,
    pub target: usize,
    pub probability: f64,
}

impl Link {
    pub fn new(control: usize, target: usize, probability: f64) -> Self {
        Self { control, target, probability }
    }
}

impl From<(usize, usize, f64)> for Link {
    fn from((control, target, probability): (usize, usize, f64)) -> Self {
        Self { control, target, probability }
    }
}

impl From<Link> for (usize, usize, f64) {
    fn from(l: Link) -> Self {
        (l.control, l.target, l.probability)
    }
}

#[derive(Deserialize)]
struct RawGraph {
    n_qubits: usize,
    links: Vec<Link>,
}

/// `N` qubits plus a probability distribution over directed CNOT links.
///
/// JSON form: `{"n_qubits": 3, "links": [[0, 1, 0.5], [1, 2, 0.5]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct InteractionGraph {
    n_qubits: usize,
    links: Vec<Link>,
}

impl TryFrom<RawGraph> for InteractionGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        InteractionGraph::new(raw.n_qubits, raw.links)
    }
}

impl InteractionGraph {
    /// Validates against [`DEFAULT_MAX_QUBITS`].
    pub fn new(n_qubits: usize, links: Vec<Link>) -> Result<Self> {
        Self::with_ceiling(n_qubits, links, DEFAULT_MAX_QUBITS)
    }

    pub fn with_ceiling(n_qubits: usize, links: Vec<Link>, max_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::InvalidSize(format!("need at least 2 qubits, got {n_qubits}")));
        }
        if n_qubits > max_qubits {
            return Err(Error::CeilingExceeded { what: "interaction graph", n: n_qubits, ceiling: max_qubits });
        }
        if links.is_empty() {
            return Err(Error::InvalidGraph("no links".into()));
        }
        let mut seen = HashSet::with_capacity(links.len());
        let mut sum = 0.0;
        for l in &links {
            for q in [l.control, l.target] {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange { index: q, n_qubits });
                }
            }
            if l.control == l.target {
                return Err(Error::SameControlTarget(l.control));
            }
            if !seen.insert((l.control, l.target)) {
                return Err(Error::InvalidGraph(format!("duplicate link ({}, {})", l.control, l.target)));
            }
            if !(l.probability.is_finite() && (0.0..=1.0).contains(&l.probability)) {
                return Err(Error::InvalidGraph(format!(
                    "probability {} of link ({}, {}) outside [0, 1]",
                    l.probability, l.control, l.target
                )));
            }
            sum += l.probability;
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidGraph(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { n_qubits, links })
    }

    /// Normalizes raw nonnegative weights by their exact sum.
    pub fn from_weights(n_qubits: usize, weighted: Vec<(usize, usize, f64)>) -> Result<Self> {
        let total: f64 = weighted.iter().map(|w| w.2).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidGraph(format!("weights sum to {total}")));
        }
        let links = weighted.into_iter().map(|(c, t, w)| Link::new(c, t, w / total)).collect();
        Self::new(n_qubits, links)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn min_probability(&self) -> f64 {
        self.links.iter().map(|l| l.probability).fold(f64::INFINITY, f64::min)
    }

    pub fn max_probability(&self) -> f64 {
        self.links.iter().map(|l| l.probability).fold(0.0, f64::max)
    }

    /// True when all `N(N−1)` ordered pairs carry a link.
    pub fn is_complete_topology(&self) -> bool {
        self.links.len() == self.n_qubits * (self.n_qubits - 1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidGraph(e.to_string()))
    }
}

/// Multiplicative weight noise: every probability is scaled by a uniform
/// draw from `[1 − ε, 1 + ε]`, then the distribution is renormalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        let spec = Self { epsilon, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidNoise(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        Ok(())
    }
}

pub fn make_complete(n: usize) -> Result<InteractionGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("complete graph needs N >= 2, got {n}")));
    }
    let p = 1.0 / (n * (n - 1)) as f64;
    let links = (0..n).flat_map(|c| (0..n).filter(move |&t| t != c).map(move |t| Link::new(c, t, p))).collect();
    InteractionGraph::new(n, links)
}

/// Oriented cycle `i → i+1 (mod N)`.
pub fn make_cycle(n: usize) -> Result<InteractionGraph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs N >= 3, got {n}")));
    }
    let p = 1.0 / n as f64;
    InteractionGraph::new(n, (0..n).map(|i| Link::new(i, (i + 1) % n, p)).collect())
}

/// Cycle with both orientations on every neighbour pair, `2N` links of `1/(2N)`.
pub fn make_cycle_bidirectional(n: usize) -> Result<InteractionGraph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("cycle needs N >= 3, got {n}")));
    }
    let p = 1.0 / (2 * n) as f64;
    let links = (0..n).flat_map(|i| [Link::new(i, (i + 1) % n, p), Link::new((i + 1) % n, i, p)]).collect();
    InteractionGraph::new(n, links)
}

/// Star with hub qubit 0 controlling every other qubit.
pub fn make_star(n: usize) -> Result<InteractionGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("star needs N >= 2, got {n}")));
    }
    let p = 1.0 / (n - 1) as f64;
    InteractionGraph::new(n, (1..n).map(|j| Link::new(0, j, p)).collect())
}

/// Complete topology where link `0 → 1` has raw weight 1 and every other link
/// raw weight `N^-3`.
pub fn make_unbalanced(n: usize) -> Result<InteractionGraph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("unbalanced graph needs N >= 3, got {n}")));
    }
    let small = (n as f64).powi(-3);
    let weights = (0..n)
        .flat_map(|c| (0..n).filter(move |&t| t != c).map(move |t| (c, t)))
        .map(|(c, t)| (c, t, if (c, t) == (0, 1) { 1.0 } else { small }))
        .collect();
    InteractionGraph::from_weights(n, weights)
}

/// Draws one multiplier per link, in link order, from the seeded stream.
pub fn apply_noise(g: &InteractionGraph, spec: &NoiseSpec) -> Result<InteractionGraph> {
    spec.validate()?;
    if spec.epsilon == 0.0 {
        return Ok(g.clone());
    }
    let mut rng = rng_from_seed(spec.seed);
    let (lo, hi) = (1.0 - spec.epsilon, 1.0 + spec.epsilon);
    let weights = g.links.iter().map(|l| (l.control, l.target, l.probability * rng.gen_range(lo..=hi))).collect();
    InteractionGraph::from_weights(g.n_qubits, weights)
}

/// Named topologies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Complete,
    Circle,
    CircleBidirectional,
    Star,
    Unbalanced,
}

impl Topology {
    pub fn build(self, n: usize) -> Result<InteractionGraph> {
        match self {
            Topology::Complete => make_complete(n),
            Topology::Circle => make_cycle(n),
            Topology::CircleBidirectional => make_cycle_bidirectional(n),
            Topology::Star => make_star(n),
            Topology::Unbalanced => make_unbalanced(n),
        }
    }

    pub fn min_qubits(self) -> usize {
        match self {
            Topology::Complete | Topology::Star => 2,
            Topology::Circle | Topology::CircleBidirectional | Topology::Unbalanced => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Complete => "complete",
            Topology::Circle => "circle",
            Topology::CircleBidirectional => "circle-bidirectional",
            Topology::Star => "star",
            Topology::Unbalanced => "unbalanced",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Topology::Complete),
            "circle" | "cycle" => Ok(Topology::Circle),
            "circle-bidirectional" => Ok(Topology::CircleBidirectional),
            "star" => Ok(Topology::Star),
            "unbalanced" => Ok(Topology::Unbalanced),
            other => Err(Error::InvalidArgument(format!("unknown topology {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(g: &InteractionGraph) -> f64 {
        g.links().iter().map(|l| l.probability).sum()
    }

    #[test]
    fn complete_graph_weights() {
        let g = make_complete(2).unwrap();
        assert_eq!(g.links().len(), 2);
        assert!(g.links().iter().all(|l| l.probability == 0.5));

        let g = make_complete(6).unwrap();
        assert_eq!(g.links().len(), 30);
        assert!(g.links().iter().all(|l| l.probability == 1.0 / 30.0));
        assert_eq!(g.min_probability(), 1.0 / 30.0);

        let g = make_complete(4).unwrap();
        assert_eq!(g.links().len(), 12);
        assert!((sum(&g) - 1.0).abs() < 1e-15);
        assert!(g.is_complete_topology());

        assert!(matches!(make_complete(1), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn cycle_and_star() {
        let g = make_cycle(3).unwrap();
        let pairs: Vec<_> = g.links().iter().map(|l| (l.control, l.target)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 0)]);
        assert!(g.links().iter().all(|l| l.probability == 1.0 / 3.0));
        assert_eq!(make_cycle(8).unwrap().min_probability(), 0.125);
        assert!(make_cycle(2).is_err());

        let s = make_star(4).unwrap();
        assert_eq!(s.links().len(), 3);
        assert!(s.links().iter().all(|l| l.control == 0));
        let s2 = make_star(2).unwrap();
        assert_eq!(s2.links(), &[Link::new(0, 1, 1.0)]);
        let s3 = make_star(3).unwrap();
        assert_eq!(s3.links(), &[Link::new(0, 1, 0.5), Link::new(0, 2, 0.5)]);
        assert!(make_star(1).is_err());
        assert!(!s.is_complete_topology());
    }

    #[test]
    fn unbalanced_minimum_probability() {
        let g = make_unbalanced(3).unwrap();
        assert!((g.min_probability() - 1.0 / 32.0).abs() < 1e-15);
        let g = make_unbalanced(10).unwrap();
        let expected = 1.0 / (1000.0 + 89.0);
        assert!((g.min_probability() - expected).abs() < 1e-15);
        assert!((g.min_probability() - 9.182e-4).abs() < 1e-6);
        for n in 3..=12 {
            let g = make_unbalanced(n).unwrap();
            assert_eq!(g.links().iter().filter(|l| l.probability > 0.5).count(), 1);
            assert!((sum(&g) - 1.0).abs() < 1e-12);
        }
        assert!(make_unbalanced(2).is_err());
    }

    #[test]
    fn zero_noise_is_identity() {
        let g = make_complete(5).unwrap();
        let mut h = g.clone();
        for seed in 0..4 {
            h = apply_noise(&h, &NoiseSpec::new(0.0, seed).unwrap()).unwrap();
        }
        assert_eq!(g, h);
    }

    #[test]
    fn noise_respects_multiplier_interval() {
        let g = make_complete(6).unwrap();
        let spec = NoiseSpec::new(0.3, 42).unwrap();
        let h = apply_noise(&g, &spec).unwrap();
        // Recover the multipliers from the same stream and check each lies in range.
        let mut rng = rng_from_seed(42);
        let draws: Vec<f64> = (0..g.links().len()).map(|_| rng.gen_range(0.7..=1.3)).collect();
        assert!(draws.iter().all(|u| (0.7..=1.3).contains(u)));
        let total: f64 = draws.iter().map(|u| u / 30.0).sum();
        for (l, u) in h.links().iter().zip(&draws) {
            assert!((l.probability - u / 30.0 / total).abs() < 1e-15);
        }
        assert!(h.max_probability() / h.min_probability() <= 1.3 / 0.7 + 1e-12);
        assert_eq!(h, apply_noise(&g, &spec).unwrap());
        assert_ne!(h, apply_noise(&g, &NoiseSpec::new(0.3, 43).unwrap()).unwrap());
    }

    #[test]
    fn full_noise_stays_normalized() {
        let g = make_complete(4).unwrap();
        for seed in 0..20 {
            let h = apply_noise(&g, &NoiseSpec::new(1.0, seed).unwrap()).unwrap();
            assert!(h.links().iter().all(|l| l.probability >= 0.0));
            assert!((sum(&h) - 1.0).abs() < 1e-12);
        }
        assert!(NoiseSpec::new(1.5, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = make_cycle(4).unwrap();
        let s = g.to_json();
        assert!(s.starts_with(r#"{"n_qubits":4,"links":[[0,1,0.25]"#));
        assert_eq!(InteractionGraph::from_json(&s).unwrap(), g);
        assert!(InteractionGraph::from_json(r#"{"n_qubits":2,"links":[[0,0,1.0]]}"#).is_err());
        assert!(InteractionGraph::from_json(r#"{"n_qubits":2,"links":[[0,1,0.6]]}"#).is_err());
        assert!(InteractionGraph::from_json(r#"{"n_qubits":2,"links":[[0,2,1.0]]}"#).is_err());
        assert!(InteractionGraph::from_json(r#"{"n_qubits":2,"links":[[0,1,0.5],[0,1,0.5]]}"#).is_err());
        assert!(InteractionGraph::new(17, vec![Link::new(0, 1, 1.0)]).is_err());
    }
}
