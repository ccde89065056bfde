//! Directed edge reinforced random walks on the graph, their annealed
//! Dirichlet law, and a Monte Carlo estimator for visits to 0 before a walk
//! leaves a set.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, VertexSet, Weights};
use crate::rational::format_rational;

/// Default step budget per walk.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Survival thresholds `2^4, ..., 2^12`.
pub const SURVIVAL_THRESHOLDS: [u64; 9] = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096];

fn steps<'a>(
    spec: &'a GraphSpec,
    path: &'a [i64],
) -> impl Iterator<Item = Result<(i64, i32)>> + 'a {
    path.windows(2).map(move |w| {
        let offset = w[1] - w[0];
        i32::try_from(offset)
            .ok()
            .filter(|&i| spec.contains(i))
            .map(|i| (w[0], i))
            .ok_or(Error::InvalidStep {
                from: w[0],
                to: w[1],
            })
    })
}

fn check_weights(spec: &GraphSpec, weights: &Weights) -> Result<()> {
    if weights.support() != spec.support() {
        return Err(Error::SupportMismatch {
            weights: weights.support(),
            vector: spec.support().to_vec(),
        });
    }
    Ok(())
}

/// Probability that the reinforced walk follows `path` (a vertex sequence),
/// by the urn rule: each traversal adds 1 to the taken edge's weight.
pub fn path_probability_derrw(
    spec: &GraphSpec,
    weights: &Weights,
    path: &[i64],
) -> Result<BigRational> {
    check_weights(spec, weights)?;
    let total: BigRational = weights.values().sum();
    let mut edge: HashMap<(i64, i32), u64> = HashMap::new();
    let mut out: HashMap<i64, u64> = HashMap::new();
    let mut p = BigRational::one();
    for step in steps(spec, path) {
        let (x, i) = step?;
        let n_edge = edge.entry((x, i)).or_default();
        let n_out = out.entry(x).or_default();
        let num = weights.get(i).expect("checked support")
            + BigRational::from_integer(BigInt::from(*n_edge));
        let den = &total + BigRational::from_integer(BigInt::from(*n_out));
        p *= num / den;
        *n_edge += 1;
        *n_out += 1;
    }
    Ok(p)
}

fn rising(a: &BigRational, n: u64) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, k| {
        acc * (a + BigRational::from_integer(BigInt::from(k)))
    })
}

/// Probability of `path` averaged over independent Dirichlet transition
/// vectors at each site: per site, the Dirichlet moment
/// `prod_i a_i^(n_i) / (sum a)^(n)` with rising factorials.
pub fn path_probability_annealed(
    spec: &GraphSpec,
    weights: &Weights,
    path: &[i64],
) -> Result<BigRational> {
    check_weights(spec, weights)?;
    let total: BigRational = weights.values().sum();
    let mut edge: HashMap<(i64, i32), u64> = HashMap::new();
    let mut out: HashMap<i64, u64> = HashMap::new();
    for step in steps(spec, path) {
        let (x, i) = step?;
        *edge.entry((x, i)).or_default() += 1;
        *out.entry(x).or_default() += 1;
    }
    let mut p = BigRational::one();
    for ((_, i), n) in &edge {
        p *= rising(weights.get(*i).expect("checked support"), *n);
    }
    for n in out.values() {
        p /= rising(&total, *n);
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitStats {
    /// Visits to 0 before the first exit, one per walk, in walk order.
    /// Censored walks contribute their count at the cap.
    pub samples: Vec<u64>,
    pub cap: u64,
    pub censored: u64,
}

impl VisitStats {
    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|&n| n as f64).sum::<f64>() / self.samples.len() as f64
    }

    /// `(k, #{walks with more than k visits})`.
    pub fn survival(&self, thresholds: &[u64]) -> Vec<(u64, u64)> {
        let mut sorted = self.samples.clone();
        sorted.sort_unstable();
        thresholds
            .iter()
            .map(|&k| {
                let at_most = sorted.partition_point(|&n| n <= k);
                (k, (sorted.len() - at_most) as u64)
            })
            .collect()
    }
}

/// Least-squares slope of `ln count` against `ln k`, skipping empty bins.
/// `None` with fewer than two nonempty bins.
pub fn loglog_slope(survival: &[(u64, u64)]) -> Option<f64> {
    let points: Vec<(f64, f64)> = survival
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|&(k, c)| ((k as f64).ln(), (c as f64).ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// One reinforced walk from 0, run until it leaves `set` or takes `cap` steps.
/// Returns the visits to 0 (the start counts) and whether the cap was hit.
fn walk(
    members: &[i64],
    offsets: &[i32],
    alpha: &[f64],
    cap: u64,
    rng: &mut ChaCha8Rng,
) -> (u64, bool) {
    let k = offsets.len();
    let mut counts = vec![0u32; members.len() * k];
    let mut out = vec![0u64; members.len()];
    let total: f64 = alpha.iter().sum();
    let mut at = members.binary_search(&0).expect("0 is a member");
    let mut visits = 1u64;
    for _ in 0..cap {
        let row = &mut counts[at * k..(at + 1) * k];
        let mut u = rng.random::<f64>() * (total + out[at] as f64);
        let mut pick = k - 1;
        for (j, a) in alpha.iter().enumerate() {
            let w = a + row[j] as f64;
            if u < w {
                pick = j;
                break;
            }
            u -= w;
        }
        row[pick] += 1;
        out[at] += 1;
        let next = members[at] + i64::from(offsets[pick]);
        match members.binary_search(&next) {
            Ok(idx) => {
                at = idx;
                if next == 0 {
                    visits += 1;
                }
            }
            Err(_) => return (visits, false),
        }
    }
    (visits, true)
}

/// Runs `n_walks` independent reinforced walks from 0 and records the
/// visits to 0 before each leaves `set`. Walk `j` draws from stream `j` of a
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn estimate_visits(
    spec: &GraphSpec,
    weights: &Weights,
    set: &VertexSet,
    n_walks: u64,
    cap: u64,
    seed: u64,
) -> Result<VisitStats> {
    check_weights(spec, weights)?;
    if !set.contains(0) {
        return Err(Error::InvalidTrap(format!("{set} does not contain 0")));
    }
    if !spec.is_strongly_connected(set) {
        return Err(Error::InvalidTrap(format!(
            "{set} is not strongly connected"
        )));
    }
    let members = set.members().to_vec();
    let offsets = spec.support().to_vec();
    let alpha = weights.to_f64();
    let results: Vec<(u64, bool)> = (0..n_walks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            walk(&members, &offsets, &alpha, cap, &mut rng)
        })
        .collect();
    Ok(VisitStats {
        censored: results.iter().filter(|r| r.1).count() as u64,
        samples: results.into_iter().map(|r| r.0).collect(),
        cap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    #[serde(rename = "beta_S")]
    pub beta_s: String,
    pub n_walks: u64,
    pub cap: u64,
    pub censored: u64,
    pub mean: f64,
    pub survival: Vec<(u64, u64)>,
    pub slope: Option<f64>,
}

/// Simulation plus the tail summary over [`SURVIVAL_THRESHOLDS`].
pub fn simulate(
    spec: &GraphSpec,
    weights: &Weights,
    set: &VertexSet,
    n_walks: u64,
    cap: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let stats = estimate_visits(spec, weights, set, n_walks, cap, seed)?;
    let beta = weights.beta(&spec.exit_vector(set))?;
    let survival = stats.survival(&SURVIVAL_THRESHOLDS);
    Ok(SimulationReport {
        beta_s: format_rational(&beta),
        n_walks,
        cap,
        censored: stats.censored,
        mean: stats.mean(),
        slope: loglog_slope(&survival),
        survival,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn two_edges() -> (GraphSpec, Weights) {
        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-1, 1, 1), (1, 1, 1)]).unwrap();
        (spec, w)
    }

    #[test]
    fn urn_by_hand() {
        let (spec, w) = two_edges();
        // 0 -> 1 -> 0 -> 1 uses edge (0,+1) twice
        assert_eq!(
            path_probability_derrw(&spec, &w, &[0, 1, 0, 1]).unwrap(),
            q(1, 2) * q(1, 2) * q(2, 3)
        );
        assert_eq!(
            path_probability_derrw(&spec, &w, &[0, 1, 0, -1]).unwrap(),
            q(1, 2) * q(1, 2) * q(1, 3)
        );
        assert_eq!(path_probability_derrw(&spec, &w, &[]).unwrap(), q(1, 1));
        assert_eq!(path_probability_derrw(&spec, &w, &[5]).unwrap(), q(1, 1));
    }

    #[test]
    fn dirichlet_moments_by_hand() {
        let (spec, w) = two_edges();
        assert_eq!(
            path_probability_annealed(&spec, &w, &[0, 1, 0, 1]).unwrap(),
            q(1, 2) * q(1, 3)
        );
        assert_eq!(
            path_probability_annealed(&spec, &w, &[0, 1, 0, -1]).unwrap(),
            q(1, 2) * q(1, 6)
        );
        assert_eq!(path_probability_annealed(&spec, &w, &[]).unwrap(), q(1, 1));
    }

    #[test]
    fn invalid_step() {
        let (spec, w) = two_edges();
        assert!(matches!(
            path_probability_derrw(&spec, &w, &[0, 2]),
            Err(Error::InvalidStep { from: 0, to: 2 })
        ));
        assert!(path_probability_annealed(&spec, &w, &[0, 0]).is_err());
    }

    #[test]
    fn walks_are_deterministic_and_bounded() {
        let spec = GraphSpec::new(2, 2, [-2, 1, 2]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-2, 1, 9), (1, 1, 2), (2, 1, 9)]).unwrap();
        let set = VertexSet::new([0, 1, 2]).unwrap();
        let a = estimate_visits(&spec, &w, &set, 500, 1000, 7).unwrap();
        let b = estimate_visits(&spec, &w, &set, 500, 1000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples.len(), 500);
        assert!(a.samples.iter().all(|&n| (1..=1001).contains(&n)));
    }

    #[test]
    fn rejects_bad_sets() {
        let spec = GraphSpec::new(2, 2, [-2, 1, 2]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-2, 1, 9), (1, 1, 2), (2, 1, 9)]).unwrap();
        let not_sc = VertexSet::new([0, 1]).unwrap();
        let no_zero = VertexSet::new([1, 2, 3]).unwrap();
        assert!(matches!(
            estimate_visits(&spec, &w, &not_sc, 1, 10, 0),
            Err(Error::InvalidTrap(_))
        ));
        assert!(matches!(
            estimate_visits(&spec, &w, &no_zero, 1, 10, 0),
            Err(Error::InvalidTrap(_))
        ));
    }

    #[test]
    fn self_loop_singleton_has_finite_mean() {
        // beta({0}) = 3 > 1: visits are geometric-like
        let spec = GraphSpec::new(1, 1, [-1, 0, 1]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-1, 3, 2), (0, 1, 1), (1, 3, 2)]).unwrap();
        let stats =
            estimate_visits(&spec, &w, &VertexSet::new([0]).unwrap(), 20_000, 10_000, 1).unwrap();
        assert_eq!(stats.censored, 0);
        // E[N] = 1 + sum_k P(k self-loops) with urn weights, about 1.5
        let mean = stats.mean();
        assert!(mean > 1.3 && mean < 1.7, "{mean}");
    }

    #[test]
    fn survival_and_slope() {
        let stats = VisitStats {
            samples: vec![1, 20, 40, 100, 5000],
            cap: 10,
            censored: 0,
        };
        assert_eq!(
            stats.survival(&[16, 64, 4096]),
            vec![(16, 4), (64, 2), (4096, 1)]
        );
        let exact: Vec<(u64, u64)> = [16u64, 64, 256]
            .iter()
            .map(|&k| (k, 1_000_000 / k))
            .collect();
        assert!((loglog_slope(&exact).unwrap() + 1.0).abs() < 1e-3);
        assert_eq!(loglog_slope(&[(16, 3), (32, 0)]), None);
    }
}
