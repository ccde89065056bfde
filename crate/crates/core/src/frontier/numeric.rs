//! Best-first search for the numeric minimum.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Debug;
use std::ops::Add;

use num_rational::BigRational;
use ordered_float::OrderedFloat;

use super::{Charge, Frontier, FrontierState, ScanBits};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, VertexSet, Weights};
use crate::rational::ScaledWeights;

/// Additive, totally ordered path cost. Charges are nonnegative.
pub trait Cost: Copy + Ord + Add<Output = Self> + Default + Debug {
    fn of_charge(charge: &Charge, weights: &[Self]) -> Self;
}

impl Cost for u128 {
    fn of_charge(charge: &Charge, weights: &[Self]) -> Self {
        charge
            .iter()
            .zip(weights)
            .map(|(&c, &w)| c as u128 * w)
            .sum()
    }
}

impl Cost for OrderedFloat<f64> {
    fn of_charge(charge: &Charge, weights: &[Self]) -> Self {
        OrderedFloat(
            charge
                .iter()
                .zip(weights)
                .map(|(&c, w)| c as f64 * w.0)
                .sum(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Hard cap on settled (numeric) or expanded (symbolic) states.
    pub max_states: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_states: 5_000_000,
        }
    }
}

/// Result of a numeric solve, generic over the cost type.
#[derive(Debug, Clone, PartialEq)]
pub struct Search<C> {
    /// Best complete set found, if any.
    pub best: Option<(C, VertexSet)>,
    /// Every strongly connected set exits at least this much.
    pub lower_bound: C,
    pub exact: bool,
    pub states_explored: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericSolution {
    /// The minimum when `exact`, otherwise the best value found so far.
    pub kappa0: Option<BigRational>,
    pub witness: Option<VertexSet>,
    pub lower_bound: BigRational,
    pub exact: bool,
    pub states_explored: usize,
}

impl NumericSolution {
    /// `kappa0 - lower_bound` for budget-limited runs, `None` when exact.
    pub fn gap(&self) -> Option<BigRational> {
        match (&self.kappa0, self.exact) {
            (_, true) => None,
            (Some(v), false) => Some(v - &self.lower_bound),
            (None, false) => None,
        }
    }
}

enum Node {
    Open(FrontierState),
    Closed,
}

struct Entry<C> {
    cost: C,
    path: ScanBits,
    node: Node,
}

impl<C: Cost> Entry<C> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.cost
            .cmp(&other.cost)
            .then_with(|| self.path.scan_cmp(&other.path))
            .then_with(|| {
                matches!(self.node, Node::Closed).cmp(&matches!(other.node, Node::Closed))
            })
    }
}

impl<C: Cost> PartialEq for Entry<C> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other).is_eq()
    }
}
impl<C: Cost> Eq for Entry<C> {}
impl<C: Cost> PartialOrd for Entry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C: Cost> Ord for Entry<C> {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Dijkstra over frontier states ordered by (cost, length, member list).
/// Since extending two paths by the same step preserves that order, the first
/// closed set popped is the minimum, and among minimizers the one with the
/// smallest maximum, then the lexicographically smallest member list.
pub fn solve_numeric_with<C: Cost>(
    spec: &GraphSpec,
    weights: &[C],
    config: SolverConfig,
) -> Result<Search<C>> {
    let frontier = Frontier::new(spec)?;
    let mut heap = BinaryHeap::new();
    let mut settled: HashSet<FrontierState> = HashSet::new();
    let mut best_closed: Option<(C, ScanBits)> = None;

    let (start, charge) = frontier.start();
    heap.push(Entry {
        cost: C::of_charge(&charge, weights),
        path: ScanBits::default().push(true),
        node: Node::Open(start),
    });

    let mut lower_bound = C::default();
    while let Some(entry) = heap.pop() {
        lower_bound = lower_bound.max(entry.cost);
        let state = match entry.node {
            Node::Closed => {
                let witness = VertexSet::new(entry.path.members()).expect("nonempty");
                return Ok(Search {
                    best: Some((entry.cost, witness)),
                    lower_bound: entry.cost,
                    exact: true,
                    states_explored: settled.len(),
                });
            }
            Node::Open(state) => state,
        };
        if settled.contains(&state) {
            continue;
        }
        if settled.len() >= config.max_states {
            let best =
                best_closed.map(|(c, path)| (c, VertexSet::new(path.members()).expect("nonempty")));
            return Ok(Search {
                best,
                lower_bound,
                exact: false,
                states_explored: settled.len(),
            });
        }

        if let Some(charge) = frontier.close(&state) {
            let cost = entry.cost + C::of_charge(&charge, weights);
            let better = best_closed.as_ref().is_none_or(|(c, path)| {
                cost.cmp(c).then_with(|| entry.path.scan_cmp(path)).is_lt()
            });
            if better {
                best_closed = Some((cost, entry.path.clone()));
            }
            heap.push(Entry {
                cost,
                path: entry.path.clone(),
                node: Node::Closed,
            });
        }
        for (member, step) in [
            (true, frontier.include(&state)),
            (false, frontier.exclude(&state)),
        ] {
            if let Some((next, charge)) = step {
                if !settled.contains(&next) {
                    heap.push(Entry {
                        cost: entry.cost + C::of_charge(&charge, weights),
                        path: entry.path.push(member),
                        node: Node::Open(next),
                    });
                }
            }
        }
        settled.insert(state);
    }
    // L steps of +R followed by R steps of -L form a cycle, so some closed
    // set is always reachable.
    unreachable!("frontier search exhausted without a strongly connected set")
}

/// Exact minimum exit weight over all finite strongly connected sets.
pub fn solve_numeric(
    spec: &GraphSpec,
    weights: &Weights,
    config: SolverConfig,
) -> Result<NumericSolution> {
    check_support(spec, weights)?;
    let scaled = ScaledWeights::new(weights.values())?;
    let search = solve_numeric_with::<u128>(spec, scaled.numerators(), config)?;
    let bound = lower_bound(weights);
    let searched_bound = scaled.unscale(search.lower_bound);
    let (kappa0, witness) = match search.best {
        Some((c, w)) => (Some(scaled.unscale(c)), Some(w)),
        None => (None, None),
    };
    Ok(NumericSolution {
        kappa0,
        witness,
        lower_bound: if search.exact {
            searched_bound
        } else {
            searched_bound.max(bound)
        },
        exact: search.exact,
        states_explored: search.states_explored,
    })
}

/// Floating-point fast path; ties between nearly equal sums may resolve
/// differently from the exact solver.
pub fn solve_numeric_f64(
    spec: &GraphSpec,
    weights: &[f64],
    config: SolverConfig,
) -> Result<Search<OrderedFloat<f64>>> {
    if weights.len() != spec.support().len() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite()))
    {
        return Err(Error::InvalidWeights(
            "float weights must be positive and match the support".into(),
        ));
    }
    let weights: Vec<OrderedFloat<f64>> = weights.iter().map(|&w| OrderedFloat(w)).collect();
    solve_numeric_with(spec, &weights, config)
}

/// `c+ + c-`: the leftmost member exits every leftward edge and the
/// rightmost member every rightward one.
pub fn lower_bound(weights: &Weights) -> BigRational {
    weights.half_sums().lower_bound()
}

fn check_support(spec: &GraphSpec, weights: &Weights) -> Result<()> {
    if weights.support() != spec.support() {
        return Err(Error::InvalidWeights(format!(
            "weights cover {:?} but the support is {:?}",
            weights.support(),
            spec.support()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn set(members: &[i64]) -> VertexSet {
        VertexSet::new(members.iter().copied()).unwrap()
    }

    #[test]
    fn three_consecutive_beat_the_pair() {
        let spec = GraphSpec::new(2, 2, [-2, 1, 2]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-2, 1, 9), (1, 1, 2), (2, 1, 9)]).unwrap();
        let sol = solve_numeric(&spec, &w, SolverConfig::default()).unwrap();
        assert!(sol.exact);
        assert_eq!(sol.kappa0, Some(q(17, 18)));
        assert_eq!(sol.witness, Some(set(&[0, 1, 2])));
        assert_eq!(sol.gap(), None);
    }

    #[test]
    fn nearest_neighbour() {
        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-1, 3, 7), (1, 2, 5)]).unwrap();
        let sol = solve_numeric(&spec, &w, SolverConfig::default()).unwrap();
        assert_eq!(sol.kappa0, Some(q(3, 7) + q(2, 5)));
        assert_eq!(sol.kappa0, Some(lower_bound(&w)));
        assert_eq!(sol.witness, Some(set(&[0, 1])));
    }

    #[test]
    fn self_loop_attains_lower_bound() {
        let spec = GraphSpec::new(2, 3, [-2, 0, 3]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-2, 1, 1), (0, 5, 1), (3, 2, 1)]).unwrap();
        let sol = solve_numeric(&spec, &w, SolverConfig::default()).unwrap();
        assert_eq!(sol.kappa0, Some(q(3, 1)));
        assert_eq!(sol.witness, Some(set(&[0])));
    }

    #[test]
    fn long_jump_pair_exceeds_lower_bound() {
        let spec = GraphSpec::new(1, 3, [-1, 1, 3]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-1, 1, 1), (1, 1, 1), (3, 1, 1)]).unwrap();
        let sol = solve_numeric(&spec, &w, SolverConfig::default()).unwrap();
        assert_eq!(sol.kappa0, Some(q(4, 1)));
        assert!(sol.kappa0.unwrap() > lower_bound(&w));
    }

    #[test]
    fn budget_overflow_reports_bounds() {
        let spec = GraphSpec::new(16, 5, [-16, 2, 5]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-16, 1, 67), (2, 15, 67), (5, 5, 67)]).unwrap();
        let sol = solve_numeric(&spec, &w, SolverConfig { max_states: 50 }).unwrap();
        assert!(!sol.exact);
        assert_eq!(sol.states_explored, 50);
        assert!(sol.lower_bound >= lower_bound(&w));
        if let Some(v) = &sol.kappa0 {
            assert!(*v >= sol.lower_bound);
            assert_eq!(sol.gap(), Some(v - &sol.lower_bound));
        }
    }

    #[test]
    fn float_mode_agrees() {
        let spec = GraphSpec::new(2, 2, [-2, 1, 2]).unwrap();
        let search =
            solve_numeric_f64(&spec, &[1.0 / 9.0, 0.5, 1.0 / 9.0], SolverConfig::default())
                .unwrap();
        let (value, witness) = search.best.unwrap();
        assert!((value.0 - 17.0 / 18.0).abs() < 1e-12);
        assert_eq!(witness, set(&[0, 1, 2]));
        assert!(solve_numeric_f64(&spec, &[1.0, -1.0, 1.0], SolverConfig::default()).is_err());
    }
}
