//! Brute-force reference: enumerate every canonical strongly connected set
//! up to a diameter bound, with sets packed into `u64` bitmasks.
//!
//! Nothing here reuses the frontier solver. Strong connectivity is decided by
//! forward and backward closure from vertex 0 and exit vectors are popcounts
//! of shifted masks, so the two computations can be checked against each other.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ExitVector, GraphSpec, VertexSet, Weights};
use crate::rational::ScaledWeights;

pub const MAX_ORACLE_DIAMETER: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_diameter: u32,
    /// Abort with [`Error::BudgetExhausted`] after this many strongly connected sets.
    pub max_sets: Option<u64>,
}

impl EnumerationBudget {
    pub fn diameter(max_diameter: u32) -> Self {
        Self {
            max_diameter,
            max_sets: None,
        }
    }
}

/// One Pareto-minimal exit vector and the first set (in enumeration order)
/// realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrontEntry {
    pub vector: ExitVector,
    pub witness: VertexSet,
}

/// Antichain of exit vectors under componentwise order, each with a witness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParetoFront {
    entries: Vec<FrontEntry>,
}

impl ParetoFront {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts unless an existing vector is `<=` this one. Among equal vectors
    /// the witness first in enumeration order is kept. Returns whether the
    /// front changed.
    pub fn insert(&mut self, vector: ExitVector, witness: VertexSet) -> bool {
        for entry in &mut self.entries {
            if entry.vector.le(&vector) {
                if entry.vector == vector && witness.enumeration_cmp(&entry.witness).is_lt() {
                    entry.witness = witness;
                    return true;
                }
                return false;
            }
        }
        self.entries.retain(|e| !vector.le(&e.vector));
        let pos = self
            .entries
            .binary_search_by(|e| e.vector.counts().cmp(&vector.counts()))
            .unwrap_or_else(|p| p);
        self.entries.insert(pos, FrontEntry { vector, witness });
        true
    }

    /// Entries sorted lexicographically by count vector.
    pub fn entries(&self) -> &[FrontEntry] {
        &self.entries
    }

    pub fn vectors(&self) -> Vec<ExitVector> {
        self.entries.iter().map(|e| e.vector.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Some front vector is `<=` `x`.
    pub fn covers(&self, x: &ExitVector) -> Option<&FrontEntry> {
        self.entries.iter().find(|e| e.vector.le(x))
    }

    pub fn is_antichain(&self) -> bool {
        self.entries.iter().enumerate().all(|(a, ea)| {
            self.entries
                .iter()
                .enumerate()
                .all(|(b, eb)| a == b || !ea.vector.le(&eb.vector))
        })
    }

    /// Smallest `vector . alpha` over the front, with the first entry attaining it.
    pub fn minimum(&self, weights: &Weights) -> Result<Option<(BigRational, &FrontEntry)>> {
        let mut best: Option<(BigRational, &FrontEntry)> = None;
        for entry in &self.entries {
            let value = weights.beta(&entry.vector)?;
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, entry));
            }
        }
        Ok(best)
    }
}

/// Elements not strictly dominated by another element, deduplicated and
/// sorted. Idempotent.
pub fn minimal_filter(vectors: &[ExitVector]) -> Vec<ExitVector> {
    let mut out: Vec<ExitVector> = vectors
        .iter()
        .filter(|x| !vectors.iter().any(|y| y.strictly_dominates(x)))
        .cloned()
        .collect();
    out.sort_by_key(|x| x.counts());
    out.dedup();
    out
}

/// The graph as shift operations on bitmasks.
#[derive(Debug, Clone)]
pub struct MaskGraph {
    offsets: Vec<i32>,
    self_loop: bool,
    window: u32,
}

fn shift(x: u64, by: i32) -> u64 {
    if by >= 0 {
        x.checked_shl(by as u32).unwrap_or(0)
    } else {
        x.checked_shr(by.unsigned_abs()).unwrap_or(0)
    }
}

impl MaskGraph {
    pub fn new(spec: &GraphSpec) -> Self {
        Self {
            offsets: spec.support().to_vec(),
            self_loop: spec.has_self_loop(),
            window: spec.window() as u32,
        }
    }

    fn successors(&self, x: u64) -> u64 {
        self.offsets.iter().fold(0, |acc, &i| acc | shift(x, i))
    }

    fn predecessors(&self, x: u64) -> u64 {
        self.offsets.iter().fold(0, |acc, &i| acc | shift(x, -i))
    }

    fn closure(&self, mask: u64, step: impl Fn(u64) -> u64) -> u64 {
        let mut seen = 1u64;
        loop {
            let next = seen | (step(seen) & mask);
            if next == seen {
                return seen;
            }
            seen = next;
        }
    }

    /// Strong connectivity of a set containing vertex 0.
    pub fn is_strongly_connected(&self, mask: u64) -> bool {
        debug_assert!(mask & 1 == 1);
        if mask == 1 {
            return self.self_loop;
        }
        self.closure(mask, |x| self.successors(x)) == mask
            && self.closure(mask, |x| self.predecessors(x)) == mask
    }

    fn has_in_and_out(&self, mask: u64, z: u32) -> bool {
        let bit = 1u64 << z;
        self.successors(bit) & mask != 0 && self.predecessors(bit) & mask != 0
    }

    /// Exit counts in ascending support order.
    pub fn exit_counts(&self, mask: u64) -> Vec<u32> {
        self.offsets
            .iter()
            .map(|&i| (mask & !shift(mask, -i)).count_ones())
            .collect()
    }
}

/// Depth-first over the interior positions of sets with fixed maximum `max`,
/// members before non-members, so visits come in lexicographic order of the
/// sorted member sequence. A vertex whose neighbourhood is fully decided must
/// have an in- and an out-neighbour; survivors get the full closure test.
fn scan_max(
    graph: &MaskGraph,
    max: u32,
    counter: &AtomicU64,
    limit: Option<u64>,
    visit: &mut dyn FnMut(u64),
) -> Result<()> {
    fn go(
        graph: &MaskGraph,
        max: u32,
        pos: u32,
        mask: u64,
        counter: &AtomicU64,
        limit: Option<u64>,
        visit: &mut dyn FnMut(u64),
    ) -> Result<()> {
        if pos >= max {
            if graph.is_strongly_connected(mask) {
                let seen = counter.fetch_add(1, Ordering::Relaxed) + 1;
                if limit.is_some_and(|l| seen > l) {
                    return Err(Error::BudgetExhausted(seen - 1));
                }
                visit(mask);
            }
            return Ok(());
        }
        for include in [true, false] {
            let next = if include { mask | 1 << pos } else { mask };
            if let Some(z) = pos.checked_sub(graph.window) {
                if next >> z & 1 == 1 && !graph.has_in_and_out(next, z) {
                    continue;
                }
            }
            go(graph, max, pos + 1, next, counter, limit, visit)?;
        }
        Ok(())
    }
    let start = 1u64 | 1u64 << max;
    go(graph, max, 1, start, counter, limit, visit)
}

/// Runs `visit` over every set, partitioned by maximum across threads.
/// Returns one accumulator per maximum `0..=D`, in order.
fn scan_all<T: Send>(
    spec: &GraphSpec,
    budget: EnumerationBudget,
    init: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, u64) + Sync,
) -> Result<Vec<T>> {
    if budget.max_diameter > MAX_ORACLE_DIAMETER {
        return Err(Error::DiameterTooLarge(budget.max_diameter));
    }
    let graph = MaskGraph::new(spec);
    let counter = AtomicU64::new(0);
    (0..=budget.max_diameter)
        .into_par_iter()
        .map(|max| {
            let mut acc = init();
            scan_max(&graph, max, &counter, budget.max_sets, &mut |mask| {
                visit(&mut acc, mask)
            })?;
            Ok(acc)
        })
        .collect()
}

/// Calls `visit` on each canonical strongly connected set with diameter at
/// most `D`, ordered by maximum and then lexicographically. Returns the count.
pub fn for_each_sc_set(
    spec: &GraphSpec,
    budget: EnumerationBudget,
    mut visit: impl FnMut(u64),
) -> Result<u64> {
    if budget.max_diameter > MAX_ORACLE_DIAMETER {
        return Err(Error::DiameterTooLarge(budget.max_diameter));
    }
    let graph = MaskGraph::new(spec);
    let counter = AtomicU64::new(0);
    for max in 0..=budget.max_diameter {
        scan_max(&graph, max, &counter, budget.max_sets, &mut visit)?;
    }
    Ok(counter.into_inner())
}

pub fn enumerate_sc_sets(spec: &GraphSpec, budget: EnumerationBudget) -> Result<Vec<VertexSet>> {
    let per_max = scan_all(spec, budget, Vec::new, |acc: &mut Vec<u64>, mask| {
        acc.push(mask)
    })?;
    Ok(per_max
        .into_iter()
        .flatten()
        .map(|mask| VertexSet::from_mask(mask).expect("mask contains 0"))
        .collect())
}

/// Distinct exit vectors over the enumerated family.
#[derive(Debug, Clone, Default)]
pub struct Census {
    /// Count vector (ascending support order) to the first set realizing it.
    pub vectors: BTreeMap<Vec<u32>, u64>,
    pub sets: u64,
}

pub fn exit_vector_census(spec: &GraphSpec, budget: EnumerationBudget) -> Result<Census> {
    let graph = MaskGraph::new(spec);
    let per_max = scan_all(spec, budget, Census::default, |acc, mask| {
        acc.sets += 1;
        acc.vectors.entry(graph.exit_counts(mask)).or_insert(mask);
    })?;
    let mut census = Census::default();
    for part in per_max {
        census.sets += part.sets;
        for (v, mask) in part.vectors {
            census.vectors.entry(v).or_insert(mask);
        }
    }
    Ok(census)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleValue {
    pub value: BigRational,
    pub witness: VertexSet,
    pub diameter_bound: u32,
}

/// Minimum exit weight over the enumerated family. An upper bound on the
/// true minimum, exact once some minimizer fits within the diameter bound.
pub fn oracle_kappa0(
    spec: &GraphSpec,
    weights: &Weights,
    budget: EnumerationBudget,
) -> Result<OracleValue> {
    let scaled = ScaledWeights::new(weights.values())?;
    let graph = MaskGraph::new(spec);
    let per_max = scan_all(
        spec,
        budget,
        || None::<(u128, u64)>,
        |best, mask| {
            let value = scaled.dot(&graph.exit_counts(mask));
            if best.is_none_or(|(b, _)| value < b) {
                *best = Some((value, mask));
            }
        },
    )?;
    let (value, mask) = per_max
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .ok_or(Error::EmptyFamily(budget.max_diameter))?;
    Ok(OracleValue {
        value: scaled.unscale(value),
        witness: VertexSet::from_mask(mask)?,
        diameter_bound: budget.max_diameter,
    })
}

/// Pareto-minimal exit vectors of the enumerated family: a candidate front
/// at diameter `D`.
pub fn oracle_pareto(spec: &GraphSpec, budget: EnumerationBudget) -> Result<ParetoFront> {
    let census = exit_vector_census(spec, budget)?;
    let support = spec.support();
    let vectors: Vec<ExitVector> = census
        .vectors
        .keys()
        .map(|c| ExitVector::from_counts(support, c))
        .collect();
    let mut front = ParetoFront::new();
    for x in minimal_filter(&vectors) {
        let mask = census.vectors[&x.counts()];
        front.insert(x, VertexSet::from_mask(mask)?);
    }
    Ok(front)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(members: &[i64]) -> VertexSet {
        VertexSet::new(members.iter().copied()).unwrap()
    }

    fn v(support: &[i32], counts: &[u32]) -> ExitVector {
        ExitVector::from_counts(support, counts)
    }

    #[test]
    fn nearest_neighbour_sets_are_intervals() {
        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let sets = enumerate_sc_sets(&spec, EnumerationBudget::diameter(3)).unwrap();
        assert_eq!(
            sets,
            vec![set(&[0, 1]), set(&[0, 1, 2]), set(&[0, 1, 2, 3])]
        );
    }

    #[test]
    fn enumeration_matches_exhaustive_check() {
        // Every canonical subset with max <= 7, filtered by the petgraph route.
        let spec = GraphSpec::new(2, 3, [-2, -1, 3]).unwrap();
        let mut expected = Vec::new();
        for max in 0..=7u32 {
            for interior in 0..(1u64 << max.saturating_sub(1)) {
                let mask = if max == 0 {
                    1
                } else {
                    1 | interior << 1 | 1 << max
                };
                let s = VertexSet::from_mask(mask).unwrap();
                if spec.is_strongly_connected(&s) {
                    expected.push(s);
                }
            }
        }
        expected.sort_by(|a, b| a.enumeration_cmp(b));
        assert_eq!(
            enumerate_sc_sets(&spec, EnumerationBudget::diameter(7)).unwrap(),
            expected
        );
    }

    #[test]
    fn contains_both_example_two_sets() {
        let spec = GraphSpec::new(2, 3, [-2, 3]).unwrap();
        let sets = enumerate_sc_sets(&spec, EnumerationBudget::diameter(6)).unwrap();
        assert!(sets.contains(&set(&[0, 2, 3, 4, 6])));
        assert!(sets.contains(&set(&[0, 1, 2, 3, 4])));
    }

    #[test]
    fn zero_diameter_without_self_loop_is_empty() {
        let spec = GraphSpec::new(2, 3, [-2, 3]).unwrap();
        assert!(enumerate_sc_sets(&spec, EnumerationBudget::diameter(0))
            .unwrap()
            .is_empty());
        let looped = GraphSpec::new(2, 3, [-2, 0, 3]).unwrap();
        assert_eq!(
            enumerate_sc_sets(&looped, EnumerationBudget::diameter(0)).unwrap(),
            vec![set(&[0])]
        );
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let budget = EnumerationBudget {
            max_diameter: 10,
            max_sets: Some(4),
        };
        assert!(matches!(
            for_each_sc_set(&spec, budget, |_| {}),
            Err(Error::BudgetExhausted(4))
        ));
        assert!(oracle_pareto(&spec, budget).is_err());
        assert!(matches!(
            enumerate_sc_sets(&spec, EnumerationBudget::diameter(64)),
            Err(Error::DiameterTooLarge(64))
        ));
    }

    #[test]
    fn oracle_values() {
        let spec = GraphSpec::new(6, 3, [-6, 2, 3]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-6, 1, 1), (2, 1, 1), (3, 1, 1)]).unwrap();
        let r = oracle_kappa0(&spec, &w, EnumerationBudget::diameter(16)).unwrap();
        assert_eq!(r.value, BigRational::from_integer(6.into()));
        assert_eq!(r.witness, set(&[0, 3, 6]));

        let spec = GraphSpec::new(2, 2, [-2, 1, 2]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-2, 1, 9), (1, 1, 2), (2, 1, 9)]).unwrap();
        let r = oracle_kappa0(&spec, &w, EnumerationBudget::diameter(8)).unwrap();
        assert_eq!(r.value, BigRational::new(17.into(), 18.into()));
        assert_eq!(r.witness, set(&[0, 1, 2]));
    }

    #[test]
    fn oracle_empty_family() {
        let spec = GraphSpec::new(2, 3, [-2, 3]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-2, 1, 1), (3, 1, 1)]).unwrap();
        assert!(matches!(
            oracle_kappa0(&spec, &w, EnumerationBudget::diameter(2)),
            Err(Error::EmptyFamily(2))
        ));
    }

    #[test]
    fn minimal_filter_cases() {
        let s2 = [0, 1];
        let got = minimal_filter(&[v(&s2, &[1, 2]), v(&s2, &[2, 1]), v(&s2, &[2, 2])]);
        assert_eq!(got, vec![v(&s2, &[1, 2]), v(&s2, &[2, 1])]);

        let s1 = [0];
        assert_eq!(minimal_filter(&[v(&s1, &[3])]), vec![v(&s1, &[3])]);

        let s4 = [-2, -1, 1, 2];
        let got = minimal_filter(&[
            v(&s4, &[2, 1, 1, 2]),
            v(&s4, &[1, 2, 2, 1]),
            v(&s4, &[2, 2, 2, 2]),
        ]);
        assert_eq!(got, vec![v(&s4, &[1, 2, 2, 1]), v(&s4, &[2, 1, 1, 2])]);
        assert_eq!(minimal_filter(&got), got);
    }

    #[test]
    fn pareto_fronts() {
        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let front = oracle_pareto(&spec, EnumerationBudget::diameter(6)).unwrap();
        assert_eq!(front.entries().len(), 1);
        assert_eq!(front.entries()[0].vector, v(&[-1, 1], &[1, 1]));
        assert_eq!(front.entries()[0].witness, set(&[0, 1]));

        let spec = GraphSpec::new(2, 2, [-2, 1, 2]).unwrap();
        let front = oracle_pareto(&spec, EnumerationBudget::diameter(10)).unwrap();
        let got: Vec<_> = front
            .entries()
            .iter()
            .map(|e| (e.vector.counts(), e.witness.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![1, 2, 1], set(&[0, 2])),
                (vec![2, 1, 2], set(&[0, 1, 2]))
            ]
        );

        let spec = GraphSpec::new(2, 2, [-2, -1, 1, 2]).unwrap();
        let front = oracle_pareto(&spec, EnumerationBudget::diameter(10)).unwrap();
        let got: Vec<_> = front
            .entries()
            .iter()
            .map(|e| (e.vector.counts(), e.witness.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![1, 2, 2, 1], set(&[0, 2])),
                (vec![2, 1, 1, 2], set(&[0, 1]))
            ]
        );
    }

    #[test]
    fn mask_exit_counts_agree_with_graph_model() {
        let spec = GraphSpec::new(3, 2, [-3, -1, 0, 2]).unwrap();
        let graph = MaskGraph::new(&spec);
        for mask in (1u64..512).filter(|m| m & 1 == 1) {
            let s = VertexSet::from_mask(mask).unwrap();
            assert_eq!(graph.exit_counts(mask), spec.exit_vector(&s).counts());
            assert_eq!(
                graph.is_strongly_connected(mask),
                spec.is_strongly_connected(&s)
            );
        }
    }

    #[test]
    fn front_insert_keeps_earliest_witness() {
        let s = [-1, 1];
        let mut front = ParetoFront::new();
        assert!(front.insert(v(&s, &[2, 2]), set(&[0, 2, 3])));
        assert!(front.insert(v(&s, &[2, 2]), set(&[0, 1, 3])));
        assert!(!front.insert(v(&s, &[2, 2]), set(&[0, 1, 2, 3, 4])));
        assert_eq!(front.entries()[0].witness, set(&[0, 1, 3]));
        assert!(!front.insert(v(&s, &[3, 2]), set(&[0, 3])));
        assert!(front.insert(v(&s, &[1, 1]), set(&[0, 1])));
        assert_eq!(front.len(), 1);
        assert!(front.is_antichain());
    }
}
