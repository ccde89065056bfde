//! Multi-objective label correcting: the full Pareto front of exit vectors.
//!
//! Each frontier state keeps an antichain of accrued count vectors. A label
//! survives only if no label already stored at its state is `<=` it, so the
//! labels ever accepted at one state form a sequence in which no element is
//! `<=` a later one. Dickson's lemma makes every such sequence finite, which
//! is what guarantees termination without any diameter bound.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{Charge, Frontier, FrontierState, ScanBits, SolverConfig};
use crate::error::Result;
use crate::graph::{ExitVector, GraphSpec, VertexSet};
use crate::oracle::ParetoFront;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSolution {
    pub front: ParetoFront,
    /// False when the state budget stopped the search early; the front is
    /// then built from the labels explored so far.
    pub exact: bool,
    pub states_explored: usize,
    /// Distinct frontier states touched.
    pub distinct_states: usize,
}

struct Label {
    counts: Charge,
    path: ScanBits,
    alive: bool,
}

fn le(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn add(a: &Charge, b: &Charge) -> Charge {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

struct Store<'a> {
    support: &'a [i32],
    ids: HashMap<FrontierState, u32>,
    states: Vec<FrontierState>,
    labels: Vec<Vec<Label>>,
    /// (total count, path) ordered min-first, then state id and label slot.
    queue: BinaryHeap<Reverse<(u64, PathKey, u32, u32)>>,
    /// Final vectors found so far, as (counts, path).
    finals: Vec<(Charge, ScanBits)>,
}

/// Heap key wrapper ordering paths by scan order.
#[derive(Clone, PartialEq, Eq)]
struct PathKey(ScanBits);

impl Ord for PathKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.scan_cmp(&other.0)
    }
}

impl PartialOrd for PathKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Store<'_> {
    fn covered_by_final(&self, counts: &[u32]) -> bool {
        self.finals.iter().any(|(f, _)| le(f, counts))
    }

    fn push(&mut self, state: FrontierState, counts: Charge, path: ScanBits) {
        // Closing adds a positive rightward charge, so a completion of a label
        // that a final vector covers is strictly dominated.
        if self.covered_by_final(&counts) {
            return;
        }
        let next_id = self.states.len() as u32;
        let id = *self.ids.entry(state.clone()).or_insert(next_id);
        if id == next_id {
            self.states.push(state);
            self.labels.push(Vec::new());
        }
        let slots = &mut self.labels[id as usize];
        for slot in slots.iter_mut().filter(|l| l.alive) {
            if le(&slot.counts, &counts) {
                if slot.counts == counts && path.scan_cmp(&slot.path).is_lt() {
                    slot.alive = false;
                    continue;
                }
                return;
            }
        }
        for slot in slots.iter_mut().filter(|l| l.alive) {
            if le(&counts, &slot.counts) {
                slot.alive = false;
            }
        }
        let total = counts.iter().map(|&c| c as u64).sum();
        slots.push(Label {
            counts,
            path: path.clone(),
            alive: true,
        });
        let slot = (slots.len() - 1) as u32;
        self.queue.push(Reverse((total, PathKey(path), id, slot)));
    }

    fn record_final(&mut self, counts: Charge, path: ScanBits) {
        for (f, p) in &mut self.finals {
            if le(f, &counts) {
                if *f == counts && path.scan_cmp(p).is_lt() {
                    *p = path;
                }
                return;
            }
        }
        self.finals.retain(|(f, _)| !le(&counts, f));
        self.finals.push((counts, path));
    }

    fn front(&self) -> ParetoFront {
        let mut front = ParetoFront::new();
        for (counts, path) in &self.finals {
            let witness = VertexSet::new(path.members()).expect("nonempty");
            front.insert(ExitVector::from_counts(self.support, counts), witness);
        }
        front
    }
}

/// Every Pareto-minimal exit vector realized by a finite strongly connected
/// set, each with the first witness in (maximum, member list) order.
pub fn solve_symbolic(spec: &GraphSpec, config: SolverConfig) -> Result<SymbolicSolution> {
    let frontier = Frontier::new(spec)?;
    let mut store = Store {
        support: spec.support(),
        ids: HashMap::new(),
        states: Vec::new(),
        labels: Vec::new(),
        queue: BinaryHeap::new(),
        finals: Vec::new(),
    };
    let (start, charge) = frontier.start();
    store.push(start, charge, ScanBits::default().push(true));

    let mut expanded = 0usize;
    let mut exact = true;
    while let Some(Reverse((_, _, id, slot))) = store.queue.pop() {
        let label = &store.labels[id as usize][slot as usize];
        if !label.alive || store.covered_by_final(&label.counts) {
            continue;
        }
        if expanded >= config.max_states {
            exact = false;
            break;
        }
        expanded += 1;
        let counts = label.counts.clone();
        let path = label.path.clone();
        let state = store.states[id as usize].clone();

        if let Some(charge) = frontier.close(&state) {
            store.record_final(add(&counts, &charge), path.clone());
        }
        if let Some((next, charge)) = frontier.include(&state) {
            store.push(next, add(&counts, &charge), path.push(true));
        }
        if let Some((next, charge)) = frontier.exclude(&state) {
            store.push(next, add(&counts, &charge), path.push(false));
        }
    }

    Ok(SymbolicSolution {
        front: store.front(),
        exact,
        states_explored: expanded,
        distinct_states: store.states.len(),
    })
}
