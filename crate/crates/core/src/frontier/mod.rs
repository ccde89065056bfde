//! Left-to-right scan over candidate sets with a finite state abstraction.
//!
//! A canonical set is built by deciding positions `0, 1, 2, ...` in order and
//! finally closing it. Only the last `W = max(L, R)` decided positions (the
//! window) can still gain edges, so a partial set is summarized by
//!
//! * which window slots are members, and
//! * the reachability relation between window members through every
//!   member decided so far (nonempty paths, transitively closed).
//!
//! A member leaving the window must be reached from, and must reach, some
//! member still in the window; any path between it and a later vertex has to
//! pass through the window. At closing time the window members must be
//! mutually reachable. Chaining these checks along retirement order shows
//! that exactly the strongly connected sets are accepted.
//!
//! Exit edges are charged as soon as both endpoints are decided: a rightward
//! edge when its head is decided absent, a leftward edge when its tail is
//! added with the head already absent, and all still-open rightward edges at
//! closing. Charges never change afterwards, so labels grow monotonically and
//! best-first search is sound.

mod numeric;
mod symbolic;

pub use numeric::{
    lower_bound, solve_numeric, solve_numeric_f64, solve_numeric_with, Cost, NumericSolution,
    SolverConfig,
};
pub use symbolic::{solve_symbolic, SymbolicSolution};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::GraphSpec;

/// Largest supported window; one extra bit is needed while a position is added.
pub const MAX_WINDOW: usize = 62;

/// Exit counts charged by one transition, in ascending support order.
pub type Charge = SmallVec<[u32; 8]>;

/// Summary of a partially decided set.
///
/// Slot `j` of the window holds position `f - W + j`, where `f` is the
/// number of decided positions; slot `W - 1` is the most recent one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrontierState {
    members: u64,
    /// `reach[u]` has bit `v` iff window member `u` reaches member `v`.
    reach: SmallVec<[u64; 16]>,
}

impl FrontierState {
    pub fn members(&self) -> u64 {
        self.members
    }

    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reach[from] >> to & 1 == 1
    }

    pub fn is_transitively_closed(&self) -> bool {
        (0..self.reach.len()).all(|u| {
            let mut via = 0u64;
            for v in bits(self.reach[u]) {
                via |= self.reach[v];
            }
            via & !self.reach[u] == 0
        })
    }
}

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(b)
        }
    })
}

/// Transition rules for one graph.
#[derive(Debug, Clone)]
pub struct Frontier {
    width: usize,
    support_len: usize,
    /// `(support index, |i|)` for leftward offsets.
    left: Vec<(usize, usize)>,
    /// `(support index, i)` for rightward offsets.
    right: Vec<(usize, usize)>,
    self_loop: bool,
}

impl Frontier {
    pub fn new(spec: &GraphSpec) -> Result<Self> {
        let width = spec.window();
        if width > MAX_WINDOW {
            return Err(Error::WindowTooWide(width));
        }
        let support = spec.support();
        let left = support
            .iter()
            .enumerate()
            .filter(|(_, &i)| i < 0)
            .map(|(k, &i)| (k, i.unsigned_abs() as usize))
            .collect();
        let right = support
            .iter()
            .enumerate()
            .filter(|(_, &i)| i > 0)
            .map(|(k, &i)| (k, i as usize))
            .collect();
        Ok(Self {
            width,
            support_len: support.len(),
            left,
            right,
            self_loop: spec.has_self_loop(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn zero_charge(&self) -> Charge {
        SmallVec::from_elem(0, self.support_len)
    }

    /// The state after deciding position 0 as the leftmost member.
    pub fn start(&self) -> (FrontierState, Charge) {
        let empty = FrontierState {
            members: 0,
            reach: SmallVec::from_elem(0, self.width),
        };
        self.include(&empty).expect("a lone member never retires")
    }

    /// Adds the next position as a member. `None` if the set can no longer
    /// become strongly connected.
    pub fn include(&self, state: &FrontierState) -> Option<(FrontierState, Charge)> {
        let w = self.width;
        let mut charge = self.zero_charge();
        let mut out_direct = 0u64;
        let mut in_direct = 0u64;
        for &(k, d) in &self.left {
            let slot = w - d;
            if state.members >> slot & 1 == 1 {
                out_direct |= 1 << slot;
            } else {
                charge[k] += 1;
            }
        }
        for &(_, d) in &self.right {
            let slot = w - d;
            if state.members >> slot & 1 == 1 {
                in_direct |= 1 << slot;
            }
        }

        let mut reach: SmallVec<[u64; 17]> = state.reach.iter().copied().collect();
        let mut from_new = out_direct;
        for t in bits(out_direct) {
            from_new |= reach[t];
        }
        let new_bit = 1u64 << w;
        let on_cycle = self.self_loop || from_new & in_direct != 0;
        let from_new = if on_cycle {
            from_new | new_bit
        } else {
            from_new
        };
        for u in 0..w {
            if state.members >> u & 1 == 1 && (in_direct >> u & 1 == 1 || reach[u] & in_direct != 0)
            {
                reach[u] |= new_bit | from_new;
            }
        }
        reach.push(from_new);

        self.retire(state.members | new_bit, &reach)
            .map(|next| (next, charge))
    }

    /// Skips the next position.
    pub fn exclude(&self, state: &FrontierState) -> Option<(FrontierState, Charge)> {
        let w = self.width;
        let mut charge = self.zero_charge();
        for &(k, d) in &self.right {
            if state.members >> (w - d) & 1 == 1 {
                charge[k] += 1;
            }
        }
        let mut reach: SmallVec<[u64; 17]> = state.reach.iter().copied().collect();
        reach.push(0);
        self.retire(state.members, &reach)
            .map(|next| (next, charge))
    }

    /// Drops slot 0 from a `W + 1`-slot window.
    fn retire(&self, members: u64, reach: &[u64]) -> Option<FrontierState> {
        let w = self.width;
        let others = (1u64 << (w + 1)) - 2;
        if members & 1 == 1 {
            let reaches_window = reach[0] & others != 0;
            let reached = (1..=w).any(|u| members >> u & 1 == 1 && reach[u] & 1 == 1);
            if !(reaches_window && reached) {
                return None;
            }
        }
        let members = members >> 1;
        if members == 0 {
            return None;
        }
        Some(FrontierState {
            members,
            reach: reach[1..].iter().map(|r| r >> 1).collect(),
        })
    }

    /// Ends the set at the most recent position, which must be a member.
    /// Returns the charge for the rightward edges still open, or `None` if
    /// the set is not strongly connected.
    pub fn close(&self, state: &FrontierState) -> Option<Charge> {
        let w = self.width;
        if state.members >> (w - 1) & 1 == 0 {
            return None;
        }
        let strongly_connected =
            bits(state.members).all(|u| state.reach[u] & state.members == state.members);
        if !strongly_connected {
            return None;
        }
        let mut charge = self.zero_charge();
        for u in bits(state.members) {
            for &(k, d) in &self.right {
                if u + d >= w {
                    charge[k] += 1;
                }
            }
        }
        Some(charge)
    }
}

/// Set membership along a scan, first position in the most significant bit
/// of the first word. For equal lengths, a larger word sequence is the
/// lexicographically smaller member list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct ScanBits {
    words: SmallVec<[u64; 2]>,
    len: u32,
}

impl ScanBits {
    pub(crate) fn push(&self, member: bool) -> Self {
        let mut next = self.clone();
        let (word, bit) = ((self.len / 64) as usize, self.len % 64);
        if word == next.words.len() {
            next.words.push(0);
        }
        if member {
            next.words[word] |= 1u64 << (63 - bit);
        }
        next.len += 1;
        next
    }

    /// Scan order: shorter first, then lexicographically by member list.
    pub(crate) fn scan_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| other.words.cmp(&self.words))
    }

    pub(crate) fn members(&self) -> Vec<i64> {
        (0..self.len)
            .filter(|&p| self.words[(p / 64) as usize] >> (63 - p % 64) & 1 == 1)
            .map(i64::from)
            .collect()
    }
}
