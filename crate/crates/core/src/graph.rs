//! The shift-invariant weighted digraph on the integers.
//!
//! Vertex `x` has an edge to `x + i` exactly when `i` lies in the support, a
//! subset of `-L..=R` that contains both `-L` and `R`. Every edge with offset
//! `i` carries the same weight `alpha_i`. Exit weights of finite vertex sets
//! are integer combinations of these weights, and this module computes the
//! combination (the exit vector) as well as its value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

/// Underlying digraph: jump bounds and the set of offsets carrying an edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphSpec {
    left: u32,
    right: u32,
    support: Vec<i32>,
}

impl GraphSpec {
    pub fn new(left: u32, right: u32, support: impl IntoIterator<Item = i32>) -> Result<Self> {
        if left == 0 || right == 0 {
            return Err(Error::InvalidSpec("L and R must be positive".into()));
        }
        let support: BTreeSet<i32> = support.into_iter().collect();
        let (lo, hi) = (-(left as i64), right as i64);
        if let Some(&bad) = support
            .iter()
            .find(|&&i| (i as i64) < lo || (i as i64) > hi)
        {
            return Err(Error::InvalidSpec(format!(
                "offset {bad} lies outside [-{left}, {right}]"
            )));
        }
        if !support.contains(&-(left as i32)) || !support.contains(&(right as i32)) {
            return Err(Error::InvalidSpec(format!(
                "support must contain both -{left} and {right}"
            )));
        }
        Ok(Self {
            left,
            right,
            support: support.into_iter().collect(),
        })
    }

    pub fn left(&self) -> u32 {
        self.left
    }

    pub fn right(&self) -> u32 {
        self.right
    }

    /// Offsets with an edge, ascending.
    pub fn support(&self) -> &[i32] {
        &self.support
    }

    pub fn contains(&self, offset: i32) -> bool {
        self.support.binary_search(&offset).is_ok()
    }

    pub fn index_of(&self, offset: i32) -> Option<usize> {
        self.support.binary_search(&offset).ok()
    }

    pub fn has_self_loop(&self) -> bool {
        self.contains(0)
    }

    /// `max(L, R)`: no edge spans more positions than this.
    pub fn window(&self) -> usize {
        self.left.max(self.right) as usize
    }

    /// Counts `x_i = #{z in S : z + i not in S}` for every offset in the support.
    pub fn exit_vector(&self, set: &VertexSet) -> ExitVector {
        let members: BTreeSet<i64> = set.iter().collect();
        let counts = self
            .support
            .iter()
            .map(|&i| {
                let n = members
                    .iter()
                    .filter(|&&z| !members.contains(&(z + i as i64)))
                    .count();
                (i, n as u32)
            })
            .collect();
        ExitVector { counts }
    }

    /// Every ordered pair of members, including a vertex with itself, is
    /// joined by a nonempty path inside the set.
    pub fn is_strongly_connected(&self, set: &VertexSet) -> bool {
        if set.len() == 1 {
            return self.has_self_loop();
        }
        let mut graph = DiGraph::<i64, ()>::new();
        let nodes: BTreeMap<i64, _> = set.iter().map(|z| (z, graph.add_node(z))).collect();
        for (&z, &from) in &nodes {
            for &i in self.support.iter().filter(|&&i| i != 0) {
                if let Some(&to) = nodes.get(&(z + i as i64)) {
                    graph.add_edge(from, to, ());
                }
            }
        }
        tarjan_scc(&graph).len() == 1
    }
}

/// Strictly positive weight per support offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights {
    alpha: BTreeMap<i32, BigRational>,
}

impl Weights {
    pub fn new(spec: &GraphSpec, alpha: BTreeMap<i32, BigRational>) -> Result<Self> {
        let keys: Vec<i32> = alpha.keys().copied().collect();
        if keys != spec.support() {
            return Err(Error::InvalidWeights(format!(
                "weights are given for {keys:?} but the support is {:?}",
                spec.support()
            )));
        }
        if let Some((i, v)) = alpha.iter().find(|(_, v)| !v.is_positive()) {
            return Err(Error::InvalidWeights(format!(
                "alpha({i}) = {} is not positive",
                format_rational(v)
            )));
        }
        Ok(Self { alpha })
    }

    /// Convenience constructor from `(offset, numerator, denominator)` triples.
    pub fn from_ratios(spec: &GraphSpec, ratios: &[(i32, i64, i64)]) -> Result<Self> {
        let alpha = ratios
            .iter()
            .map(|&(i, n, d)| {
                if d == 0 {
                    return Err(Error::InvalidWeights(format!(
                        "alpha({i}) has zero denominator"
                    )));
                }
                Ok((i, BigRational::new(n.into(), d.into())))
            })
            .collect::<Result<_>>()?;
        Self::new(spec, alpha)
    }

    pub fn get(&self, offset: i32) -> Option<&BigRational> {
        self.alpha.get(&offset)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &BigRational)> {
        self.alpha.iter().map(|(&i, v)| (i, v))
    }

    /// Values in ascending offset order, matching [`GraphSpec::support`].
    pub fn values(&self) -> impl Iterator<Item = &BigRational> {
        self.alpha.values()
    }

    pub fn support(&self) -> Vec<i32> {
        self.alpha.keys().copied().collect()
    }

    /// Exit weight `sum_i x_i * alpha_i`.
    pub fn beta(&self, x: &ExitVector) -> Result<BigRational> {
        if !self.alpha.keys().eq(x.counts.keys()) {
            return Err(Error::SupportMismatch {
                weights: self.support(),
                vector: x.support(),
            });
        }
        Ok(self
            .alpha
            .iter()
            .zip(x.counts.values())
            .map(|((_, a), &n)| a * BigRational::from_integer(n.into()))
            .fold(BigRational::zero(), |acc, t| acc + t))
    }

    pub fn half_sums(&self) -> HalfSums {
        let mut sums = HalfSums::default();
        for (&i, a) in &self.alpha {
            let scaled = a * BigRational::from_integer(i.abs().into());
            if i > 0 {
                sums.c_plus += a;
                sums.d_plus += scaled;
            } else if i < 0 {
                sums.c_minus += a;
                sums.d_minus += scaled;
            }
        }
        sums
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.alpha.values().map(crate::rational::to_f64).collect()
    }
}

/// `c±` are the total weights of rightward / leftward offsets; `d±` weight
/// each offset by its length, which is the exit weight of a long interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSums {
    pub c_plus: BigRational,
    pub c_minus: BigRational,
    pub d_plus: BigRational,
    pub d_minus: BigRational,
}

impl Default for HalfSums {
    fn default() -> Self {
        Self {
            c_plus: BigRational::zero(),
            c_minus: BigRational::zero(),
            d_plus: BigRational::zero(),
            d_minus: BigRational::zero(),
        }
    }
}

impl HalfSums {
    /// `c+ + c-`, a lower bound for every exit weight of a strongly connected set.
    pub fn lower_bound(&self) -> BigRational {
        &self.c_plus + &self.c_minus
    }

    pub fn interval_weight(&self) -> BigRational {
        &self.d_plus + &self.d_minus
    }
}

/// A finite nonempty set of integers, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(Vec<i64>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = i64>) -> Result<Self> {
        let members: BTreeSet<i64> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Self(members.into_iter().collect()))
    }

    /// Members of a bitmask: bit `z` set means `z` belongs to the set.
    pub fn from_mask(mask: u64) -> Result<Self> {
        Self::new((0..64).filter(|z| mask >> z & 1 == 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    pub fn members(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> i64 {
        self.0[0]
    }

    pub fn max(&self) -> i64 {
        self.0[self.0.len() - 1]
    }

    pub fn diameter(&self) -> i64 {
        self.max() - self.min()
    }

    pub fn contains(&self, z: i64) -> bool {
        self.0.binary_search(&z).is_ok()
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self(self.0.iter().map(|z| z + by).collect())
    }

    /// Translate so the leftmost member is 0.
    pub fn canonical(&self) -> Self {
        self.shifted(-self.min())
    }

    pub fn is_canonical(&self) -> bool {
        self.min() == 0
    }

    pub fn with(&self, z: i64) -> Self {
        let mut members = self.0.clone();
        if let Err(pos) = members.binary_search(&z) {
            members.insert(pos, z);
        }
        Self(members)
    }

    /// Canonical deterministic order: by maximum, then lexicographically by
    /// the sorted member sequence. Meaningful for canonical sets.
    pub fn enumeration_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.max()
            .cmp(&other.max())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, z) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let members = Vec::<i64>::deserialize(d)?;
        VertexSet::new(members).map_err(serde::de::Error::custom)
    }
}

/// Exit counts per support offset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExitVector {
    counts: BTreeMap<i32, u32>,
}

impl ExitVector {
    pub fn from_counts(support: &[i32], counts: &[u32]) -> Self {
        assert_eq!(support.len(), counts.len(), "support/count length mismatch");
        Self {
            counts: support
                .iter()
                .copied()
                .zip(counts.iter().copied())
                .collect(),
        }
    }

    pub fn from_map(counts: BTreeMap<i32, u32>) -> Self {
        Self { counts }
    }

    pub fn get(&self, offset: i32) -> Option<u32> {
        self.counts.get(&offset).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, u32)> + '_ {
        self.counts.iter().map(|(&i, &n)| (i, n))
    }

    pub fn support(&self) -> Vec<i32> {
        self.counts.keys().copied().collect()
    }

    /// Counts in ascending offset order.
    pub fn counts(&self) -> Vec<u32> {
        self.counts.values().copied().collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&n| n as u64).sum()
    }

    /// Componentwise `<=` over a common support.
    pub fn le(&self, other: &Self) -> bool {
        self.counts.len() == other.counts.len()
            && self
                .counts
                .iter()
                .zip(&other.counts)
                .all(|((i, a), (j, b))| i == j && a <= b)
    }

    /// `self <= other` with at least one strict inequality.
    pub fn strictly_dominates(&self, other: &Self) -> bool {
        self != other && self.le(other)
    }
}

impl Serialize for ExitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.counts.len()))?;
        for (i, n) in &self.counts {
            map.serialize_entry(&i.to_string(), n)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ExitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, u32>::deserialize(d)?;
        let counts = raw
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i32>()
                    .map(|i| (i, v))
                    .map_err(|_| serde::de::Error::custom(format!("bad offset key {k:?}")))
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { counts })
    }
}

/// A graph spec as read from JSON: `{"L": 2, "R": 2, "alpha": {"-2": "1/9", ...}}`.
/// Weight values may be `null` throughout for a symbolic-only spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub spec: GraphSpec,
    pub weights: Option<Weights>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(rename = "L")]
    left: u32,
    #[serde(rename = "R")]
    right: u32,
    alpha: BTreeMap<String, serde_json::Value>,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        Self::from_value_parts(raw)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let raw: RawSpec = serde_json::from_value(value)?;
        Self::from_value_parts(raw)
    }

    fn from_value_parts(raw: RawSpec) -> Result<Self> {
        let mut alpha = BTreeMap::new();
        let mut nulls = 0;
        for (key, value) in &raw.alpha {
            let i: i32 = key
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("alpha key {key:?} is not an integer")))?;
            let weight = match value {
                serde_json::Value::Null => {
                    nulls += 1;
                    None
                }
                serde_json::Value::String(s) => Some(parse_rational(s)?),
                serde_json::Value::Number(n) => Some(parse_rational(&n.to_string())?),
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "alpha({i}) must be a number, a \"p/q\" string or null, got {other}"
                    )))
                }
            };
            alpha.insert(i, weight);
        }
        let spec = GraphSpec::new(raw.left, raw.right, alpha.keys().copied())?;
        let weights = match nulls {
            0 => Some(Weights::new(
                &spec,
                alpha
                    .into_iter()
                    .map(|(i, w)| (i, w.expect("no nulls")))
                    .collect(),
            )?),
            n if n == alpha.len() => None,
            _ => {
                return Err(Error::InvalidSpec(
                    "either every weight or no weight may be null".into(),
                ))
            }
        };
        Ok(Self { spec, weights })
    }

    pub fn to_json(&self) -> String {
        let alpha = self
            .spec
            .support()
            .iter()
            .map(|&i| {
                let value = match &self.weights {
                    Some(w) => {
                        serde_json::Value::String(format_rational(w.get(i).expect("support")))
                    }
                    None => serde_json::Value::Null,
                };
                (i.to_string(), value)
            })
            .collect();
        let raw = RawSpec {
            left: self.spec.left,
            right: self.spec.right,
            alpha,
        };
        serde_json::to_string(&raw).expect("spec serializes")
    }
}
