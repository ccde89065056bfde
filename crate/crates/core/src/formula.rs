//! The minimum as a closed form: `min` over finitely many integer
//! combinations of the weights.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ExitVector, VertexSet, Weights};
use crate::oracle::{minimal_filter, ParetoFront};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub vector: ExitVector,
    pub witness: Option<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFormula")]
pub struct KappaFormula {
    support: Vec<i32>,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawFormula {
    support: Vec<i32>,
    terms: Vec<Term>,
}

impl TryFrom<RawFormula> for KappaFormula {
    type Error = Error;

    fn try_from(raw: RawFormula) -> Result<Self> {
        KappaFormula::new(raw.support, raw.terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

impl KappaFormula {
    pub fn new(mut support: Vec<i32>, terms: Vec<Term>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        if terms.is_empty() {
            return Err(Error::InvalidFormula(
                "a formula needs at least one term".into(),
            ));
        }
        if let Some(t) = terms.iter().find(|t| t.vector.support() != support) {
            return Err(Error::SupportMismatch {
                weights: support,
                vector: t.vector.support(),
            });
        }
        Ok(Self { support, terms })
    }

    /// One term per front entry, witnesses included.
    pub fn from_front(support: &[i32], front: &ParetoFront) -> Result<Self> {
        let terms = front
            .entries()
            .iter()
            .map(|e| Term {
                vector: e.vector.clone(),
                witness: Some(e.witness.clone()),
            })
            .collect();
        Self::new(support.to_vec(), terms)
    }

    /// Terms without witnesses, from raw count rows in support order.
    pub fn from_counts(support: &[i32], rows: &[&[u32]]) -> Result<Self> {
        let terms = rows
            .iter()
            .map(|r| {
                if r.len() != support.len() {
                    return Err(Error::InvalidFormula(format!(
                        "row {r:?} does not match support {support:?}"
                    )));
                }
                Ok(Term {
                    vector: ExitVector::from_counts(support, r),
                    witness: None,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(support.to_vec(), terms)
    }

    pub fn support(&self) -> &[i32] {
        &self.support
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_antichain(&self) -> bool {
        self.terms.iter().enumerate().all(|(a, ta)| {
            self.terms
                .iter()
                .enumerate()
                .all(|(b, tb)| a == b || !ta.vector.le(&tb.vector))
        })
    }

    /// Minimum of `vector . alpha` over the terms.
    pub fn evaluate(&self, weights: &Weights) -> Result<BigRational> {
        Ok(self.argmin(weights)?.0)
    }

    /// The minimum and the first term attaining it.
    pub fn argmin(&self, weights: &Weights) -> Result<(BigRational, &Term)> {
        let mut best: Option<(BigRational, &Term)> = None;
        for term in &self.terms {
            let value = weights.beta(&term.vector)?;
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, term));
            }
        }
        Ok(best.expect("formula has at least one term"))
    }

    /// Drops dominated and duplicate terms, keeping the first witness seen
    /// for each surviving vector.
    pub fn simplify(&self) -> Self {
        let vectors: Vec<ExitVector> = self.terms.iter().map(|t| t.vector.clone()).collect();
        let terms = minimal_filter(&vectors)
            .into_iter()
            .map(|v| {
                let witness = self
                    .terms
                    .iter()
                    .filter(|t| t.vector == v)
                    .find_map(|t| t.witness.clone());
                Term { vector: v, witness }
            })
            .collect();
        Self {
            support: self.support.clone(),
            terms,
        }
    }

    /// Term vectors sorted lexicographically by their counts.
    fn sorted_vectors(&self) -> Vec<Vec<u32>> {
        let mut rows: Vec<Vec<u32>> = self.terms.iter().map(|t| t.vector.counts()).collect();
        rows.sort();
        rows.dedup();
        rows
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_with("kappa0 = ", "min(", |i| format!("a({i})"), " "),
            Format::Latex => {
                self.render_with("\\kappa_0 = ", "\\min(", |i| format!("\\alpha_{{{i}}}"), "")
            }
            Format::Json => serde_json::to_string(self).expect("formula serializes"),
        }
    }

    fn render_with(
        &self,
        lhs: &str,
        open: &str,
        symbol: impl Fn(i32) -> String,
        coeff_sep: &str,
    ) -> String {
        let rows = self.sorted_vectors();
        let combos: Vec<String> = rows
            .iter()
            .map(|row| {
                let parts: Vec<String> = self
                    .support
                    .iter()
                    .zip(row)
                    .filter(|(_, &n)| n > 0)
                    .map(|(&i, &n)| match n {
                        1 => symbol(i),
                        n => format!("{n}{coeff_sep}{}", symbol(i)),
                    })
                    .collect();
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join(" + ")
                }
            })
            .collect();
        let mut out = String::from(lhs);
        if combos.len() == 1 {
            out.push_str(&combos[0]);
        } else {
            let _ = write!(out, "{open}{})", combos.join(", "));
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// True if both formulas have the same minimum for every positive weight
    /// assignment, established exactly: every term of each side is shadowed
    /// by the other side. `None` when some term is neither dominated nor
    /// shadowed by a pair, in which case the question is left open.
    pub fn equivalent(&self, other: &Self) -> Option<bool> {
        if self.support != other.support {
            return Some(false);
        }
        let covered = |a: &Self, b: &Self| {
            a.terms
                .iter()
                .all(|t| shadowed(&t.vector.counts(), &b.vectors()))
        };
        if covered(self, other) && covered(other, self) {
            Some(true)
        } else {
            None
        }
    }

    fn vectors(&self) -> Vec<Vec<u32>> {
        self.terms.iter().map(|t| t.vector.counts()).collect()
    }
}

/// Whether some term or some convex combination of two terms is
/// componentwise `<=` `target`. Then `target . alpha` is never below the
/// minimum over `terms`, for any nonnegative weights.
pub fn shadowed(target: &[u32], terms: &[Vec<u32>]) -> bool {
    for (k, a) in terms.iter().enumerate() {
        if a.iter().zip(target).all(|(x, y)| x <= y) {
            return true;
        }
        for b in &terms[k + 1..] {
            if mixture_below(a, b, target) {
                return true;
            }
        }
    }
    false
}

/// Searches `lambda` in `[0, 1]` with `lambda a + (1 - lambda) b <= c`.
fn mixture_below(a: &[u32], b: &[u32], c: &[u32]) -> bool {
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    for ((&a, &b), &c) in a.iter().zip(b).zip(c) {
        let d = i64::from(a) - i64::from(b);
        let r = i64::from(c) - i64::from(b);
        let bound = || BigRational::new(r.into(), d.into());
        match d.signum() {
            0 if r < 0 => return false,
            0 => {}
            1 => hi = hi.min(bound()),
            _ => lo = lo.max(bound()),
        }
    }
    lo <= hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ones(spec: &GraphSpec) -> Weights {
        let ratios: Vec<(i32, i64, i64)> = spec.support().iter().map(|&i| (i, 1, 1)).collect();
        Weights::from_ratios(spec, &ratios).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let spec = GraphSpec::new(2, 2, [-2, -1, 1, 2]).unwrap();
        let f = KappaFormula::from_counts(spec.support(), &[&[2, 1, 1, 2], &[1, 2, 2, 1]]).unwrap();
        assert_eq!(f.evaluate(&ones(&spec)).unwrap(), q(6, 1));

        let spec = GraphSpec::new(6, 3, [-6, 2, 3]).unwrap();
        let f = KappaFormula::from_counts(spec.support(), &[&[2, 3, 1], &[3, 1, 4]]).unwrap();
        assert_eq!(f.evaluate(&ones(&spec)).unwrap(), q(6, 1));

        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let f = KappaFormula::from_counts(spec.support(), &[&[1, 1]]).unwrap();
        let w = Weights::from_ratios(&spec, &[(-1, 2, 7), (1, 3, 5)]).unwrap();
        assert_eq!(f.evaluate(&w).unwrap(), q(2, 7) + q(3, 5));
    }

    #[test]
    fn evaluate_rejects_other_support() {
        let spec = GraphSpec::new(1, 1, [-1, 1]).unwrap();
        let f = KappaFormula::from_counts(spec.support(), &[&[1, 1]]).unwrap();
        let other = GraphSpec::new(2, 1, [-2, 1]).unwrap();
        assert!(matches!(
            f.evaluate(&ones(&other)),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn simplify_drops_dominated() {
        let support = [-2, -1, 1, 2];
        let f = KappaFormula::from_counts(&support, &[&[2, 1, 1, 2], &[1, 2, 2, 1], &[2, 2, 2, 2]])
            .unwrap();
        assert!(!f.is_antichain());
        let s = f.simplify();
        assert_eq!(s.terms().len(), 2);
        assert!(s.is_antichain());
        assert_eq!(s.simplify(), s);
    }

    #[test]
    fn three_incomparable_terms_survive_simplify() {
        let f =
            KappaFormula::from_counts(&[-6, 2, 3], &[&[2, 3, 1], &[3, 1, 4], &[4, 2, 3]]).unwrap();
        assert_eq!(f.simplify().terms().len(), 3);
        // but the last one sits above the midpoint of the first two
        assert!(shadowed(&[4, 2, 3], &[vec![2, 3, 1], vec![3, 1, 4]]));
    }

    #[test]
    fn render_text() {
        let f = KappaFormula::from_counts(&[-1, 1], &[&[1, 1]]).unwrap();
        assert_eq!(f.render(Format::Text), "kappa0 = a(-1) + a(1)");
        let f = KappaFormula::from_counts(&[-2, 1, 2], &[&[2, 1, 2], &[1, 2, 1]]).unwrap();
        assert_eq!(
            f.render(Format::Text),
            "kappa0 = min(a(-2) + 2 a(1) + a(2), 2 a(-2) + a(1) + 2 a(2))"
        );
        assert_eq!(
            f.render(Format::Latex),
            "\\kappa_0 = \\min(\\alpha_{-2} + 2\\alpha_{1} + \\alpha_{2}, 2\\alpha_{-2} + \\alpha_{1} + 2\\alpha_{2})"
        );
    }

    #[test]
    fn zero_counts_are_omitted() {
        let f = KappaFormula::from_counts(&[-2, 0, 3], &[&[1, 0, 1]]).unwrap();
        assert_eq!(f.render(Format::Text), "kappa0 = a(-2) + a(3)");
    }

    #[test]
    fn json_round_trip() {
        let mut front = ParetoFront::new();
        front.insert(
            ExitVector::from_counts(&[-2, 1, 2], &[1, 2, 1]),
            VertexSet::new([0, 2]).unwrap(),
        );
        front.insert(
            ExitVector::from_counts(&[-2, 1, 2], &[2, 1, 2]),
            VertexSet::new([0, 1, 2]).unwrap(),
        );
        let f = KappaFormula::from_front(&[-2, 1, 2], &front).unwrap();
        let json = f.render(Format::Json);
        assert_eq!(
            json,
            r#"{"support":[-2,1,2],"terms":[{"vector":{"-2":1,"1":2,"2":1},"witness":[0,2]},{"vector":{"-2":2,"1":1,"2":2},"witness":[0,1,2]}]}"#
        );
        assert_eq!(KappaFormula::from_json(&json).unwrap(), f);
        let bare = KappaFormula::from_counts(&[-1, 1], &[&[1, 1]]).unwrap();
        assert_eq!(
            KappaFormula::from_json(&bare.render(Format::Json)).unwrap(),
            bare
        );
    }

    #[test]
    fn json_rejects_empty_and_mismatched() {
        assert!(KappaFormula::from_json(r#"{"support":[-1,1],"terms":[]}"#).is_err());
        assert!(KappaFormula::from_json(
            r#"{"support":[-1,1],"terms":[{"vector":{"-1":1,"2":1},"witness":null}]}"#
        )
        .is_err());
    }

    #[test]
    fn unknown_format() {
        assert!(matches!(
            "yaml".parse::<Format>(),
            Err(Error::UnknownFormat(_))
        ));
        assert_eq!("latex".parse::<Format>().unwrap(), Format::Latex);
    }

    #[test]
    fn equivalence_through_shadowing() {
        let support = [-6, 2, 3];
        let stated = KappaFormula::from_counts(&support, &[&[2, 3, 1], &[3, 1, 4]]).unwrap();
        let front =
            KappaFormula::from_counts(&support, &[&[2, 3, 1], &[3, 1, 4], &[4, 2, 3]]).unwrap();
        assert_eq!(stated.equivalent(&front), Some(true));
        let other = KappaFormula::from_counts(&support, &[&[2, 3, 1]]).unwrap();
        assert_eq!(other.equivalent(&front), None);
    }
}
