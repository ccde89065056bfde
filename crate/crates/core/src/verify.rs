//! Golden catalog of worked examples and the checks run against it.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formula::{shadowed, KappaFormula};
use crate::frontier::{solve_numeric, solve_symbolic, SolverConfig};
use crate::graph::{ExitVector, GraphSpec, VertexSet, Weights};
use crate::oracle::{exit_vector_census, oracle_kappa0, EnumerationBudget};
use crate::rational::{format_rational, parse_rational};

/// The catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = include_str!("../golden/examples.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub seed: u64,
    pub cases: Vec<Case>,
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_CATALOG).expect("bundled catalog parses")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    #[serde(rename = "L")]
    pub left: u32,
    #[serde(rename = "R")]
    pub right: u32,
    pub support: Vec<i32>,
    /// Expected min formula; rows of counts in ascending support order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<FormulaCheck>,
    /// Sets expected to be strongly connected with the given exit counts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub numeric: Vec<NumericCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<BetaCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set_minimum: Option<SetMinimumCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims: Option<ClaimsCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaCheck {
    pub terms: Vec<Vec<u32>>,
    /// Random weight draws on which the numeric solver must match.
    pub draws: usize,
    /// `"lower_bound"` (c+ + c-) or `"interval"` (d+ + d-), if the minimum
    /// is also expected to equal that closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessCheck {
    pub set: Vec<i64>,
    pub vector: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericCheck {
    pub alpha: BTreeMap<String, String>,
    pub kappa0: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
    /// Also run the brute-force oracle at this diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_diameter: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaCheck {
    pub alpha: BTreeMap<String, String>,
    pub set: Vec<i64>,
    pub value: String,
}

/// The minimum equals the smallest exit weight among a few named sets, for
/// random weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetMinimumCheck {
    pub sets: Vec<Vec<i64>>,
    pub draws: usize,
    /// Oracle diameter used for draws on which the solver runs out of budget.
    pub fallback_diameter: u32,
}

/// The exit-count claims for the `{-16, 2, 5}` graph, checked over every
/// strongly connected set up to `diameter`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimsCheck {
    pub diameter: u32,
    /// Weight draws for the final claim.
    pub draws: usize,
    /// Sets whose exit weights bound every other set's from below.
    pub sets: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyConfig {
    pub solver: SolverConfig,
}

/// Runs every case (or just `only`) and reports per check.
pub fn verify_catalog(
    catalog: &Catalog,
    only: Option<&str>,
    config: VerifyConfig,
) -> Vec<CaseReport> {
    catalog
        .cases
        .iter()
        .filter(|c| only.is_none_or(|name| c.name == name))
        .map(|c| verify_case(c, catalog.seed, config))
        .collect()
}

pub fn verify_case(case: &Case, seed: u64, config: VerifyConfig) -> CaseReport {
    let mut checks = Vec::new();
    let spec = match GraphSpec::new(case.left, case.right, case.support.iter().copied()) {
        Ok(spec) => spec,
        Err(e) => {
            checks.push(Check::new("spec", false, e.to_string()));
            return CaseReport {
                name: case.name.clone(),
                checks,
                note: case.note.clone(),
            };
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(&case.name));
    for w in &case.witnesses {
        checks.push(check_witness(&spec, w));
    }
    for b in &case.beta {
        checks.push(check_beta(&spec, b));
    }
    for n in &case.numeric {
        checks.extend(check_numeric(&spec, n, config));
    }
    if let Some(f) = &case.formula {
        checks.extend(check_formula(&spec, f, &mut rng, config));
    }
    if let Some(m) = &case.set_minimum {
        checks.push(check_set_minimum(&spec, m, &mut rng, config));
    }
    if let Some(c) = &case.claims {
        checks.extend(check_claims(&spec, c, &mut rng));
    }
    CaseReport {
        name: case.name.clone(),
        checks,
        note: case.note.clone(),
    }
}

fn fnv(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}

/// Positive weights `p/q` with `p, q` drawn uniformly from `1..=40`.
pub fn random_weights(spec: &GraphSpec, rng: &mut impl Rng) -> Weights {
    let alpha = spec
        .support()
        .iter()
        .map(|&i| {
            let p: i64 = rng.random_range(1..=40);
            let q: i64 = rng.random_range(1..=40);
            (i, BigRational::new(p.into(), q.into()))
        })
        .collect();
    Weights::new(spec, alpha).expect("positive weights on the support")
}

fn parse_alpha(spec: &GraphSpec, alpha: &BTreeMap<String, String>) -> Result<Weights> {
    let map = alpha
        .iter()
        .map(|(k, v)| {
            let i = k
                .trim()
                .parse::<i32>()
                .map_err(|_| crate::Error::InvalidWeights(format!("bad offset {k:?}")))?;
            Ok((i, parse_rational(v)?))
        })
        .collect::<Result<_>>()?;
    Weights::new(spec, map)
}

fn set_of(members: &[i64]) -> Result<VertexSet> {
    VertexSet::new(members.iter().copied())
}

fn show_set(members: &[i64]) -> String {
    set_of(members)
        .map(|s| s.to_string())
        .unwrap_or_else(|_| "{}".into())
}

fn check_witness(spec: &GraphSpec, w: &WitnessCheck) -> Check {
    let name = format!("witness {}", show_set(&w.set));
    let Ok(set) = set_of(&w.set) else {
        return Check::new(name, false, "empty set");
    };
    let got = spec.exit_vector(&set).counts();
    let sc = spec.is_strongly_connected(&set);
    let passed = sc && got == w.vector;
    Check::new(
        name,
        passed,
        format!(
            "strongly connected: {sc}; exit counts {got:?}, expected {:?}",
            w.vector
        ),
    )
}

fn check_beta(spec: &GraphSpec, b: &BetaCheck) -> Check {
    let name = format!("beta {}", show_set(&b.set));
    let result = (|| {
        let weights = parse_alpha(spec, &b.alpha)?;
        let value = weights.beta(&spec.exit_vector(&set_of(&b.set)?))?;
        Ok::<_, crate::Error>(format_rational(&value))
    })();
    match result {
        Ok(got) => Check::new(
            &name,
            got == b.value,
            format!("got {got}, expected {}", b.value),
        ),
        Err(e) => Check::new(&name, false, e.to_string()),
    }
}

fn check_numeric(spec: &GraphSpec, n: &NumericCheck, config: VerifyConfig) -> Vec<Check> {
    let weights = match parse_alpha(spec, &n.alpha) {
        Ok(w) => w,
        Err(e) => return vec![Check::new("numeric", false, e.to_string())],
    };
    let mut checks = Vec::new();
    match solve_numeric(spec, &weights, config.solver) {
        Ok(sol) => {
            let got = sol.kappa0.as_ref().map(format_rational).unwrap_or_default();
            let witness = sol
                .witness
                .as_ref()
                .map(|w| w.to_string())
                .unwrap_or_default();
            let witness_ok = n.witness.as_ref().is_none_or(|w| {
                sol.witness
                    .as_ref()
                    .is_some_and(|s| s.members() == w.as_slice())
            });
            let mut detail = format!("kappa0 {got} at {witness}, expected {}", n.kappa0);
            if let Some(w) = &n.witness {
                detail.push_str(&format!(" at {}", show_set(w)));
            }
            if !sol.exact {
                detail.push_str(" (state budget exhausted)");
            }
            checks.push(Check::new(
                "numeric",
                sol.exact && got == n.kappa0 && witness_ok,
                detail,
            ));
        }
        Err(e) => checks.push(Check::new("numeric", false, e.to_string())),
    }
    if let Some(d) = n.oracle_diameter {
        let name = format!("oracle D={d}");
        match oracle_kappa0(spec, &weights, EnumerationBudget::diameter(d)) {
            Ok(o) => {
                let got = format_rational(&o.value);
                checks.push(Check::new(
                    name,
                    got == n.kappa0,
                    format!("oracle {got} at {}, expected {}", o.witness, n.kappa0),
                ));
            }
            Err(e) => checks.push(Check::new(name, false, e.to_string())),
        }
    }
    checks
}

fn check_formula(
    spec: &GraphSpec,
    f: &FormulaCheck,
    rng: &mut ChaCha8Rng,
    config: VerifyConfig,
) -> Vec<Check> {
    let mut checks = Vec::new();
    let rows: Vec<&[u32]> = f.terms.iter().map(|r| r.as_slice()).collect();
    let expected = match KappaFormula::from_counts(spec.support(), &rows) {
        Ok(e) => e,
        Err(e) => return vec![Check::new("formula", false, e.to_string())],
    };
    let sol = match solve_symbolic(spec, config.solver) {
        Ok(s) => s,
        Err(e) => return vec![Check::new("formula", false, e.to_string())],
    };
    let front: Vec<Vec<u32>> = sol
        .front
        .entries()
        .iter()
        .map(|e| e.vector.counts())
        .collect();
    let missing: Vec<&Vec<u32>> = f.terms.iter().filter(|t| !front.contains(t)).collect();
    let extras: Vec<&Vec<u32>> = front.iter().filter(|t| !f.terms.contains(t)).collect();
    let unshadowed: Vec<&&Vec<u32>> = extras.iter().filter(|t| !shadowed(t, &f.terms)).collect();
    let mut detail = format!(
        "{}; front {front:?}",
        expected.render(crate::formula::Format::Text)
    );
    if !missing.is_empty() {
        detail.push_str(&format!("; missing {missing:?}"));
    }
    if !extras.is_empty() {
        detail.push_str(&format!(
            "; {} extra term(s), {} shadowed by convex combinations",
            extras.len(),
            extras.len() - unshadowed.len()
        ));
    }
    if !sol.exact {
        detail.push_str("; state budget exhausted");
    }
    checks.push(Check::new(
        "formula",
        sol.exact && missing.is_empty() && unshadowed.is_empty(),
        detail,
    ));

    let bad_witness: Vec<String> = sol
        .front
        .entries()
        .iter()
        .filter(|e| {
            !spec.is_strongly_connected(&e.witness) || spec.exit_vector(&e.witness) != e.vector
        })
        .map(|e| e.witness.to_string())
        .collect();
    checks.push(Check::new(
        "front witnesses",
        bad_witness.is_empty(),
        if bad_witness.is_empty() {
            format!("{} witnesses replayed", sol.front.len())
        } else {
            format!("not realizing their vectors: {}", bad_witness.join(", "))
        },
    ));

    let draws: Vec<Weights> = (0..f.draws).map(|_| random_weights(spec, rng)).collect();
    let failures: Vec<String> = draws
        .par_iter()
        .filter_map(|w| {
            let want = expected.evaluate(w).ok()?;
            let got = solve_numeric(spec, w, config.solver).ok()?.kappa0?;
            let identity = match f.identity.as_deref() {
                Some("lower_bound") => Some(w.half_sums().lower_bound()),
                Some("interval") => Some(w.half_sums().interval_weight()),
                _ => None,
            };
            let ok = got == want && identity.as_ref().is_none_or(|v| *v == got);
            (!ok).then(|| {
                format!(
                    "{} vs formula {}",
                    format_rational(&got),
                    format_rational(&want)
                )
            })
        })
        .collect();
    let mut name = "formula on random weights".to_string();
    if let Some(id) = &f.identity {
        name.push_str(&format!(" (= {id})"));
    }
    checks.push(Check::new(
        name,
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} draws agree", f.draws)
        } else {
            format!(
                "{} of {} draws disagree, e.g. {}",
                failures.len(),
                f.draws,
                failures[0]
            )
        },
    ));
    checks
}

/// Outcome of comparing the minimum with the named sets on random weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMinimumOutcome {
    pub draws: usize,
    pub mismatches: Vec<String>,
    /// Draws answered by the oracle because the solver ran out of budget.
    pub fallbacks: usize,
}

pub fn compare_set_minimum(
    spec: &GraphSpec,
    sets: &[VertexSet],
    draws: &[Weights],
    fallback_diameter: u32,
    config: SolverConfig,
) -> Result<SetMinimumOutcome> {
    let vectors: Vec<ExitVector> = sets.iter().map(|s| spec.exit_vector(s)).collect();
    let results: Vec<Result<(bool, bool, String)>> = draws
        .par_iter()
        .map(|w| {
            let want = vectors
                .iter()
                .map(|v| w.beta(v))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .min()
                .expect("at least one set");
            let sol = solve_numeric(spec, w, config)?;
            let (got, fallback) = match (sol.exact, sol.kappa0) {
                (true, Some(v)) => (v, false),
                _ => (
                    oracle_kappa0(spec, w, EnumerationBudget::diameter(fallback_diameter))?.value,
                    true,
                ),
            };
            let detail = format!("{} vs {}", format_rational(&got), format_rational(&want));
            Ok((got == want, fallback, detail))
        })
        .collect();
    let mut outcome = SetMinimumOutcome {
        draws: draws.len(),
        mismatches: Vec::new(),
        fallbacks: 0,
    };
    for r in results {
        let (ok, fallback, detail) = r?;
        outcome.fallbacks += usize::from(fallback);
        if !ok {
            outcome.mismatches.push(detail);
        }
    }
    Ok(outcome)
}

fn check_set_minimum(
    spec: &GraphSpec,
    m: &SetMinimumCheck,
    rng: &mut ChaCha8Rng,
    config: VerifyConfig,
) -> Check {
    let name = "minimum over named sets";
    let sets = match m.sets.iter().map(|s| set_of(s)).collect::<Result<Vec<_>>>() {
        Ok(s) => s,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let draws: Vec<Weights> = (0..m.draws).map(|_| random_weights(spec, rng)).collect();
    match compare_set_minimum(spec, &sets, &draws, m.fallback_diameter, config.solver) {
        Ok(o) => {
            let mut detail = format!("{} draws, {} mismatches", o.draws, o.mismatches.len());
            if let Some(first) = o.mismatches.first() {
                detail.push_str(&format!(", e.g. {first}"));
            }
            if o.fallbacks > 0 {
                detail.push_str(&format!(
                    "; {} draws used the oracle at D={} after the solver budget ran out",
                    o.fallbacks, m.fallback_diameter
                ));
            }
            Check::new(name, o.mismatches.is_empty(), detail)
        }
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

/// One exit-count claim over `(x_-16, x_2, x_5)`.
pub struct Claim {
    pub label: &'static str,
    pub statement: &'static str,
    pub holds: fn(&[u32]) -> bool,
}

/// Claims 1-5 and 7 on exit counts `[x_-16, x_2, x_5]`.
pub const SIXTEEN_CLAIMS: [Claim; 6] = [
    Claim {
        label: "claim 1",
        statement: "x(-16) >= 5",
        holds: |x| x[0] >= 5,
    },
    Claim {
        label: "claim 2",
        statement: "x(2) = 1 => x(-16) >= 8 and x(5) >= 9",
        holds: |x| x[1] != 1 || (x[0] >= 8 && x[2] >= 9),
    },
    Claim {
        label: "claim 3",
        statement: "x(5) >= 3",
        holds: |x| x[2] >= 3,
    },
    Claim {
        label: "claim 4",
        statement: "x(5) = 3 => x(-16) >= 7 and x(2) >= 8",
        holds: |x| x[2] != 3 || (x[0] >= 7 && x[1] >= 8),
    },
    Claim {
        label: "claim 5",
        statement: "x(2) = 2 => x(5) >= 5",
        holds: |x| x[1] != 2 || x[2] >= 5,
    },
    Claim {
        label: "claim 7",
        statement: "x(2) = 2 => x(5) + x(-16) >= 17 and x(-16) >= 9",
        holds: |x| x[1] != 2 || (x[0] + x[2] >= 17 && x[0] >= 9),
    },
];

fn check_claims(spec: &GraphSpec, c: &ClaimsCheck, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let census = match exit_vector_census(spec, EnumerationBudget::diameter(c.diameter)) {
        Ok(census) => census,
        Err(e) => return vec![Check::new("claims", false, e.to_string())],
    };
    let mut checks: Vec<Check> = SIXTEEN_CLAIMS
        .iter()
        .map(|claim| {
            let bad: Vec<String> = census
                .vectors
                .iter()
                .filter(|(x, _)| !(claim.holds)(x))
                .map(|(x, &mask)| format!("{x:?} at {}", VertexSet::from_mask(mask).expect("mask")))
                .collect();
            let detail = match bad.first() {
                None => format!(
                    "{}: holds on {} sets (D <= {})",
                    claim.statement, census.sets, c.diameter
                ),
                Some(first) => format!(
                    "{}: {} counterexample vectors, e.g. {first}",
                    claim.statement,
                    bad.len()
                ),
            };
            Check::new(claim.label, bad.is_empty(), detail)
        })
        .collect();

    let bounds: Vec<ExitVector> = match c.sets.iter().map(|s| set_of(s)).collect::<Result<Vec<_>>>()
    {
        Ok(sets) => sets.iter().map(|s| spec.exit_vector(s)).collect(),
        Err(e) => {
            checks.push(Check::new("claim 8", false, e.to_string()));
            return checks;
        }
    };
    let vectors: Vec<ExitVector> = census
        .vectors
        .keys()
        .map(|x| ExitVector::from_counts(spec.support(), x))
        .collect();
    let mut violations = 0usize;
    for _ in 0..c.draws {
        let w = random_weights(spec, rng);
        let floor = bounds
            .iter()
            .map(|v| w.beta(v).expect("same support"))
            .min()
            .expect("sets");
        if vectors
            .iter()
            .any(|v| w.beta(v).expect("same support") < floor)
        {
            violations += 1;
        }
    }
    checks.push(Check::new(
        "claim 8",
        violations == 0,
        format!(
            "beta(S) >= min over the named sets: {} of {} draws violated, over {} distinct vectors",
            violations,
            c.draws,
            vectors.len()
        ),
    ));
    checks
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        if let Some(note) = &self.note {
            writeln!(f, "  note: {note}")?;
        }
        Ok(())
    }
}
