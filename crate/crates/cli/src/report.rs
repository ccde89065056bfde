//! Output rendering for each subcommand.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use clap::ValueEnum;
use serde::Serialize;

use kappa0::formula::Format as FormulaFormat;
use kappa0::frontier::solve_numeric_f64;
use kappa0::rational::format_rational;
use kappa0::verify::CaseReport;
use kappa0::{
    oracle_kappa0, oracle_pareto, solve_numeric, solve_symbolic, EnumerationBudget, FrontEntry,
    GraphSpec, KappaFormula, SimulationReport, SolverConfig, VertexSet, Weights,
};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

/// Rendered output and process exit code.
pub struct Outcome {
    pub output: String,
    pub code: u8,
}

impl Outcome {
    fn new(output: String, exact: bool) -> Self {
        Self {
            output,
            code: if exact { 0 } else { 2 },
        }
    }
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

fn latex_number(value: &str) -> String {
    match value.split_once('/') {
        Some((p, q)) => format!("\\frac{{{p}}}{{{q}}}"),
        None => value.to_string(),
    }
}

fn text_only(format: Format, command: &str) -> Result<()> {
    if format == Format::Latex {
        bail!("{command} has no latex output");
    }
    Ok(())
}

#[derive(Serialize)]
struct BetaJson {
    set: VertexSet,
    strongly_connected: bool,
    vector: kappa0::ExitVector,
    beta: Option<String>,
}

pub fn beta(
    spec: &GraphSpec,
    weights: Option<&Weights>,
    set: &VertexSet,
    format: Format,
) -> Result<Outcome> {
    text_only(format, "beta")?;
    let vector = spec.exit_vector(set);
    let beta = weights
        .map(|w| w.beta(&vector))
        .transpose()?
        .map(|b| format_rational(&b));
    let report = BetaJson {
        set: set.clone(),
        strongly_connected: spec.is_strongly_connected(set),
        vector,
        beta,
    };
    let output = match format {
        Format::Json => json(&report),
        _ => {
            let counts: Vec<String> = report
                .vector
                .iter()
                .map(|(i, n)| format!("x({i}) = {n}"))
                .collect();
            let mut out = format!(
                "set = {}\nstrongly connected = {}\nexit counts: {}\n",
                report.set,
                report.strongly_connected,
                counts.join(", ")
            );
            if let Some(b) = &report.beta {
                let _ = writeln!(out, "beta = {b}");
            }
            out
        }
    };
    Ok(Outcome::new(output, true))
}

#[derive(Serialize, Default)]
struct SolveJson {
    mode: &'static str,
    kappa0: Option<String>,
    witness: Option<VertexSet>,
    formula: Option<String>,
    front: Option<Vec<FrontEntry>>,
    diameter_bound: Option<u32>,
    exact: bool,
    states_explored: Option<usize>,
    lower_bound: Option<String>,
    gap: Option<String>,
}

impl SolveJson {
    fn render(&self, format: Format, formula: Option<&KappaFormula>) -> String {
        match format {
            Format::Json => json(self),
            Format::Latex => {
                let mut out = String::new();
                if let Some(f) = formula {
                    let _ = writeln!(out, "{}", f.render(FormulaFormat::Latex));
                }
                if let Some(v) = &self.kappa0 {
                    let rel = if self.exact { "=" } else { "\\le" };
                    let _ = writeln!(out, "\\kappa_0 {rel} {}", latex_number(v));
                }
                out
            }
            Format::Text => self.text(formula),
        }
    }

    fn text(&self, formula: Option<&KappaFormula>) -> String {
        let mut out = String::new();
        if let Some(d) = self.diameter_bound {
            let _ = writeln!(out, "candidate results over sets of diameter <= {d}");
        }
        if let Some(f) = formula {
            let _ = writeln!(out, "{}", f.render(FormulaFormat::Text));
            for t in f.terms() {
                let counts: Vec<String> =
                    t.vector.iter().map(|(i, n)| format!("{i}:{n}")).collect();
                let witness = t
                    .witness
                    .as_ref()
                    .map(|w| w.to_string())
                    .unwrap_or_default();
                let _ = writeln!(out, "  ({}) at {witness}", counts.join(", "));
            }
        } else if self.mode != "numeric" {
            let _ = writeln!(out, "no strongly connected set found");
        }
        match (&self.kappa0, self.exact) {
            (Some(v), true) => {
                let _ = writeln!(out, "kappa0 = {v}");
            }
            (Some(v), false) => {
                let _ = writeln!(out, "kappa0 <= {v}");
            }
            (None, _) if self.mode == "numeric" => {
                let _ = writeln!(
                    out,
                    "no strongly connected set found within the state budget"
                );
            }
            (None, _) => {}
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness = {w}");
        }
        if let Some(lb) = &self.lower_bound {
            let _ = writeln!(out, "lower bound = {lb}");
        }
        if let Some(gap) = &self.gap {
            let _ = writeln!(out, "gap = {gap}");
        }
        let _ = write!(out, "exact = {}", self.exact);
        if let Some(n) = self.states_explored {
            let _ = write!(out, " ({n} states explored)");
        }
        out.push('\n');
        out
    }
}

pub fn numeric(
    spec: &GraphSpec,
    weights: &Weights,
    config: SolverConfig,
    format: Format,
) -> Result<Outcome> {
    let sol = solve_numeric(spec, weights, config)?;
    let report = SolveJson {
        mode: "numeric",
        kappa0: sol.kappa0.as_ref().map(format_rational),
        witness: sol.witness.clone(),
        exact: sol.exact,
        states_explored: Some(sol.states_explored),
        lower_bound: (!sol.exact).then(|| format_rational(&sol.lower_bound)),
        gap: sol.gap().map(|g| format_rational(&g)),
        ..SolveJson::default()
    };
    Ok(Outcome::new(report.render(format, None), sol.exact))
}

pub fn numeric_f64(
    spec: &GraphSpec,
    weights: &Weights,
    config: SolverConfig,
    format: Format,
) -> Result<Outcome> {
    let search = solve_numeric_f64(spec, &weights.to_f64(), config)?;
    let (kappa0, witness) = match search.best {
        Some((v, w)) => (Some(v.0.to_string()), Some(w)),
        None => (None, None),
    };
    let report = SolveJson {
        mode: "numeric",
        kappa0,
        witness,
        exact: search.exact,
        states_explored: Some(search.states_explored),
        lower_bound: (!search.exact).then(|| search.lower_bound.0.to_string()),
        ..SolveJson::default()
    };
    Ok(Outcome::new(report.render(format, None), search.exact))
}

fn formula_of(spec: &GraphSpec, front: &kappa0::ParetoFront) -> Option<KappaFormula> {
    (!front.is_empty())
        .then(|| KappaFormula::from_front(spec.support(), front).expect("front matches spec"))
}

pub fn symbolic(
    spec: &GraphSpec,
    weights: Option<&Weights>,
    config: SolverConfig,
    format: Format,
) -> Result<Outcome> {
    let sol = solve_symbolic(spec, config)?;
    let formula = formula_of(spec, &sol.front);
    let mut report = SolveJson {
        mode: "symbolic",
        formula: formula.as_ref().map(|f| f.render(FormulaFormat::Text)),
        front: Some(sol.front.entries().to_vec()),
        exact: sol.exact,
        states_explored: Some(sol.states_explored),
        ..SolveJson::default()
    };
    if let (Some(f), Some(w)) = (&formula, weights) {
        let (value, term) = f.argmin(w)?;
        report.kappa0 = Some(format_rational(&value));
        report.witness = term.witness.clone();
    }
    Ok(Outcome::new(
        report.render(format, formula.as_ref()),
        sol.exact,
    ))
}

/// Oracle answers only cover the diameter bound, so they are never exact.
pub fn oracle(
    spec: &GraphSpec,
    weights: Option<&Weights>,
    max_diameter: u32,
    format: Format,
) -> Result<Outcome> {
    let budget = EnumerationBudget::diameter(max_diameter);
    let front = oracle_pareto(spec, budget)?;
    let formula = formula_of(spec, &front);
    let mut report = SolveJson {
        mode: "oracle",
        formula: formula.as_ref().map(|f| f.render(FormulaFormat::Text)),
        front: Some(front.entries().to_vec()),
        diameter_bound: Some(max_diameter),
        exact: false,
        ..SolveJson::default()
    };
    if let Some(w) = weights {
        if !front.is_empty() {
            let value = oracle_kappa0(spec, w, budget)?;
            report.kappa0 = Some(format_rational(&value.value));
            report.witness = Some(value.witness);
        }
    }
    Ok(Outcome::new(report.render(format, formula.as_ref()), false))
}

#[derive(Serialize)]
struct VerificationJson<'a> {
    passed: bool,
    cases: &'a [CaseReport],
}

pub fn verification(reports: &[CaseReport], format: Format) -> Result<Outcome> {
    text_only(format, "verify-examples")?;
    let passed = reports.iter().filter(|r| r.passed()).count();
    let all = passed == reports.len();
    let output = match format {
        Format::Json => json(&VerificationJson {
            passed: all,
            cases: reports,
        }),
        _ => {
            let mut out: String = reports.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(out, "{passed} of {} cases passed", reports.len());
            out
        }
    };
    Ok(Outcome {
        output,
        code: if all { 0 } else { 1 },
    })
}

pub fn simulation(report: &SimulationReport, format: Format) -> Result<Outcome> {
    text_only(format, "simulate")?;
    let output = match format {
        Format::Json => json(report),
        _ => {
            let mut out = format!(
                "beta_S = {}\nwalks = {}, cap = {}, censored = {}\nmean visits to 0 = {}\n",
                report.beta_s, report.n_walks, report.cap, report.censored, report.mean
            );
            for (k, n) in &report.survival {
                let _ = writeln!(out, "  P(N > {k}) ~ {n}/{}", report.n_walks);
            }
            match report.slope {
                Some(s) => {
                    let _ = writeln!(out, "log-log survival slope = {s}");
                }
                None => out.push_str("log-log survival slope = undefined (too few tail samples)\n"),
            }
            out
        }
    };
    Ok(Outcome::new(output, true))
}
