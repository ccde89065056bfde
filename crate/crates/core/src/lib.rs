//! Exact computation of the minimal weight exiting a finite, strongly
//! connected set of a shift-invariant weighted digraph on the integers.
//!
//! * [`graph`]: the digraph, exit vectors and exit weights.
//! * [`oracle`]: brute-force enumeration up to a diameter bound.
//! * [`frontier`]: diameter-free exact search, numeric and Pareto.
//! * [`formula`]: the minimum as a closed-form min of integer combinations.
//! * [`verify`]: the golden catalog of worked examples.
//! * [`derrw`]: directed edge reinforced walks and their Dirichlet law.

pub mod derrw;
pub mod error;
pub mod formula;
pub mod frontier;
pub mod graph;
pub mod oracle;
pub mod rational;
pub mod verify;

pub use derrw::{
    estimate_visits, path_probability_annealed, path_probability_derrw, simulate, SimulationReport,
    VisitStats,
};
pub use error::{Error, Result};
pub use formula::{Format, KappaFormula, Term};
pub use frontier::{
    lower_bound, solve_numeric, solve_numeric_f64, solve_symbolic, FrontierState, NumericSolution,
    SolverConfig, SymbolicSolution,
};
pub use graph::{ExitVector, GraphSpec, HalfSums, SpecFile, VertexSet, Weights};
pub use oracle::{
    enumerate_sc_sets, minimal_filter, oracle_kappa0, oracle_pareto, EnumerationBudget, FrontEntry,
    OracleValue, ParetoFront,
};
