//! The min formula read off the Pareto front agrees with the numeric solver
//! on random weights, for every graph in the golden catalog.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kappa0::verify::{random_weights, Catalog};
use kappa0::{solve_numeric, solve_symbolic, GraphSpec, KappaFormula, SolverConfig};

const DRAWS: usize = 1000;

#[test]
fn front_formula_matches_numeric_minimum() {
    let catalog = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for case in &catalog.cases {
        let spec = GraphSpec::new(case.left, case.right, case.support.iter().copied()).unwrap();
        let sym = solve_symbolic(&spec, SolverConfig::default()).unwrap();
        assert!(sym.exact, "{}", case.name);
        let formula = KappaFormula::from_front(spec.support(), &sym.front).unwrap();
        assert!(formula.is_antichain());
        for _ in 0..DRAWS {
            let w = random_weights(&spec, &mut rng);
            let sol = solve_numeric(&spec, &w, SolverConfig::default()).unwrap();
            let (value, term) = formula.argmin(&w).unwrap();
            assert_eq!(sol.kappa0.as_ref(), Some(&value), "{}", case.name);
            let witness = term.witness.as_ref().unwrap();
            assert_eq!(w.beta(&spec.exit_vector(witness)).unwrap(), value);
            assert_eq!(formula.simplify().evaluate(&w).unwrap(), value);
        }
    }
}
