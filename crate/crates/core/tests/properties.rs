use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use kappa0::{
    lower_bound, solve_numeric, ExitVector, GraphSpec, KappaFormula, SolverConfig, VertexSet,
    Weights,
};

fn spec_strategy(max: u32) -> impl Strategy<Value = GraphSpec> {
    (1..=max, 1..=max)
        .prop_flat_map(|(l, r)| {
            let inner = (-(l as i32) + 1..r as i32).collect::<Vec<_>>();
            let n = inner.len();
            (
                Just(l),
                Just(r),
                proptest::sample::subsequence(inner, 0..=n),
            )
        })
        .prop_map(|(l, r, mut support)| {
            support.push(-(l as i32));
            support.push(r as i32);
            GraphSpec::new(l, r, support).unwrap()
        })
}

fn weights_strategy(spec: GraphSpec) -> impl Strategy<Value = (GraphSpec, Weights)> {
    let n = spec.support().len();
    proptest::collection::vec((1i64..=30, 1i64..=30), n).prop_map(move |pairs| {
        let alpha = spec
            .support()
            .iter()
            .zip(pairs)
            .map(|(&i, (p, q))| (i, BigRational::new(BigInt::from(p), BigInt::from(q))))
            .collect();
        let w = Weights::new(&spec, alpha).unwrap();
        (spec.clone(), w)
    })
}

fn set_strategy() -> impl Strategy<Value = VertexSet> {
    proptest::collection::btree_set(-20i64..20, 1..10).prop_map(|s| VertexSet::new(s).unwrap())
}

proptest! {
    #[test]
    fn exit_vector_is_shift_invariant(spec in spec_strategy(4), set in set_strategy(), k in -50i64..50) {
        prop_assert_eq!(spec.exit_vector(&set), spec.exit_vector(&set.shifted(k)));
        prop_assert_eq!(spec.exit_vector(&set), spec.exit_vector(&set.canonical()));
    }

    #[test]
    fn long_intervals_exit_by_offset_length(spec in spec_strategy(5), extra in 0i64..10) {
        let n = spec.window() as i64 - 1 + extra;
        let interval = VertexSet::new(0..=n).unwrap();
        let x = spec.exit_vector(&interval);
        for (i, count) in x.iter() {
            prop_assert_eq!(count, i.unsigned_abs());
        }
    }

    #[test]
    fn adding_a_hull_external_vertex_never_lowers_the_exit_weight(
        (spec, w) in spec_strategy(4).prop_flat_map(weights_strategy),
        set in set_strategy(),
        gap in 1i64..10,
        left in any::<bool>(),
    ) {
        let v = if left { set.members()[0] - gap } else { set.members()[set.len() - 1] + gap };
        let before = w.beta(&spec.exit_vector(&set)).unwrap();
        let after = w.beta(&spec.exit_vector(&set.with(v))).unwrap();
        prop_assert!(after >= before);
    }

    #[test]
    fn minimum_is_at_least_the_lower_bound((spec, w) in spec_strategy(3).prop_flat_map(weights_strategy)) {
        let sol = solve_numeric(&spec, &w, SolverConfig::default()).unwrap();
        prop_assert!(sol.exact);
        let value = sol.kappa0.unwrap();
        prop_assert!(value >= lower_bound(&w));
        let witness = sol.witness.unwrap();
        prop_assert!(spec.is_strongly_connected(&witness));
        prop_assert_eq!(w.beta(&spec.exit_vector(&witness)).unwrap(), value);
    }

    #[test]
    fn simplify_preserves_evaluate(
        rows in proptest::collection::vec(proptest::collection::vec(0u32..6, 3), 1..8),
        alpha in proptest::collection::vec((1i64..=30, 1i64..=30), 3),
    ) {
        let support = [-2, 1, 2];
        let spec = GraphSpec::new(2, 2, support).unwrap();
        let refs: Vec<&[u32]> = rows.iter().map(|r| r.as_slice()).collect();
        let f = KappaFormula::from_counts(&support, &refs).unwrap();
        let w = Weights::new(
            &spec,
            support
                .iter()
                .zip(&alpha)
                .map(|(&i, &(p, q))| (i, BigRational::new(p.into(), q.into())))
                .collect(),
        )
        .unwrap();
        let s = f.simplify();
        prop_assert!(s.is_antichain());
        prop_assert_eq!(s.simplify(), s.clone());
        prop_assert_eq!(f.evaluate(&w).unwrap(), s.evaluate(&w).unwrap());
    }

    #[test]
    fn strictly_dominated_vectors_never_win(a in proptest::collection::vec(0u32..5, 3), bump in 0usize..3) {
        let support = [-2, 1, 2];
        let mut b = a.clone();
        b[bump] += 1;
        let x = ExitVector::from_counts(&support, &a);
        let y = ExitVector::from_counts(&support, &b);
        prop_assert!(x.strictly_dominates(&y));
        prop_assert!(!y.le(&x));
    }
}
