//! Benchmark fixtures: the worked-example graphs with their weights.

use kappa0::{GraphSpec, Weights};

pub struct Fixture {
    pub name: &'static str,
    pub spec: GraphSpec,
    pub weights: Weights,
}

fn fixture(name: &'static str, left: u32, right: u32, ratios: &[(i32, i64, i64)]) -> Fixture {
    let spec = GraphSpec::new(left, right, ratios.iter().map(|r| r.0)).expect("valid spec");
    let weights = Weights::from_ratios(&spec, ratios).expect("positive weights");
    Fixture {
        name,
        spec,
        weights,
    }
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        fixture("two-loops", 2, 2, &[(-2, 1, 9), (1, 1, 2), (2, 1, 9)]),
        fixture("sparse-6-3", 6, 3, &[(-6, 1, 1), (2, 1, 1), (3, 1, 1)]),
        fixture("stress-5-4", 5, 4, &[(-5, 5, 1), (3, 1, 10), (4, 5, 1)]),
        fixture("wide-16-5", 16, 5, &[(-16, 1, 67), (2, 15, 67), (5, 5, 67)]),
    ]
}
