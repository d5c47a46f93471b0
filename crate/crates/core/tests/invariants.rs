use proptest::prelude::*;
use starfw::geometry::{BoxSet, FeasibleSet, L1Ball, L2Ball, ProbabilitySimplex, VertexPolytope};
use starfw::linalg::{dist, dot};
use starfw::objectives::{AbsExp1D, Objective, Quadratic, QuarticCross};
use starfw::solver::{gap, solve, SolverConfig};
use starfw::verify::{gradient_fd_error, sample_points};
use starfw::StrategyKind;

fn sets(n: usize) -> Vec<Box<dyn FeasibleSet>> {
    let corners: Vec<Vec<f64>> = (0..n + 2)
        .map(|i| (0..n).map(|j| ((i * 7 + j * 3) % 5) as f64 - 2.0).collect())
        .collect();
    vec![
        Box::new(ProbabilitySimplex::new(n).unwrap()),
        Box::new(BoxSet::cube(n, -1.0, 2.0).unwrap()),
        Box::new(L1Ball::new(1.5, vec![0.25; n]).unwrap()),
        Box::new(L2Ball::centered(2.0, n).unwrap()),
        Box::new(VertexPolytope::new(corners).unwrap()),
    ]
}

fn gradient(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lmo_is_feasible_and_optimal(g in gradient(4), seed in any::<u64>()) {
        for set in sets(4) {
            let p = set.lmo(&g).unwrap();
            prop_assert!(set.contains(&p, 1e-9).unwrap(), "{} lmo left the set", set.kind());
            for u in sample_points(set.as_ref(), 50, seed) {
                prop_assert!(dot(&g, &p) <= dot(&g, &u) + 1e-12 * (1.0 + dot(&g, &u).abs()));
            }
        }
    }

    #[test]
    fn samples_are_feasible_and_within_diameter(seed in any::<u64>()) {
        for set in sets(3) {
            let pts = sample_points(set.as_ref(), 40, seed);
            for x in &pts {
                prop_assert!(set.contains(x, 1e-9).unwrap());
                for y in &pts {
                    prop_assert!(dist(x, y) <= set.diameter() * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn gap_is_nonpositive(x_seed in any::<u64>(), c in gradient(3)) {
        let obj = Quadratic::squared_distance(&c).unwrap();
        for set in sets(3) {
            let x = set.sample(x_seed);
            let info = gap(&obj, set.as_ref(), &x, 1e-9).unwrap();
            prop_assert!(info.omega <= 0.0);
        }
    }

    #[test]
    fn steps_lie_in_unit_interval_and_iterates_stay_feasible(seed in 0u64..1000, c in gradient(3)) {
        let obj = Quadratic::squared_distance(&c).unwrap();
        for set in sets(3) {
            for strategy in StrategyKind::ALL {
                let cfg = SolverConfig { max_iters: 30, seed, ..SolverConfig::with_strategy(strategy) };
                let rep = solve(&obj, set.as_ref(), &cfg).unwrap();
                for r in &rep.records {
                    prop_assert!(r.gap <= 0.0);
                    if let Some(lam) = r.lambda {
                        prop_assert!(lam > 0.0 && lam <= 1.0);
                    }
                }
                prop_assert!(set.contains(&rep.final_x, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn monotone_strategies_never_increase_f(seed in 0u64..1000) {
        let set = BoxSet::cube(2, -1.0, 1.0).unwrap();
        for strategy in [StrategyKind::Armijo, StrategyKind::Adaptive] {
            let cfg = SolverConfig { max_iters: 50, seed, ..SolverConfig::with_strategy(strategy) };
            let rep = solve(&QuarticCross, &set, &cfg).unwrap();
            for w in rep.records.windows(2) {
                prop_assert!(w[1].f <= w[0].f);
            }
        }
    }
}

#[test]
fn runs_are_deterministic_per_seed() {
    let set = ProbabilitySimplex::new(6).unwrap();
    let obj = Quadratic::squared_distance(&[1.0, -1.0, 0.5, 2.0, 0.0, -0.5]).unwrap();
    for strategy in StrategyKind::ALL {
        let cfg = SolverConfig { max_iters: 200, seed: 11, ..SolverConfig::with_strategy(strategy) };
        let a = solve(&obj, &set, &cfg).unwrap();
        let b = solve(&obj, &set, &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.final_x, b.final_x);
    }
}

#[test]
fn sampling_streams_are_prefixes() {
    let set = L2Ball::centered(1.0, 3).unwrap();
    let long = sample_points(&set, 20, 5);
    assert_eq!(sample_points(&set, 7, 5), long[..7]);
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let box2 = BoxSet::cube(2, -1.0, 1.0).unwrap();
    let line = BoxSet::cube(1, -3.0, 3.0).unwrap();
    let simplex = ProbabilitySimplex::new(4).unwrap();
    let quad = Quadratic::new(
        vec![
            vec![2.0, 0.5, 0.0, 0.0],
            vec![0.5, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, -1.0],
            vec![0.0, 0.0, -1.0, 2.0],
        ],
        vec![1.0, -2.0, 0.0, 0.5],
        0.0,
    )
    .unwrap();
    let cases: [(&dyn Objective, &dyn FeasibleSet); 3] =
        [(&QuarticCross, &box2), (&AbsExp1D, &line), (&quad, &simplex)];
    for (obj, set) in cases {
        let err = gradient_fd_error(obj, set, 100, 1e-6, 3).unwrap();
        assert!(err <= 1e-5, "{}: {err}", obj.name());
    }
}
