use gtlab_core::algorithms::{run_li_laminar, run_refined_laminar_sfh};
use gtlab_core::population::sample_infections;
use gtlab_core::seed::{derive_seed, rng_from_seed};
use gtlab_core::{run, verify_zero_error, Algorithm, InfectionVector, Oracle, PriorKind, PriorVector, RunOptions};
use proptest::prelude::*;

fn arb_kind() -> impl Strategy<Value = PriorKind> {
    prop_oneof![
        (1usize..=50, 0.001f64..0.49).prop_map(|(size, p)| PriorKind::Iid { size, p }),
        (3usize..=50, 0.2f64..1.4)
            .prop_map(|(size, s)| PriorKind::Dirichlet { size, scale: s.min(size as f64 / 2.0 - 0.1) }),
        (1usize..=50, 2.0f64..100.0).prop_map(|(size, rate)| PriorKind::TruncatedExponential { size, rate }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn all_algorithms_recover_the_truth(kind in arb_kind(), seed in any::<u64>()) {
        let prior = kind.sample(&mut rng_from_seed(seed)).unwrap();
        let truth = sample_infections(&prior, derive_seed(seed, &[1]));
        for algorithm in Algorithm::ALL {
            let mut oracle = Oracle::new(truth.clone());
            let record = run(algorithm, &prior, &mut oracle, &RunOptions::default()).unwrap();
            prop_assert!(verify_zero_error(&record, &truth), "{algorithm}");
            prop_assert_eq!(record.total_tests, oracle.test_count());
        }
    }

    #[test]
    fn single_defective_refined_never_exceeds_li(defective in 0usize..4) {
        let prior = PriorVector::iid(0.2, 4).unwrap();
        let mut status = vec![false; 4];
        status[defective] = true;
        let truth = InfectionVector::new(status);
        let sfh = run_refined_laminar_sfh(&prior, &mut Oracle::new(truth.clone())).unwrap();
        let li = run_li_laminar(&prior, &mut Oracle::new(truth)).unwrap();
        prop_assert!(sfh.total_tests <= li.total_tests);
    }
}

// Li forms two pairs here, refined one set of four; two defectives in the
// first pair push the rest of it back into the population for a second round.
#[test]
fn reinsertion_can_cost_more_than_li() {
    let prior = PriorVector::iid(0.2, 4).unwrap();
    let truth = InfectionVector::new(vec![true, true, false, false]);
    let sfh = run_refined_laminar_sfh(&prior, &mut Oracle::new(truth.clone())).unwrap();
    let li = run_li_laminar(&prior, &mut Oracle::new(truth)).unwrap();
    assert_eq!((sfh.total_tests, li.total_tests), (6, 4));
}
