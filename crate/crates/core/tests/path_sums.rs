use peps_core::circuit::{simulate, PostselectedCircuit};
use peps_core::oracle::literal_path_sum;
use peps_core::par::Execution;
use peps_core::pathsum::{
    counting_identity_check, path_amplitude, path_histogram_with, postselected_norm, probability, Dyadic,
    ThCircuit,
};
use peps_core::random::{random_th_circuit, Rng};
use proptest::prelude::*;

fn th(seed: u64, n: usize, gates: usize, max_h: usize, posts: usize) -> ThCircuit {
    let mut rng = Rng::seed(seed);
    ThCircuit::new(random_th_circuit(&mut rng, n, gates, max_h, posts)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn probabilities_match_statevector(seed in any::<u64>(), n in 1usize..5, g in 0usize..14) {
        let c = th(seed, n, g, 8, 0);
        let (s, _) = simulate(c.circuit()).unwrap();
        let mut total = Dyadic::zero();
        for x in 0..1u64 << n {
            let p = probability(&c, x).unwrap();
            prop_assert!((p.to_f64() - s.amplitude(x).norm_sqr()).abs() < 1e-12);
            total = &total + &p;
        }
        prop_assert_eq!(total, Dyadic::one());
    }

    #[test]
    fn walk_agrees_with_literal_enumeration(seed in any::<u64>(), n in 1usize..4, g in 0usize..7) {
        let c = th(seed, n, g, 6, 0);
        for x in 0..1u64 << n {
            let pc = path_amplitude(&c, x).unwrap();
            prop_assert_eq!((pc.plus, pc.minus), literal_path_sum(c.circuit(), x).unwrap());
        }
    }

    #[test]
    fn histogram_is_execution_independent(seed in any::<u64>(), g in 0usize..20) {
        let c = th(seed, 4, g, 12, 0);
        let a = path_histogram_with(&c, Execution::Sequential).unwrap();
        let b = path_histogram_with(&c, Execution::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn counting_identity_holds(seed in any::<u64>(), n in 1usize..5, g in 0usize..14) {
        let c = th(seed, n, g, 10, 1);
        let id = counting_identity_check(&c).unwrap();
        prop_assert!(id.holds());
        prop_assert_eq!(id.norm, postselected_norm(&c).unwrap());
    }
}

#[test]
fn non_th_gates_are_rejected() {
    let mut c = PostselectedCircuit::new(2);
    c.push(peps_core::circuit::Gate::Cz(0, 1)).unwrap();
    assert!(ThCircuit::new(c).is_err());
}
