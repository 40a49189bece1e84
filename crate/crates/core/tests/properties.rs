mod common;

use proptest::prelude::*;

use common::{random_density, random_state};
use qcommit::quantum::{
    canonical_purification, fidelity, partial_trace, schmidt_decompose, trace_distance, uhlmann_rotation, purifier_overlap,
    DECOMPOSITION_TOL,
};
use qcommit::spacetime::{in_past_cone, Event};
use qcommit::RandomStream;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_axioms(seed in any::<u64>(), qubits in 1usize..=3, terms in 1usize..=4) {
        let mut rng = RandomStream::new(seed);
        let a = random_density(&mut rng, qubits, terms);
        let b = random_density(&mut rng, qubits, terms);
        let fab = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&fab));
        prop_assert!((fab - fidelity(&b, &a).unwrap()).abs() < 1e-9);
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
        // Fuchs–van de Graaf: 1 − √F ≤ D ≤ √(1 − F).
        let d = trace_distance(&a, &b).unwrap();
        prop_assert!(1.0 - fab.sqrt() <= d + 1e-9);
        prop_assert!(d <= (1.0 - fab).sqrt() + 1e-9);
    }

    #[test]
    fn pure_fidelity_is_overlap(seed in any::<u64>(), qubits in 1usize..=3) {
        let mut rng = RandomStream::new(seed);
        let (x, y) = (random_state(&mut rng, qubits), random_state(&mut rng, qubits));
        prop_assert!((fidelity(&x.density(), &y.density()).unwrap() - x.overlap(&y)).abs() < 1e-9);
    }

    #[test]
    fn schmidt_round_trip(seed in any::<u64>(), qubits in 2usize..=6, cut in any::<prop::sample::Index>()) {
        let mut rng = RandomStream::new(seed);
        let s = random_state(&mut rng, qubits);
        let mut order: Vec<usize> = (0..qubits).collect();
        let k = 1 + cut.index(qubits - 1);
        // A non-contiguous left set exercises the permutation path.
        order.rotate_left(seed as usize % qubits);
        let mut left = order[..k].to_vec();
        left.sort_unstable();
        let d = schmidt_decompose(&s, &left).unwrap();
        prop_assert!(d.reconstruct().distance(&s) < DECOMPOSITION_TOL);
        let total: f64 = d.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purification_traces_back(seed in any::<u64>(), qubits in 1usize..=3, terms in 1usize..=4) {
        let mut rng = RandomStream::new(seed);
        let rho = random_density(&mut rng, qubits, terms);
        let psi = canonical_purification(&rho, 1 << qubits).unwrap();
        let keep: Vec<usize> = (0..qubits).collect();
        prop_assert!(partial_trace(&psi, &keep).unwrap().max_abs_diff(&rho) < DECOMPOSITION_TOL);
    }

    #[test]
    fn uhlmann_attains_root_fidelity(seed in any::<u64>(), qubits in 1usize..=2, terms in 1usize..=3) {
        let mut rng = RandomStream::new(seed);
        let (a, b) = (random_density(&mut rng, qubits, terms), random_density(&mut rng, qubits, terms));
        let p = 1 << qubits;
        let u = uhlmann_rotation(&a, &b, p).unwrap();
        let ov = purifier_overlap(&canonical_purification(&a, p).unwrap(), &canonical_purification(&b, p).unwrap(), &u).unwrap();
        prop_assert!((ov.norm() - fidelity(&a, &b).unwrap().sqrt()).abs() < 1e-8);
    }

    #[test]
    fn cone_verdicts_survive_boost(t in -5.0f64..5.0, x in -5.0f64..5.0, y in -3.0f64..3.0, dt in -5.0f64..5.0, dx in -5.0f64..5.0, axis in 0usize..2) {
        let q = Event::new(t, [x, y, 0.0]).unwrap();
        let p = Event::new(t + dt, [x + dx, y, 0.0]).unwrap();
        // Skip pairs within rounding of the light cone.
        prop_assume!((dt.abs() - dx.abs()).abs() > 1e-6);
        for beta in [0.5, -0.5] {
            prop_assert_eq!(in_past_cone(&q, &p), in_past_cone(&q.boosted(beta, axis), &p.boosted(beta, axis)));
        }
    }

    #[test]
    fn cone_is_a_partial_order(a in prop::array::uniform3(-4.0f64..4.0), b in prop::array::uniform3(-4.0f64..4.0), c in prop::array::uniform3(-4.0f64..4.0)) {
        let e = |v: [f64; 3]| Event::on_line(v[0], v[1]);
        let (p, q, r) = (e(a), e(b), e(c));
        prop_assert!(in_past_cone(&p, &p));
        if in_past_cone(&p, &q) && in_past_cone(&q, &r) {
            prop_assert!(in_past_cone(&p, &r));
        }
        if in_past_cone(&p, &q) && in_past_cone(&q, &p) {
            prop_assert!((p.t - q.t).abs() < 1e-6);
        }
    }
}
