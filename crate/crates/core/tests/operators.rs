//! Generated test operators reproduce their prescribed spectra.

mod common;

use augdef::prelude::*;
use proptest::prelude::*;

fn mixing() -> impl Strategy<Value = Mixing> {
    prop_oneof![
        Just(Mixing::None),
        (0u64..1000).prop_map(|seed| Mixing::Unitary { seed }),
        (0u64..1000).prop_map(|seed| Mixing::Orthogonal { seed }),
        (0u64..1000, 1.0f64..50.0).prop_map(|(seed, cond)| Mixing::Similarity { seed, cond }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn spectrum_is_reproduced(n in 3usize..30, mix in mixing(), seed in 0u64..1000) {
        let mut rng = augdef::random::seeded(seed);
        let ev: Vec<C64> = (0..n).map(|i| c64(1.0 + i as f64 + 0.1 * rand_like(&mut rng), 0.0)).collect();
        let op = make_test_operator(&SpectrumSpec::new(ev.clone(), mix)).unwrap();
        let mut got = dense_eig(&op.matrix).unwrap().values;
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (g, w) in got.iter().zip(&ev) {
            prop_assert!((g - w).norm() <= 1e-10 * (n as f64));
        }
        // the stored eigendecomposition is an exact oracle
        let b: Vec<C64> = (0..n).map(|i| c64(1.0, i as f64)).collect();
        let x = op.solve(&b);
        prop_assert!(common::rel_diff(&x, &common::direct_solve(&op, &b)) < 1e-10 * common::cond2(&op));
    }
}

fn rand_like(rng: &mut augdef::random::SeededRng) -> f64 {
    augdef::random::real_vector(rng, 1)[0].re.tanh()
}

#[test]
fn schur_mixing_keeps_outliers_exact_and_bulk_nearby() {
    let n = 200;
    let op = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 1e-3], 1.0, 2.0, Mixing::Schur { seed: 42, coupling: 2.0, decoupled: 2 })).unwrap();
    let got = dense_eig(&op.matrix).unwrap().values;
    let small: Vec<&C64> = got.iter().filter(|l| l.norm() < 0.5).collect();
    assert_eq!(small.len(), 2);
    assert!(small.iter().all(|l| (*l - c64(1e-3, 0.0)).norm() < 1e-10));
    // the bulk is strongly non-normal; computed eigenvalues stay in a thin band around [1, 2]
    assert!(got.iter().filter(|l| l.norm() >= 0.5).all(|l| l.re > 0.9 && l.re < 2.1 && l.im.abs() < 0.2));
}
