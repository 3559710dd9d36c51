//! File formats and the sequence driver.

use augdef::c64;
use augdef::operators::{read_dense_array, read_matrix_market, write_dense_array, write_matrix_market, CsrMatrix};
use augdef::prelude::*;
use augdef::random;
use augdef::recycle::RecycleSpace;
use augdef::sequences::DeflationSpace;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, Just(0.0), (-300i32..300).prop_map(|e| 1.234567890123 * 10f64.powi(e))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matrix_market_round_trips_exactly(
        n in 1usize..12,
        entries in prop::collection::vec((0usize..12, 0usize..12, finite(), finite()), 0..40),
    ) {
        let trip: Vec<_> = entries.iter().map(|&(i, j, re, im)| (i % n, j % n, c64(re, im))).collect();
        let a = CsrMatrix::from_triplets(n, &trip).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&a, &path).unwrap();
        let back = read_matrix_market(&path).unwrap();
        prop_assert_eq!(back.to_dense(), a.to_dense());
    }

    #[test]
    fn dense_arrays_round_trip_exactly(rows in 1usize..9, cols in 1usize..5, seed in 0u64..1000) {
        let m = random::complex_matrix(&mut random::seeded(seed), rows, cols);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.mtx");
        write_dense_array(&m, &path).unwrap();
        prop_assert_eq!(read_dense_array(&path).unwrap(), m);
    }

    #[test]
    fn recycle_containers_round_trip(n in 2usize..20, k in 0usize..4, seed in 0u64..1000) {
        prop_assume!(k + 1 <= n);
        let mut rng = random::seeded(seed);
        let space = RecycleSpace {
            z: (0..k).map(|_| random::complex_vector(&mut rng, n)).collect(),
            v: (0..=k).map(|_| random::complex_vector(&mut rng, n)).collect(),
            hbar: random::complex_matrix(&mut rng, k + 1, k),
            theta: random::complex_vector(&mut rng, k),
        };
        prop_assert_eq!(RecycleSpace::from_bytes(&space.to_bytes()).unwrap(), space);
    }
}

#[test]
fn symmetric_files_expand_both_triangles() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.mtx");
    std::fs::write(&path, "%%MatrixMarket matrix coordinate complex hermitian\n% comment\n2 2 2\n1 1 2.0 0.0\n2 1 1.0 3.0\n").unwrap();
    let a = read_matrix_market(&path).unwrap();
    assert_eq!(a.get(1, 0), c64(1.0, 3.0));
    assert_eq!(a.get(0, 1), c64(1.0, -3.0));
    assert!(a.is_hermitian());
}

#[test]
fn truncated_container_is_rejected() {
    let space = RecycleSpace {
        z: vec![vec![c64(1.0, 0.0); 3]],
        v: vec![vec![c64(0.0, 1.0); 3]; 2],
        hbar: DenseMatrix::zeros(2, 1),
        theta: vec![c64(0.5, 0.0)],
    };
    let bytes = space.to_bytes();
    assert!(RecycleSpace::from_bytes(&bytes[..bytes.len() - 3]).is_err());
}

#[test]
fn saved_space_warm_starts_a_later_solve() {
    let n = 100;
    let op = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Schur { seed: 3, coupling: 2.0, decoupled: 2 })).unwrap();
    let b = random::complex_vector(&mut random::seeded(4), n);
    let cfg = SolveConfig::new(20, 1e-8).with_max_cycles(100).with_augment(4);
    let spec = HarmonicSpec::smallest(4).unwrap();
    let first = gmres_dr_solve(&op, &mut Identity::new(n), &b, None, &cfg, &spec, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("space.bin");
    first.recycle.as_ref().unwrap().save(&path).unwrap();
    let warm = RecycleSpace::load(&path).unwrap();
    let b2 = random::complex_vector(&mut random::seeded(5), n);
    let cold = gmres_dr_solve(&op, &mut Identity::new(n), &b2, None, &cfg, &spec, None).unwrap();
    let hot = gmres_dr_solve(&op, &mut Identity::new(n), &b2, None, &cfg, &spec, Some(&warm)).unwrap();
    assert!(hot.converged && cold.converged);
    assert!(hot.iterations < cold.iterations, "{} vs {}", hot.iterations, cold.iterations);
}

#[test]
fn every_report_meets_tolerance_regardless_of_recycling() {
    // a space from an unrelated operator must not break correctness
    let n = 80;
    let other = make_test_operator(&SpectrumSpec::clustered(n, &[5e-3], 1.0, 3.0, Mixing::Similarity { seed: 9, cond: 10.0 })).unwrap();
    let target = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Orthogonal { seed: 10 })).unwrap();
    let mut seq = SystemSequence::new();
    seq.push_system(other.matrix.clone(), random::complex_vector(&mut random::seeded(1), n)).unwrap();
    seq.push_system(target.matrix.clone(), random::complex_vector(&mut random::seeded(2), n)).unwrap();
    for method in [Method::GmresDr, Method::GcroDr] {
        let cfg = SequenceConfig { method, params: MethodParams::new(20, 4, 1e-9, 5000), deflation: None };
        let out = solve_sequence(&mut seq, &RecycleStrategy::harmonic(4), &cfg).unwrap();
        for o in &out {
            let rep = o.result.as_ref().unwrap();
            assert!(rep.converged && rep.final_relres <= 1e-9, "{method} system {}", o.index);
        }
    }
}

#[test]
fn hpd_sequence_carries_ritz_vectors_forward() {
    let n = 120;
    let op = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 2e-3, 3e-3], 1.0, 2.0, Mixing::Orthogonal { seed: 11 })).unwrap();
    let mut seq = SystemSequence::new();
    for s in 0..3 {
        seq.push_system(op.matrix.clone(), random::complex_vector(&mut random::seeded(20 + s), n)).unwrap();
    }
    let cfg = SequenceConfig { method: Method::DeflCg, params: MethodParams::new(20, 3, 1e-8, 5000), deflation: None };
    let out = solve_sequence(&mut seq, &RecycleStrategy::hpd_eigs(3), &cfg).unwrap();
    let its: Vec<usize> = out.iter().map(|o| o.result.as_ref().unwrap().iterations).collect();
    assert_eq!(out[0].recycled_dim, 0);
    assert_eq!(out[2].recycled_dim, 3);
    assert!(its[2] < its[0], "{its:?}");
}

#[test]
fn deflated_gmres_with_a_given_space() {
    let n = 60;
    let op = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Similarity { seed: 12, cond: 10.0 })).unwrap();
    let b = random::complex_vector(&mut random::seeded(13), n);
    let params = MethodParams::new(10, 0, 1e-9, 3000);
    let plain = augdef::sequences::run_method(Method::Gmres, &op, &mut Identity::new(n), &b, None, &params, None, None, false).unwrap();
    let mut space = DeflationSpace::new(op.right_vectors(&[0, 1]));
    let ortho =
        augdef::sequences::run_method(Method::DeflGmres, &op, &mut Identity::new(n), &b, None, &params, Some(&space), None, false).unwrap();
    space.wt = Some(op.left_vectors(&[0, 1]));
    let oblique =
        augdef::sequences::run_method(Method::DeflGmresOblique, &op, &mut Identity::new(n), &b, None, &params, Some(&space), None, false)
            .unwrap();
    assert!(ortho.report.iterations < plain.report.iterations);
    assert!(oblique.report.iterations < plain.report.iterations);
}
