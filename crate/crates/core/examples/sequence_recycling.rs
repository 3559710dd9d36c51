//! A sequence of systems sharing an operator: harmonic subspaces for GMRES-DR
//! and Ritz vectors for deflated CG are carried from one solve to the next.

use augdef::prelude::*;
use augdef::random;

fn run(title: &str, a: &DenseMatrix, method: Method, strategy: RecycleStrategy) -> augdef::Result<()> {
    let n = a.rows();
    let mut seq = SystemSequence::new();
    for s in 0..4 {
        seq.push_system(a.clone(), random::complex_vector(&mut random::seeded(100 + s), n))?;
    }
    let cfg = SequenceConfig { method, params: MethodParams::new(20, 4, 1e-8, 5000), deflation: None };
    println!("{title}");
    for o in solve_sequence(&mut seq, &strategy, &cfg)? {
        let r = o.result?;
        println!("  system {}: recycled dim {}, {} iterations", o.index, o.recycled_dim, r.iterations);
    }
    Ok(())
}

fn main() -> augdef::Result<()> {
    let n = 100;
    let nonh = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 1e-3], 1.0, 2.0, Mixing::Schur { seed: 1, coupling: 2.0, decoupled: 2 }))?;
    run("gmres(20), no recycling", &nonh.matrix, Method::Gmres, RecycleStrategy::none())?;
    run("gmres-dr, harmonic recycling", &nonh.matrix, Method::GmresDr, RecycleStrategy::harmonic(4))?;

    let hpd = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 2e-3, 5e-3, 1e-2], 1.0, 2.0, Mixing::Orthogonal { seed: 2 }))?;
    run("deflated cg, Ritz recycling", &hpd.matrix, Method::DeflCg, RecycleStrategy::hpd_eigs(4))?;
    Ok(())
}
