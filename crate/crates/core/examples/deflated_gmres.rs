//! Deflated GMRES with an orthogonal projector (W only) and an oblique one
//! (W and a test basis W~).

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let n = 150;
    let a = make_test_operator(&SpectrumSpec::clustered(n, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Similarity { seed: 3, cond: 10.0 }))?;
    let b = random::complex_vector(&mut random::seeded(4), n);
    let cfg = SolveConfig::new(10, 1e-9).with_max_cycles(500);
    let w = a.right_vectors(&[0, 1]);
    let wt = a.left_vectors(&[0, 1]);

    let plain = fgmres_solve(&a, &mut Identity::new(n), &b, None, &cfg)?;
    let ortho = deflated_gmres_ortho(&a, &mut Identity::new(n), &w, &b, None, &cfg)?;
    let oblique = deflated_gmres_oblique(&a, &mut Identity::new(n), &w, &wt, &b, None, &cfg)?;

    println!("gmres(10)           {:>4} iterations", plain.iterations);
    println!(
        "orthogonal deflation {:>4} iterations, |r - r^| = {:.1e}",
        ortho.report.iterations, ortho.residual_identity
    );
    println!(
        "oblique deflation    {:>4} iterations, |r - r^| = {:.1e}",
        oblique.report.iterations, oblique.residual_identity
    );
    Ok(())
}
