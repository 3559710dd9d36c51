//! Augmented and deflated CG with an eigenvector basis of the two smallest
//! eigenvalues, plus the effective condition number of the deflated operator.

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let n = 200;
    let a = make_test_operator(&SpectrumSpec::clustered(n, &[0.01, 0.02], 1.0, 2.0, Mixing::Orthogonal { seed: 42 }))?;
    let b = random::complex_vector(&mut random::seeded(9), n);
    let basis = AugBasis::new(&a, a.right_vectors(&[0, 1]))?;
    let cfg = CgConfig::new(1e-8, 1000);

    let cg = cg_solve(&a, &b, None, &cfg, None)?;
    let aug = augmented_cg_solve(&a, &b, &basis, None, &cfg)?;
    let defl = deflated_cg_solve(&a, &b, &basis, &cfg)?;
    println!("cg            {:>4} iterations", cg.iterations);
    println!("augmented cg  {:>4} iterations", aug.iterations);
    println!("deflated cg   {:>4} iterations", defl.iterations);
    println!("kappa(A) = 200, kappa_eff = {:.4}", effective_condition_number(&a, &basis)?);
    Ok(())
}
