//! Minimum residual over x0 + span(W) + K_m, computed once by augmentation and
//! once through the deflated operator, gives the same iterate.

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let n = 50;
    let mut rng = random::seeded(11);
    let a = random::complex_matrix(&mut rng, n, n).add(&DenseMatrix::identity(n).scaled(c64(10.0, 0.0)));
    let b = random::complex_vector(&mut rng, n);
    let w: Vec<_> = (0..3).map(|_| random::complex_vector(&mut rng, n)).collect();
    for m in [2, 5, 10, 20] {
        let rep = augmented_deflated_equivalence(&a, &w, &b, None, m)?;
        println!("m = {m:>2}: |x_aug - x_defl| / |x_aug| = {:.1e}, residual gap {:.1e}", rep.max_diff, rep.residual_diff);
    }
    Ok(())
}
