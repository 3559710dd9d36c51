//! Measured A-norm error of CG against the condition-number bound.

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    for kappa in [4.0, 9.0, 100.0] {
        let n = 80;
        let diag: Vec<C64> = (0..n).map(|i| c64(1.0 + (kappa - 1.0) * i as f64 / (n - 1) as f64, 0.0)).collect();
        let a = CsrMatrix::from_diagonal(&diag);
        let x = random::complex_vector(&mut random::seeded(1), n);
        let b = a.apply(&x);
        let rep = cg_solve(&a, &b, None, &CgConfig::new(1e-12, 1000).with_exact(x), None)?;
        let errs = rep.a_norm_errors.expect("exact solution supplied");
        println!("kappa = {kappa}");
        for l in (0..errs.len()).step_by(5) {
            println!("  step {l:>3}: measured {:.2e}  bound {:.2e}", errs[l] / errs[0], cg_bound(kappa, l)?);
        }
    }
    Ok(())
}
