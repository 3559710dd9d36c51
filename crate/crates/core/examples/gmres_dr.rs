//! Deflated restarting keeps harmonic Ritz vectors across restarts; on a
//! non-normal operator with two tiny eigenvalues it beats plain restarts.

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let n = 200;
    let spec = SpectrumSpec::clustered(n, &[1e-3, 1e-3], 1.0, 2.0, Mixing::Schur { seed: 42, coupling: 2.0, decoupled: 2 });
    let a = make_test_operator(&spec)?;
    let b = random::complex_vector(&mut random::seeded(4243), n);
    let cfg = SolveConfig::new(20, 1e-8).with_max_cycles(200);

    let plain = fgmres_solve(&a, &mut Identity::new(n), &b, None, &cfg)?;
    let dr = gmres_dr_solve(&a, &mut Identity::new(n), &b, None, &cfg.clone().with_augment(4), &HarmonicSpec::smallest(4)?, None)?;

    println!("{:<12} {:>6} {:>7} {:>10}", "method", "iters", "cycles", "relres");
    for (name, r) in [("gmres(20)", &plain), ("gmres-dr", &dr)] {
        println!("{name:<12} {:>6} {:>7} {:>10.2e}", r.iterations, r.cycles(), r.final_relres);
    }
    if let Some(space) = &dr.recycle {
        println!("kept harmonic Ritz values:");
        for t in &space.theta {
            println!("  {t:.3e}");
        }
    }
    Ok(())
}
