//! Two-level spectral preconditioners built from an eigenvector basis.

use augdef::hpd::{coarse_condition_holds, default_nu, preconditioned_spectrum};
use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let ev: Vec<f64> = [0.01, 0.03].iter().copied().chain((0..30).map(|i| 1.0 + i as f64 / 10.0)).collect();
    let a = make_test_operator(&SpectrumSpec::real(&ev, Mixing::Unitary { seed: 2 }))?;
    let basis = AugBasis::new(&a, a.right_vectors(&[0, 1]))?;
    let nu = default_nu(&a, &basis, 25, 42)?;
    println!("estimated nu = {nu:.6} (next eigenvalue is {})", ev[2]);

    for kind in [SpectralKind::Mdef, SpectralKind::Mcoarse] {
        let mut m = build_spectral_preconditioner(kind, &basis, nu)?;
        let eigs = preconditioned_spectrum(&a, &mut m)?;
        println!("{kind:?}: smallest {:.4}, {:.4}, {:.4}; largest {:.4}", eigs[0], eigs[1], eigs[2], eigs[eigs.len() - 1]);
        if kind == SpectralKind::Mcoarse {
            println!("  coarse ordering condition holds: {}", coarse_condition_holds(&eigs, 2, nu));
        }
        let b = random::complex_vector(&mut random::seeded(3), ev.len());
        let rep = cg_solve(&a, &b, None, &CgConfig::new(1e-10, 500), Some(&mut m))?;
        println!("  preconditioned cg: {} iterations", rep.iterations);
    }
    let plain = cg_solve(&a, &random::complex_vector(&mut random::seeded(3), ev.len()), None, &CgConfig::new(1e-10, 500), None)?;
    println!("unpreconditioned cg: {} iterations", plain.iterations);
    Ok(())
}
