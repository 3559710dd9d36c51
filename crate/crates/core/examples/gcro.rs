//! GCRO keeps an outer space of past corrections; GCRO-DR replaces it by
//! harmonic Ritz directions and, with a fixed preconditioner, tracks GMRES-DR.

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let n = 150;
    let a = make_test_operator(&SpectrumSpec::clustered(n, &[1e-2, 2e-2], 1.0, 3.0, Mixing::Similarity { seed: 6, cond: 10.0 }))?;
    let b = random::complex_vector(&mut random::seeded(7), n);
    let diag: Vec<C64> = (0..n).map(|i| a.matrix[(i, i)]).collect();
    let cfg = SolveConfig::new(15, 1e-10).with_max_cycles(200).with_augment(4);
    let spec = HarmonicSpec::smallest(4)?;

    let g = gcro_solve(&a, &mut Jacobi::new(&diag), &b, None, &cfg)?;
    let gdr = gcro_dr_solve(&a, &mut Jacobi::new(&diag), &b, None, &cfg, &spec, None)?;
    let dr = gmres_dr_solve(&a, &mut Jacobi::new(&diag), &b, None, &cfg, &spec, None)?;
    for (name, r) in [("gcro", &g), ("gcro-dr", &gdr), ("gmres-dr", &dr)] {
        println!("{name:<9} {:>4} iterations, relres {:.3e}", r.iterations, r.final_relres);
    }
    let gap = gdr.history.relres.iter().zip(&dr.history.relres).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("largest gap between the gcro-dr and gmres-dr histories: {gap:.1e}");
    Ok(())
}
