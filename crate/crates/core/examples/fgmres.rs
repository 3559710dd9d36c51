//! Flexible GMRES with a preconditioner that changes at every step.

use augdef::gmres::fgmres_cycle;
use augdef::operators::FnPreconditioner;
use augdef::prelude::*;
use augdef::{random, vector};

fn main() -> augdef::Result<()> {
    let n = 200;
    let a = make_test_operator(&SpectrumSpec::clustered(n, &[0.01], 1.0, 10.0, Mixing::Similarity { seed: 1, cond: 10.0 }))?;
    let b = random::complex_vector(&mut random::seeded(2), n);
    let diag: Vec<C64> = (0..n).map(|i| a.matrix[(i, i)]).collect();

    // alternate between Jacobi and the identity: a different M_j at every step
    let mut step = 0usize;
    let mut flexible = FnPreconditioner::new(n, move |v: &[C64]| {
        step += 1;
        if step % 2 == 0 {
            v.iter().zip(&diag).map(|(x, d)| x / d).collect()
        } else {
            v.to_vec()
        }
    });

    let cyc = fgmres_cycle(&a, &mut flexible, &b, &vector::zeros(n), &SolveConfig::new(30, 1e-10))?;
    let st = &cyc.record.state;
    println!("one cycle of {} steps", st.dim());
    println!("  |A Z - V Hbar|_F   = {:.2e}", st.relation_residual(&a));
    println!("  |V^H V - I|_F      = {:.2e}", st.orthonormality_error());

    let cfg = SolveConfig::new(30, 1e-10).with_max_cycles(100);
    let report = fgmres_solve(&a, &mut flexible, &b, None, &cfg)?;
    println!(
        "restarted solve: {} iterations over {} cycles, relres {:.2e}, converged {}",
        report.iterations,
        report.cycles(),
        report.final_relres,
        report.converged
    );
    Ok(())
}
