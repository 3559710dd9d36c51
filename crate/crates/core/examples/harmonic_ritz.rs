//! Harmonic Ritz values of one cycle approximate the eigenvalues closest to zero.

use augdef::gmres::fgmres_cycle;
use augdef::prelude::*;
use augdef::recycle::harmonic_ritz;
use augdef::{random, vector};

fn main() -> augdef::Result<()> {
    let n = 100;
    let a = make_test_operator(&SpectrumSpec::clustered(n, &[0.02, 0.05, 0.1], 1.0, 4.0, Mixing::Unitary { seed: 7 }))?;
    let b = random::complex_vector(&mut random::seeded(8), n);
    for l in [10, 20, 40] {
        let cyc = fgmres_cycle(&a, &mut Identity::new(n), &b, &vector::zeros(n), &SolveConfig::new(l, 1e-14))?;
        let hr = harmonic_ritz(&cyc.record.state.hbar(), &HarmonicSpec::smallest(3)?)?;
        let vals: Vec<String> = hr.theta.iter().map(|t| format!("{:.5}", t.re)).collect();
        println!("cycle length {l:>2}: {}", vals.join("  "));
    }
    println!("exact:            0.02000  0.05000  0.10000");
    Ok(())
}
