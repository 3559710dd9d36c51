//! Rank-one updates move chosen eigenvalues to a target while leaving the rest.

use augdef::deflation::translation_vector;
use augdef::prelude::*;

fn main() -> augdef::Result<()> {
    let ev = [0.01, 0.02, 1.0, 1.5, 2.0, 2.5, 3.0];
    let a = make_test_operator(&SpectrumSpec::real(&ev, Mixing::Similarity { seed: 5, cond: 4.0 }))?;
    let target = c64(3.0, 0.0);
    let mut u = Vec::new();
    let mut w = Vec::new();
    // the second factor acts after the first, so translate in order with fresh left vectors
    for i in 0..2 {
        let ui = a.right_vectors(&[i]).remove(0);
        let li = a.left_vectors(&[i]).remove(0);
        w.push(translation_vector(a.eigenvalues[i], target, &ui, &li)?);
        u.push(ui);
    }
    let t = spectral_translation(&a, u, w)?;
    let mut moved: Vec<f64> = dense_eig(&t.to_dense())?.values.iter().map(|l| l.re).collect();
    moved.sort_by(f64::total_cmp);
    println!("before: {ev:?}");
    println!("after:  {:?}", moved.iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>());
    Ok(())
}
