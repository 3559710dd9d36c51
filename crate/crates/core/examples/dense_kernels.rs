//! Dense building blocks: eigenvalues, QR and the Hessenberg least-squares solve.

use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let a = DenseMatrix::from_real_rows(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
    let eig = dense_eig(&a)?;
    println!("eigenvalues of a rotation block plus 2:");
    for (l, r) in eig.values.iter().zip(&eig.residuals) {
        println!("  {l:.6}  (residual {r:.1e})");
    }

    let m = random::complex_matrix(&mut random::seeded(1), 8, 3);
    let qr = thin_qr(&m)?;
    println!("thin QR of an 8x3 matrix: rank {}, |QR - M| = {:.1e}", qr.rank, qr.q.matmul(&qr.r).sub(&m).frobenius_norm());

    // (l+1) x l upper Hessenberg least squares, as solved at the end of a cycle
    let h = DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0], &[0.0, 0.5]]);
    let c = vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
    let ls = hessenberg_lsq(&h, &c)?;
    println!("min |c - H y|: y = [{:.4}, {:.4}], residual {:.4}", ls.solution[0], ls.solution[1], ls.residual_norm);
    Ok(())
}
