//! Files in and out: Matrix Market matrices, dense bases, and the binary
//! container for a recycled subspace.

use augdef::operators::{read_dense_array, read_matrix_market, write_dense_array, write_matrix_market};
use augdef::prelude::*;
use augdef::random;

fn main() -> augdef::Result<()> {
    let dir = std::env::temp_dir().join("augdef-example");
    std::fs::create_dir_all(&dir)?;

    let n = 100;
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, c64(2.5, 0.1)));
        if i + 1 < n {
            t.push((i, i + 1, c64(-1.0, 0.0)));
            t.push((i + 1, i, c64(-1.2, 0.0)));
        }
    }
    let a = CsrMatrix::from_triplets(n, &t)?;
    let path = dir.join("conv_diff.mtx");
    write_matrix_market(&a, &path)?;
    let a = read_matrix_market(&path)?;
    println!("read {} ({} nonzeros)", path.display(), a.nnz());

    let b = random::complex_vector(&mut random::seeded(1), n);
    let cfg = SolveConfig::new(20, 1e-10).with_max_cycles(100).with_augment(4);
    let rep = gmres_dr_solve(&a, &mut Identity::new(n), &b, None, &cfg, &HarmonicSpec::smallest(4)?, None)?;
    println!("gmres-dr: {} iterations", rep.iterations);

    if let Some(space) = &rep.recycle {
        let p = dir.join("space.bin");
        space.save(&p)?;
        let back = RecycleSpace::load(&p)?;
        println!("saved and reloaded a {}-dimensional recycle space", back.k());
        let z = DenseMatrix::from_columns(n, &back.z);
        let wp = dir.join("z.mtx");
        write_dense_array(&z, &wp)?;
        println!("its Z block as a dense array: {}x{}", read_dense_array(&wp)?.rows(), z.cols());
    }
    Ok(())
}
