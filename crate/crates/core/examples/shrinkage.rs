//! The closed-form shrinkage maps used by the splitting.

use tv_gmks::prox::{shrink_anisotropic, shrink_isotropic, shrink_l1_residual, soft_threshold};
use tv_gmks::DenseMatrix;

fn main() -> tv_gmks::Result<()> {
    for t in [-2.0, -0.5, 0.0, 0.3, 1.7] {
        println!("soft({t:5.2}, 1) = {:5.2}", soft_threshold(t, 1.0));
    }

    let k = DenseMatrix::from_rows(&[&[3.0, 0.2], &[-1.0, 0.0]])?;
    let l = DenseMatrix::from_rows(&[&[4.0, 0.1], &[1.0, 0.0]])?;
    let iso = shrink_isotropic(&k, &l, 1.0)?;
    let aniso = shrink_anisotropic(&k, &l, 1.0)?;
    for i in 0..2 {
        for j in 0..2 {
            println!(
                "({:5.2}, {:5.2})  iso -> ({:5.2}, {:5.2})  aniso -> ({:5.2}, {:5.2})",
                k[(i, j)],
                l[(i, j)],
                iso.vertical[(i, j)],
                iso.horizontal[(i, j)],
                aniso.vertical[(i, j)],
                aniso.horizontal[(i, j)]
            );
        }
    }

    // residual shrink pulls H(X) back toward the data, leaving outliers alone
    let hx = DenseMatrix::from_rows(&[&[0.5, 0.5, 0.5]])?;
    let b = DenseMatrix::from_rows(&[&[0.45, 1.0, 0.0]])?;
    let r = shrink_l1_residual(&hx, &b, &DenseMatrix::zeros(1, 3), 5.0)?;
    println!("H(X) {:?}\nB    {:?}\nR    {:?}", hx.row(0), b.row(0), r.row(0));
    Ok(())
}
