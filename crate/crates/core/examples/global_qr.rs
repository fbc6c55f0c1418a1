//! Incrementally factored block row `[A₁, …, A_k] = [Q₁, …, Q_k](R ⊗ I)`
//! and the block least-squares problem it solves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tv_gmks::linalg::frobenius_inner;
use tv_gmks::{DenseMatrix, GlobalQr};

fn main() -> tv_gmks::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let blocks: Vec<DenseMatrix> = (0..4).map(|_| DenseMatrix::random(6, 5, &mut rng)).collect();

    let mut qr = GlobalQr::new();
    for b in &blocks {
        let step = qr.append(b)?;
        println!("appended block, diagonal of R = {:.4}", step.r_diag);
    }
    // a combination of earlier blocks is rejected
    let dependent = &blocks[0] + &blocks[2].scaled(2.0);
    println!("dependent block: {}", qr.append(&dependent).unwrap_err());

    let q = qr.q_blocks();
    let gram = DenseMatrix::from_fn(q.len(), q.len(), |i, j| frobenius_inner(&q[i], &q[j]).unwrap());
    println!("max |QᵀQ − I| = {:.2e}", (&gram - &DenseMatrix::identity(q.len())).max_abs());

    let target = DenseMatrix::random(6, 5, &mut rng);
    let y = qr.solve_least_squares(&target)?;
    let mut fit = DenseMatrix::zeros(6, 5);
    for (b, &c) in blocks.iter().zip(&y) {
        fit.axpy(c, b);
    }
    println!("coefficients {y:.4?}");
    println!("residual {:.4}", (&target - &fit).frobenius_norm());
    Ok(())
}
