//! A sequence of generalized Sylvester equations `Σ Lᵢ X Rᵢ = Eₖ` sharing
//! one operator, solved by growing a single block Krylov basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tv_gmks::gmks::{GmksConfig, GmksSolver};
use tv_gmks::operators::SylvesterTerm;
use tv_gmks::{DenseMatrix, SylvesterOperator};

fn spd(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let g = DenseMatrix::random(n, n, rng);
    let mut a = g.transpose_matmul(&g).unwrap();
    a += &DenseMatrix::identity(n).scaled(n as f64);
    a
}

fn main() -> tv_gmks::Result<()> {
    let (m, n) = (40, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // A(X) = L₁ X R₁ + L₂ X R₂ with symmetric positive definite factors
    let op = SylvesterOperator::new(vec![
        SylvesterTerm::dense(spd(m, &mut rng), spd(n, &mut rng)),
        SylvesterTerm::dense(spd(m, &mut rng), DenseMatrix::identity(n)),
    ])?;

    let mut solver = GmksSolver::new(op.clone(), GmksConfig { arnoldi_steps: 8, ..GmksConfig::default() });
    let mut e = DenseMatrix::random(m, n, &mut rng);
    let first = solver.solve_initial(&e, &DenseMatrix::zeros(m, n))?.x.clone();
    let direct = (&op.apply(&first)? - &e).frobenius_norm() / e.frobenius_norm();
    println!("initial: relative residual {direct:.3e}");

    // slowly drifting right-hand sides, as in an outer iteration
    for k in 1..=30 {
        let drift = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-0.05..0.05));
        e += &drift;
        let s = solver.solve_next(&e)?;
        let direct = (&op.apply(&s.x)? - &e).frobenius_norm() / e.frobenius_norm();
        if k % 5 == 0 {
            println!(
                "step {k:2}: basis {:3}  relative residual {direct:.3e}",
                solver.basis().map_or(0, |b| b.dim())
            );
        }
    }
    Ok(())
}
