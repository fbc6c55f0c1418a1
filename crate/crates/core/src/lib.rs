//! Total-variation image restoration with an alternating direction method
//! whose linear subproblems are generalized Sylvester equations, solved by
//! projection onto a growing matrix Krylov subspace.
//!
//! The observation model is `B = H₂ X H₁ᵀ + noise`. [`admm::solve_tvl1`] and
//! [`admm::solve_tvl2`] restore `X` under an `ℓ₁` or `ℓ₂` data term with
//! anisotropic or isotropic total variation.
//!
//! ```
//! use tv_gmks::{gaussian_toeplitz, solve_tvl2, DenseMatrix, SolverParams};
//!
//! let x = DenseMatrix::from_fn(16, 16, |i, j| if i > 4 && j > 6 { 1.0 } else { 0.0 });
//! let h = gaussian_toeplitz(1.0, 2, 16).unwrap();
//! let b = h.matmul(&x).unwrap().matmul(&h.transpose()).unwrap();
//! let (restored, trace) = solve_tvl2(&h, &h, &b, SolverParams::new(1e-3, 1.0, 1.0, 1e-4)).unwrap();
//! assert_eq!(restored.shape(), (16, 16));
//! assert!(trace.iterations() > 0);
//! ```

pub mod error;
pub mod gmks;
pub mod linalg;
pub mod operators;
pub mod prox;
pub mod admm;
pub mod experiments;

pub use admm::{
    multichannel_solve, solve_tvl1, solve_tvl2, AdmmSolver, ConvergenceTrace, Fidelity, IterationRecord,
    RestorationProblem, SolverParams, TvFlavor, UpdateOrder,
};
pub use error::{Error, Result};
pub use gmks::{expand_and_solve, BlockBasis, GmksSolution, GmksSolver};
pub use linalg::{DenseMatrix, GlobalQr};
pub use operators::{
    build_normal_operator, cross_channel_matrix, gaussian_toeplitz, separable_blur, Gradient, GradientPair,
    SylvesterOperator,
};
