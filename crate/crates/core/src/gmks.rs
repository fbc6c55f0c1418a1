//! Generalized matrix Krylov subspace solver for sequences of Sylvester
//! equations `A(X) = Eₖ` sharing one operator.
//!
//! The first equation is handled by a few steps of the modified global
//! Arnoldi process. Every later equation appends one block to the basis, the
//! normalized residual of the previous iterate, and re-solves the projected
//! least-squares problem through an incrementally updated global QR
//! factorization of the applied blocks `[A(V₁), …, A(Vₖ)]`.
//!
//! Only the blocks `Vᵢ` and the QR factors are stored; images `A(Vᵢ)` are
//! recovered as `Q (R ⊗ I)` when needed.
//!
//! Iterates live in the affine space `X₀ + span(V₁, …, Vₖ)` where the anchor
//! `X₀` is the initial guess (zero gives the plain span).

use crate::error::{dim_err, Error, Result};
use crate::linalg::{dot, DenseMatrix, GlobalQr, RANK_TOLERANCE};
use crate::operators::SylvesterOperator;

/// Expansion is skipped when `‖Pₖ‖_F ≤ EXPANSION_TOLERANCE · ‖Eₖ‖_F`.
pub const EXPANSION_TOLERANCE: f64 = 1e-12;

/// Default cap on the basis dimension before a restart.
pub const DEFAULT_MAX_BASIS: usize = 400;

/// An approximate solution of `A(X) = E`.
#[derive(Debug, Clone)]
pub struct GmksSolution {
    pub x: DenseMatrix,
    /// Coordinates of `x − anchor` in the basis blocks.
    pub coefficients: Vec<f64>,
    /// `‖A(x) − E‖_F`.
    pub residual_norm: f64,
    /// `A(x)`, kept so the next residual needs no operator application.
    pub image: DenseMatrix,
    /// Whether this solve grew the basis.
    pub expanded: bool,
}

/// F-orthonormal basis with the global QR factorization of its images.
#[derive(Debug, Clone)]
pub struct BlockBasis {
    anchor: DenseMatrix,
    anchor_image: DenseMatrix,
    blocks: Vec<DenseMatrix>,
    qr: GlobalQr,
    max_dim: usize,
    restarts: usize,
}

impl BlockBasis {
    /// Empty basis around `anchor`, whose image under the operator is
    /// `anchor_image`.
    pub fn new(anchor: DenseMatrix, anchor_image: DenseMatrix) -> Self {
        BlockBasis {
            anchor,
            anchor_image,
            blocks: Vec::new(),
            qr: GlobalQr::new(),
            max_dim: DEFAULT_MAX_BASIS,
            restarts: 0,
        }
    }

    /// Empty basis anchored at zero.
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self::new(DenseMatrix::zeros(rows, cols), DenseMatrix::zeros(rows, cols))
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim.max(1);
        self
    }

    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    /// `A(Vᵢ)` reconstructed from the QR factors.
    pub fn applied_blocks(&self) -> Vec<DenseMatrix> {
        (0..self.dim())
            .map(|j| {
                let mut col = self.qr.r_column(j).to_vec();
                col.resize(self.dim(), 0.0);
                self.qr.combine(&col).expect("factor is nonempty")
            })
            .collect()
    }

    pub fn qr(&self) -> &GlobalQr {
        &self.qr
    }

    pub fn anchor(&self) -> &DenseMatrix {
        &self.anchor
    }

    /// The zero-coefficient solution (the anchor itself).
    pub fn anchor_solution(&self, rhs: &DenseMatrix) -> GmksSolution {
        GmksSolution {
            x: self.anchor.clone(),
            coefficients: Vec::new(),
            residual_norm: (&self.anchor_image - rhs).frobenius_norm(),
            image: self.anchor_image.clone(),
            expanded: false,
        }
    }

    /// F-orthonormalizes `direction` against the basis and appends it
    /// together with its image. Returns `false` when the direction is
    /// (numerically) already in the span or its image is dependent on the
    /// existing images; the basis is then unchanged.
    pub fn try_append(&mut self, op: &SylvesterOperator, direction: &DenseMatrix) -> Result<bool> {
        if direction.shape() != self.anchor.shape() {
            return dim_err("expansion direction does not match basis shape");
        }
        let norm = direction.frobenius_norm();
        if !(norm > 0.0) {
            return Ok(false);
        }
        let mut v = direction.clone();
        for _ in 0..2 {
            for b in &self.blocks {
                let c = dot(b.as_slice(), v.as_slice());
                v.axpy(-c, b);
            }
        }
        let rem = v.frobenius_norm();
        if !(rem > RANK_TOLERANCE * norm) {
            return Ok(false);
        }
        v.scale_mut(1.0 / rem);
        let av = op.apply(&v)?;
        match self.qr.append(&av) {
            Ok(_) => {
                self.blocks.push(v);
                Ok(true)
            }
            Err(Error::RankDeficient { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Minimizes `‖A(X) − rhs‖_F` over `X ∈ anchor + span(blocks)`.
    pub fn solve(&self, rhs: &DenseMatrix) -> Result<GmksSolution> {
        if rhs.shape() != self.anchor_image.shape() {
            return dim_err("right-hand side does not match operator output");
        }
        let target = rhs - &self.anchor_image;
        if self.qr.is_empty() {
            return Ok(self.anchor_solution(rhs));
        }
        // A(x) − A(anchor) is the projection of the target onto range(Q)
        let projection = self.qr.project(&target);
        let coefficients = self.qr.solve_least_squares(&target)?;
        let mut x = self.anchor.clone();
        for (v, &c) in self.blocks.iter().zip(&coefficients) {
            x.axpy(c, v);
        }
        let mut image = self.qr.combine(&projection)?;
        image += &self.anchor_image;
        Ok(GmksSolution {
            residual_norm: (&image - rhs).frobenius_norm(),
            x,
            image,
            coefficients,
            expanded: false,
        })
    }

    fn restart(&mut self, anchor: &GmksSolution) {
        self.anchor = anchor.x.clone();
        self.anchor_image = anchor.image.clone();
        self.blocks.clear();
        self.qr = GlobalQr::new();
        self.restarts += 1;
    }
}

/// Output of [`global_arnoldi`].
#[derive(Debug, Clone)]
pub struct ArnoldiProcess {
    /// `V₁, …, V_{j+1}` (only `V₁, …, V_j` after a breakdown).
    pub blocks: Vec<DenseMatrix>,
    /// `A(V₁), …, A(V_j)`.
    pub applied: Vec<DenseMatrix>,
    /// `(j + 1) × j` upper Hessenberg matrix.
    pub hessenberg: DenseMatrix,
    pub p0_norm: f64,
    pub breakdown: bool,
}

impl ArnoldiProcess {
    pub fn steps(&self) -> usize {
        self.applied.len()
    }
}

/// Modified global Arnoldi: builds F-orthonormal `V₁ = p0/‖p0‖_F, V₂, …`
/// with `A(Vⱼ) = Σᵢ hᵢⱼ Vᵢ`. Stops early when a subdiagonal entry vanishes.
pub fn global_arnoldi(op: &SylvesterOperator, p0: &DenseMatrix, steps: usize) -> Result<ArnoldiProcess> {
    if steps == 0 {
        return Err(Error::Parameter("global Arnoldi needs at least one step".into()));
    }
    if p0.shape() != op.input_shape() || op.input_shape() != op.output_shape() {
        return dim_err("Arnoldi start block does not match a square operator");
    }
    let p0_norm = p0.frobenius_norm();
    if !(p0_norm > 0.0) {
        return Err(Error::Degenerate("Arnoldi start block is zero".into()));
    }
    let mut blocks = vec![p0.scaled(1.0 / p0_norm)];
    let mut applied = Vec::with_capacity(steps);
    let mut h = vec![vec![0.0; steps]; steps + 1];
    let mut breakdown = false;
    for j in 0..steps {
        let av = op.apply(&blocks[j])?;
        let scale = av.frobenius_norm();
        let mut w = av.clone();
        for (i, v) in blocks.iter().enumerate() {
            let c = dot(v.as_slice(), w.as_slice());
            h[i][j] = c;
            w.axpy(-c, v);
        }
        // second pass keeps the basis orthonormal to working precision
        for (i, v) in blocks.iter().enumerate() {
            let c = dot(v.as_slice(), w.as_slice());
            h[i][j] += c;
            w.axpy(-c, v);
        }
        applied.push(av);
        let sub = w.frobenius_norm();
        if !(sub > RANK_TOLERANCE * scale) {
            breakdown = true;
            h[j + 1][j] = 0.0;
            break;
        }
        h[j + 1][j] = sub;
        w.scale_mut(1.0 / sub);
        blocks.push(w);
    }
    let done = applied.len();
    let hessenberg = DenseMatrix::from_fn(done + 1, done, |i, j| h[i][j]);
    Ok(ArnoldiProcess {
        blocks,
        applied,
        hessenberg,
        p0_norm,
        breakdown,
    })
}

/// Solves `min ‖‖p0‖ e₁ − H y‖₂` with Givens rotations; returns `y` and the
/// minimal residual.
fn hessenberg_least_squares(h: &DenseMatrix, beta: f64) -> Result<(Vec<f64>, f64)> {
    let (rows, cols) = h.shape();
    let mut r = h.clone();
    let mut g = vec![0.0; rows];
    g[0] = beta;
    for j in 0..cols {
        let (a, b) = (r[(j, j)], r[(j + 1, j)]);
        let rad = a.hypot(b);
        if rad == 0.0 {
            continue;
        }
        let (c, s) = (a / rad, b / rad);
        for k in j..cols {
            let (x, y) = (r[(j, k)], r[(j + 1, k)]);
            r[(j, k)] = c * x + s * y;
            r[(j + 1, k)] = -s * x + c * y;
        }
        let (x, y) = (g[j], g[j + 1]);
        g[j] = c * x + s * y;
        g[j + 1] = -s * x + c * y;
    }
    let upper = DenseMatrix::from_fn(cols, cols, |i, j| r[(i, j)]);
    let y = crate::linalg::upper_triangular_solve(&upper, &g[..cols])?;
    let resid = g[cols..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((y, resid))
}

/// Completes the first solve from an Arnoldi run started at
/// `p0 = E − A(x0)`: `x = x0 + Σ yᵢ Vᵢ` with `y` minimizing the small
/// Hessenberg problem. Returns the basis (anchored at `x0`) for later
/// expansions together with the solution.
pub fn arnoldi_solve(
    arnoldi: &ArnoldiProcess,
    x0: &DenseMatrix,
    x0_image: &DenseMatrix,
) -> Result<(BlockBasis, GmksSolution)> {
    let (y, small_residual) = hessenberg_least_squares(&arnoldi.hessenberg, arnoldi.p0_norm)?;
    let mut basis = BlockBasis::new(x0.clone(), x0_image.clone());
    let mut x = x0.clone();
    let mut image = x0_image.clone();
    let mut coefficients = Vec::with_capacity(y.len());
    let mut all_accepted = true;
    for ((v, av), &c) in arnoldi.blocks.iter().zip(&arnoldi.applied).zip(&y) {
        x.axpy(c, v);
        image.axpy(c, av);
        if basis.qr.append(av).is_ok() {
            basis.blocks.push(v.clone());
            coefficients.push(c);
        } else {
            all_accepted = false;
        }
    }
    let solution = if all_accepted {
        GmksSolution {
            x,
            coefficients,
            residual_norm: small_residual,
            image,
            expanded: true,
        }
    } else {
        // a dependent image was dropped; re-solve on what the QR kept
        let mut rhs = arnoldi.blocks[0].scaled(arnoldi.p0_norm);
        rhs += x0_image;
        let mut s = basis.solve(&rhs)?;
        s.expanded = true;
        s
    };
    Ok((basis, solution))
}

/// One GMKS step for the equation `A(X) = rhs` given the previous iterate.
///
/// Forms `P = A(x_prev) − rhs`; unless `‖P‖_F ≤ 1e-12 ‖rhs‖_F` the
/// normalized residual is F-orthogonalized against the basis and appended.
/// The new iterate minimizes `‖A(X) − rhs‖_F` over the (possibly grown)
/// affine subspace. A basis at its dimension cap restarts from `prev`.
pub fn expand_and_solve(
    basis: &mut BlockBasis,
    op: &SylvesterOperator,
    rhs: &DenseMatrix,
    prev: &GmksSolution,
) -> Result<GmksSolution> {
    if !rhs.is_finite() {
        return Err(Error::Degenerate("right-hand side is not finite".into()));
    }
    let p = &prev.image - rhs;
    let mut expanded = false;
    if p.frobenius_norm() > EXPANSION_TOLERANCE * rhs.frobenius_norm() {
        if basis.dim() >= basis.max_dim {
            basis.restart(prev);
        }
        expanded = basis.try_append(op, &p)?;
    }
    let mut solution = basis.solve(rhs)?;
    solution.expanded = expanded;
    Ok(solution)
}

/// Options for [`GmksSolver`].
#[derive(Debug, Clone, Copy)]
pub struct GmksConfig {
    pub arnoldi_steps: usize,
    pub max_basis: usize,
}

impl Default for GmksConfig {
    fn default() -> Self {
        GmksConfig {
            arnoldi_steps: 1,
            max_basis: DEFAULT_MAX_BASIS,
        }
    }
}

/// Owns the operator, the growing basis and the latest iterate of a
/// sequence of solves.
#[derive(Debug, Clone)]
pub struct GmksSolver {
    op: SylvesterOperator,
    config: GmksConfig,
    basis: Option<BlockBasis>,
    last: Option<GmksSolution>,
}

impl GmksSolver {
    pub fn new(op: SylvesterOperator, config: GmksConfig) -> Self {
        GmksSolver {
            op,
            config,
            basis: None,
            last: None,
        }
    }

    pub fn operator(&self) -> &SylvesterOperator {
        &self.op
    }

    pub fn basis(&self) -> Option<&BlockBasis> {
        self.basis.as_ref()
    }

    pub fn last(&self) -> Option<&GmksSolution> {
        self.last.as_ref()
    }

    /// First equation: Arnoldi from the residual of `x0`.
    pub fn solve_initial(&mut self, rhs: &DenseMatrix, x0: &DenseMatrix) -> Result<&GmksSolution> {
        let x0_image = self.op.apply(x0)?;
        let r0 = rhs - &x0_image;
        let (basis, solution) = if r0.frobenius_norm() > EXPANSION_TOLERANCE * rhs.frobenius_norm() {
            let arnoldi = global_arnoldi(&self.op, &r0, self.config.arnoldi_steps)?;
            arnoldi_solve(&arnoldi, x0, &x0_image)?
        } else {
            let basis = BlockBasis::new(x0.clone(), x0_image);
            let s = basis.anchor_solution(rhs);
            (basis, s)
        };
        self.basis = Some(basis.with_max_dim(self.config.max_basis));
        Ok(self.last.insert(solution))
    }

    /// Later equations: one expansion and a projected solve.
    pub fn solve_next(&mut self, rhs: &DenseMatrix) -> Result<&GmksSolution> {
        let (Some(basis), Some(prev)) = (self.basis.as_mut(), self.last.as_ref()) else {
            return Err(Error::Degenerate("solve_next called before solve_initial".into()));
        };
        let s = expand_and_solve(basis, &self.op, rhs, prev)?;
        Ok(self.last.insert(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diamond_product, frobenius_inner};
    use crate::operators::{build_normal_operator, separable_blur, Gradient, SylvesterTerm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn spd_operator(n: usize, seed: u64) -> SylvesterOperator {
        let mut g = rng(seed);
        let h1 = &DenseMatrix::identity(n) + &DenseMatrix::random(n, n, &mut g).scaled(0.3);
        let h2 = &DenseMatrix::identity(n) + &DenseMatrix::random(n, n, &mut g).scaled(0.3);
        build_normal_operator(&separable_blur(&h1, &h2).unwrap(), &Gradient::new(n, n).unwrap(), 0.5, 1.0)
            .unwrap()
    }

    #[test]
    fn arnoldi_breaks_down_on_identity() {
        let op = SylvesterOperator::identity(3, 3);
        let p0 = DenseMatrix::random(3, 3, &mut rng(1));
        let a = global_arnoldi(&op, &p0, 3).unwrap();
        assert!(a.breakdown);
        assert_eq!(a.steps(), 1);
        assert_eq!(a.hessenberg.shape(), (2, 1));
        assert!((a.hessenberg[(0, 0)] - 1.0).abs() < 1e-14);
        assert_eq!(a.hessenberg[(1, 0)], 0.0);
    }

    #[test]
    fn arnoldi_rejects_zero_start() {
        let op = SylvesterOperator::identity(2, 2);
        assert!(matches!(
            global_arnoldi(&op, &DenseMatrix::zeros(2, 2), 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn arnoldi_relation_and_definition() {
        let op = spd_operator(5, 2);
        let p0 = DenseMatrix::random(5, 5, &mut rng(3));
        let a = global_arnoldi(&op, &p0, 4).unwrap();
        assert_eq!(a.steps(), 4);
        let gram = diamond_product(&a.blocks, &a.blocks).unwrap();
        assert!((&gram - &DenseMatrix::identity(5)).max_abs() < 1e-10);
        for j in 0..4 {
            let av = op.apply(&a.blocks[j]).unwrap();
            let mut rebuilt = DenseMatrix::zeros(5, 5);
            for i in 0..=j + 1 {
                rebuilt.axpy(a.hessenberg[(i, j)], &a.blocks[i]);
                let def = frobenius_inner(&a.blocks[i], &av).unwrap();
                assert!((def - a.hessenberg[(i, j)]).abs() < 1e-10);
            }
            assert!((&av - &rebuilt).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn arnoldi_solve_exact_for_scaled_identity() {
        let op = SylvesterOperator::new(vec![SylvesterTerm::dense(
            DenseMatrix::identity(3).scaled(2.5),
            DenseMatrix::identity(3),
        )])
        .unwrap();
        let e = DenseMatrix::random(3, 3, &mut rng(4));
        let x0 = DenseMatrix::zeros(3, 3);
        let a = global_arnoldi(&op, &e, 1).unwrap();
        let (_, s) = arnoldi_solve(&a, &x0, &x0).unwrap();
        assert!(s.residual_norm < 1e-14);
        assert!((&s.x - &e.scaled(0.4)).max_abs() < 1e-14);
    }

    #[test]
    fn arnoldi_residual_matches_direct() {
        let op = spd_operator(6, 5);
        let mut g = rng(6);
        let e = DenseMatrix::random(6, 6, &mut g);
        let x0 = DenseMatrix::random(6, 6, &mut g);
        let image = op.apply(&x0).unwrap();
        let a = global_arnoldi(&op, &(&e - &image), 3).unwrap();
        let (basis, s) = arnoldi_solve(&a, &x0, &image).unwrap();
        let direct = (&op.apply(&s.x).unwrap() - &e).frobenius_norm();
        assert!((direct - s.residual_norm).abs() < 1e-10);
        assert_eq!(basis.dim(), 3);
        // same minimizer as the projected solve over the Arnoldi blocks
        let again = basis.solve(&e).unwrap();
        assert!((&again.x - &s.x).frobenius_norm() < 1e-10);
    }

    #[test]
    fn no_expansion_when_already_optimal() {
        let op = spd_operator(4, 7);
        let mut basis = BlockBasis::empty(4, 4);
        let x = DenseMatrix::random(4, 4, &mut rng(8));
        basis.try_append(&op, &x).unwrap();
        let prev = basis.solve(&op.apply(&x).unwrap()).unwrap();
        let e = prev.image.clone();
        let s = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
        assert!(!s.expanded);
        assert_eq!(basis.dim(), 1);
        assert!((&s.x - &prev.x).frobenius_norm() < 1e-12);
    }

    #[test]
    fn residual_monotone_and_basis_orthonormal() {
        let op = spd_operator(5, 9);
        let e = DenseMatrix::random(5, 5, &mut rng(10));
        let mut basis = BlockBasis::empty(5, 5);
        let mut prev = basis.anchor_solution(&e);
        let mut last = prev.residual_norm;
        for _ in 0..10 {
            prev = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
            assert!(prev.residual_norm <= last * (1.0 + 1e-12));
            last = prev.residual_norm;
            let gram = diamond_product(basis.blocks(), basis.blocks()).unwrap();
            assert!((&gram - &DenseMatrix::identity(basis.dim())).max_abs() < 1e-10);
        }
    }

    #[test]
    fn residual_is_orthogonal_to_applied_blocks() {
        let op = spd_operator(8, 11);
        let e = DenseMatrix::random(8, 8, &mut rng(12));
        let mut basis = BlockBasis::empty(8, 8);
        let mut prev = basis.anchor_solution(&e);
        for _ in 0..3 {
            prev = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
        }
        let resid = &prev.image - &e;
        for av in basis.applied_blocks() {
            assert!(frobenius_inner(&resid, &av).unwrap().abs() < 1e-8 * e.frobenius_norm());
        }
    }

    #[test]
    fn reconstructed_images_match_operator() {
        let op = spd_operator(6, 19);
        let e = DenseMatrix::random(6, 6, &mut rng(20));
        let mut basis = BlockBasis::empty(6, 6);
        let mut prev = basis.anchor_solution(&e);
        for _ in 0..4 {
            prev = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
        }
        for (v, av) in basis.blocks().iter().zip(basis.applied_blocks()) {
            let direct = op.apply(v).unwrap();
            assert!((&direct - &av).frobenius_norm() < 1e-12 * direct.frobenius_norm());
        }
        assert!((&prev.image - &op.apply(&prev.x).unwrap()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn matches_dense_projected_least_squares() {
        let n = 8;
        let op = spd_operator(n, 21);
        let e = DenseMatrix::random(n, n, &mut rng(22));
        let mut basis = BlockBasis::empty(n, n);
        let mut prev = basis.anchor_solution(&e);
        for _ in 0..3 {
            prev = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
        }
        // dense oracle: normal equations (AV)ᵀ(AV) y = (AV)ᵀ vec(E) via Gaussian elimination
        let cols: Vec<Vec<f64>> = basis.blocks().iter().map(|v| crate::linalg::vectorize(&op.apply(v).unwrap())).collect();
        let k = cols.len();
        let ev = crate::linalg::vectorize(&e);
        let mut g = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                g[i][j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            }
            g[i][k] = cols[i].iter().zip(&ev).map(|(a, b)| a * b).sum();
        }
        for p in 0..k {
            for r in p + 1..k {
                let f = g[r][p] / g[p][p];
                for c in p..=k {
                    g[r][c] -= f * g[p][c];
                }
            }
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| g[i][j] * y[j]).sum();
            y[i] = (g[i][k] - s) / g[i][i];
        }
        let mut x = DenseMatrix::zeros(n, n);
        for (v, &c) in basis.blocks().iter().zip(&y) {
            x.axpy(c, v);
        }
        assert!((&x - &prev.x).frobenius_norm() < 1e-8 * x.frobenius_norm());
    }

    #[test]
    fn cap_triggers_restart() {
        let op = spd_operator(4, 13);
        let e = DenseMatrix::random(4, 4, &mut rng(14));
        let mut basis = BlockBasis::empty(4, 4).with_max_dim(3);
        let mut prev = basis.anchor_solution(&e);
        let mut last = prev.residual_norm;
        for _ in 0..8 {
            prev = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
            assert!(basis.dim() <= 3);
            assert!(prev.residual_norm <= last * (1.0 + 1e-10));
            last = prev.residual_norm;
        }
        assert!(basis.restarts() >= 1);
    }

    #[test]
    fn full_basis_stops_growing() {
        let op = spd_operator(2, 15);
        let e = DenseMatrix::random(2, 2, &mut rng(16));
        let mut basis = BlockBasis::empty(2, 2);
        let mut prev = basis.anchor_solution(&e);
        for _ in 0..4 {
            prev = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
        }
        assert_eq!(basis.dim(), 4);
        assert!(prev.residual_norm < 1e-12);
        let again = expand_and_solve(&mut basis, &op, &e, &prev).unwrap();
        let thrice = expand_and_solve(&mut basis, &op, &e, &again).unwrap();
        assert_eq!(basis.dim(), 4);
        assert!(!thrice.expanded);
    }

    #[test]
    fn solver_sequence_tracks_changing_rhs() {
        let op = spd_operator(6, 17);
        let mut g = rng(18);
        let mut solver = GmksSolver::new(op.clone(), GmksConfig::default());
        let x0 = DenseMatrix::random(6, 6, &mut g);
        let e0 = DenseMatrix::random(6, 6, &mut g);
        let first = solver.solve_initial(&e0, &x0).unwrap().clone();
        assert!(first.residual_norm < (&op.apply(&x0).unwrap() - &e0).frobenius_norm());
        let e1 = &e0 + &DenseMatrix::random(6, 6, &mut g).scaled(0.01);
        let next = solver.solve_next(&e1).unwrap();
        assert!(next.expanded);
        assert_eq!(solver.basis().unwrap().dim(), 2);
        assert!(GmksSolver::new(op, GmksConfig::default()).solve_next(&e1).is_err());
    }
}
