//! Alternating direction solvers for TV/L2 and TV/L1 restoration.
//!
//! Both solvers split `Y = D(X)` (and `R = H(X)` for the L1 fidelity),
//! update the split variables by shrinkage, ascend the multipliers, and
//! solve the X-subproblem
//!
//! ```text
//! (ρ HᵀH + β DᵀD)(X) = Hᵀ(ρR − W) + Dᵀ(βY − Z)
//! ```
//!
//! with a generalized matrix Krylov subspace that grows by one block per
//! iteration (`ρ = 1`, `R = B`, `W = 0` for TV/L2).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{dim_err, param_err, Error, Result};
use crate::gmks::{GmksConfig, GmksSolver, DEFAULT_MAX_BASIS};
use crate::linalg::DenseMatrix;
use crate::operators::{
    build_normal_operator, multichannel_blur, separable_blur, Gradient, GradientPair,
    SylvesterOperator,
};
use crate::prox::{shrink_anisotropic, shrink_isotropic, shrink_l1_residual};

/// Discrete total variation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TvFlavor {
    /// TV₁: `Σ |∂ᵥx| + |∂ₕx|`.
    #[default]
    Anisotropic,
    /// TV₂: `Σ √(∂ᵥx² + ∂ₕx²)`.
    Isotropic,
}

impl TvFlavor {
    pub fn label(self) -> &'static str {
        match self {
            TvFlavor::Anisotropic => "aniso",
            TvFlavor::Isotropic => "iso",
        }
    }

    /// `TV(D x)` from a precomputed gradient.
    pub fn value(self, g: &GradientPair) -> f64 {
        let v = g.vertical.iter();
        let h = g.horizontal.iter();
        match self {
            TvFlavor::Anisotropic => v.zip(h).map(|(a, b)| a.abs() + b.abs()).sum(),
            TvFlavor::Isotropic => v.zip(h).map(|(a, b)| a.hypot(b)).sum(),
        }
    }

    pub fn shrink(self, k: &DenseMatrix, l: &DenseMatrix, threshold: f64) -> Result<GradientPair> {
        match self {
            TvFlavor::Anisotropic => shrink_anisotropic(k, l, threshold),
            TvFlavor::Isotropic => shrink_isotropic(k, l, threshold),
        }
    }
}

impl fmt::Display for TvFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TvFlavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aniso" | "anisotropic" | "tv1" => Ok(TvFlavor::Anisotropic),
            "iso" | "isotropic" | "tv2" => Ok(TvFlavor::Isotropic),
            _ => Err(Error::Parameter(format!("unknown TV flavor '{s}'"))),
        }
    }
}

/// Data fidelity of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fidelity {
    /// `‖H(X) − B‖₁` (impulsive noise).
    #[default]
    L1,
    /// `‖H(X) − B‖²_F` (Gaussian noise).
    L2,
}

impl Fidelity {
    pub fn label(self) -> &'static str {
        match self {
            Fidelity::L1 => "tvl1",
            Fidelity::L2 => "tvl2",
        }
    }

    pub fn value(self, residual: &DenseMatrix) -> f64 {
        match self {
            Fidelity::L1 => residual.iter().map(f64::abs).sum(),
            Fidelity::L2 => residual.iter().map(|v| v * v).sum(),
        }
    }
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tvl1" | "l1" => Ok(Fidelity::L1),
            "tvl2" | "l2" => Ok(Fidelity::L2),
            _ => Err(Error::Parameter(format!("unknown mode '{s}'"))),
        }
    }
}

/// Order of the updates inside one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    /// Shrink, multipliers, then the X-solve (the X₁ solve happens before
    /// the loop).
    #[default]
    ShrinkFirst,
    /// X-solve, shrink, then multipliers.
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub mu: f64,
    pub beta: f64,
    /// Residual penalty; ignored by TV/L2.
    pub rho: f64,
    /// Stop once `‖X_{k+1} − X_k‖_F / ‖X_k‖_F < epsilon`.
    pub epsilon: f64,
    pub tv: TvFlavor,
    pub max_iter: usize,
    pub arnoldi_steps: usize,
    pub max_basis: usize,
    pub order: UpdateOrder,
    /// Record wall-clock time in the trace; off gives reproducible traces.
    pub record_time: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            mu: 0.1,
            beta: 50.0,
            rho: 5.0,
            epsilon: 1e-3,
            tv: TvFlavor::Anisotropic,
            max_iter: 500,
            arnoldi_steps: 1,
            max_basis: DEFAULT_MAX_BASIS,
            order: UpdateOrder::ShrinkFirst,
            record_time: true,
        }
    }
}

impl SolverParams {
    pub fn new(mu: f64, beta: f64, rho: f64, epsilon: f64) -> Self {
        SolverParams {
            mu,
            beta,
            rho,
            epsilon,
            ..Default::default()
        }
    }

    pub fn with_tv(mut self, tv: TvFlavor) -> Self {
        self.tv = tv;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self, fidelity: Fidelity) -> Result<()> {
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return param_err(format!("mu must be nonnegative, got {}", self.mu));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return param_err(format!("beta must be positive, got {}", self.beta));
        }
        if fidelity == Fidelity::L1 && (!(self.rho > 0.0) || !self.rho.is_finite()) {
            return param_err(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.epsilon >= 0.0) {
            return param_err(format!("epsilon must be nonnegative, got {}", self.epsilon));
        }
        if self.max_iter == 0 || self.arnoldi_steps == 0 || self.max_basis == 0 {
            return param_err("max_iter, arnoldi_steps and max_basis must be at least 1");
        }
        Ok(())
    }

    fn penalty_rho(&self, fidelity: Fidelity) -> f64 {
        match fidelity {
            Fidelity::L1 => self.rho,
            Fidelity::L2 => 1.0,
        }
    }
}

/// Iterate bundle of the splitting.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub x: DenseMatrix,
    pub y: GradientPair,
    pub z: GradientPair,
    /// Split residual variable (TV/L1 only).
    pub r: Option<DenseMatrix>,
    /// Its multiplier (TV/L1 only).
    pub w: Option<DenseMatrix>,
    pub iter: usize,
}

impl AdmmState {
    fn is_finite(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && self.r.as_ref().is_none_or(DenseMatrix::is_finite)
            && self.w.as_ref().is_none_or(DenseMatrix::is_finite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    /// `‖D(X_k) − Y_k‖_F`.
    pub primal_d: f64,
    /// `‖H(X_k) − R_k‖_F` (TV/L1 only).
    pub primal_h: Option<f64>,
    pub rel_change: f64,
    /// `‖A(X_{k+1}) − E_k‖_F`.
    pub sylvester_residual: f64,
    pub elapsed_s: f64,
    /// `⟨Y_k − Y_{k−1}, Z_k − Z_{k−1}⟩_F` from the second iteration on.
    pub multiplier_inner: Option<f64>,
    pub basis_dim: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl ConvergenceTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn first(&self) -> Option<&IterationRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

/// A restoration problem `B ≈ H(X)` with gradient `D`.
#[derive(Debug, Clone)]
pub struct RestorationProblem {
    pub blur: SylvesterOperator,
    pub gradient: Gradient,
    pub b: DenseMatrix,
}

impl RestorationProblem {
    pub fn new(blur: SylvesterOperator, gradient: Gradient, b: DenseMatrix) -> Result<Self> {
        let shape = b.shape();
        if blur.input_shape() != shape || blur.output_shape() != shape {
            return dim_err("blur operator does not act on the observed image shape");
        }
        if gradient.image_shape() != shape {
            return dim_err("gradient does not act on the observed image shape");
        }
        if !b.is_finite() {
            return Err(Error::Degenerate("observed image is not finite".into()));
        }
        Ok(RestorationProblem { blur, gradient, b })
    }

    /// Single-channel separable blur `H₂ X H₁ᵀ`.
    pub fn separable(h1: &DenseMatrix, h2: &DenseMatrix, b: DenseMatrix) -> Result<Self> {
        let (m, n) = b.shape();
        Self::new(separable_blur(h1, h2)?, Gradient::new(m, n)?, b)
    }
}

/// Fidelity plus `μ TV(X)` with square-padded differences.
pub fn tv_objective(
    x: &DenseMatrix,
    blur: &SylvesterOperator,
    gradient: &Gradient,
    b: &DenseMatrix,
    mu: f64,
    tv: TvFlavor,
    fidelity: Fidelity,
) -> Result<f64> {
    let hx = blur.apply(x)?;
    if hx.shape() != b.shape() {
        return dim_err("observed image does not match blur output");
    }
    let dx = gradient.apply(x)?;
    Ok(fidelity.value(&(&hx - b)) + mu * tv.value(&dx))
}

/// Output of one solver run.
#[derive(Debug, Clone)]
pub struct AdmmOutput {
    pub state: AdmmState,
    pub trace: ConvergenceTrace,
}

impl AdmmOutput {
    pub fn x(&self) -> &DenseMatrix {
        &self.state.x
    }
}

/// Splitting solver bound to one problem and parameter set.
#[derive(Debug, Clone)]
pub struct AdmmSolver<'a> {
    problem: &'a RestorationProblem,
    params: SolverParams,
    fidelity: Fidelity,
    normal: SylvesterOperator,
    /// `Hᵀ(B)`, reused by every TV/L2 right-hand side.
    ht_b: DenseMatrix,
}

struct Cache {
    hx: DenseMatrix,
    dx: GradientPair,
}

impl<'a> AdmmSolver<'a> {
    pub fn new(problem: &'a RestorationProblem, params: SolverParams, fidelity: Fidelity) -> Result<Self> {
        params.validate(fidelity)?;
        let normal = build_normal_operator(
            &problem.blur,
            &problem.gradient,
            params.beta,
            params.penalty_rho(fidelity),
        )?;
        let ht_b = problem.blur.adjoint_apply(&problem.b)?;
        Ok(AdmmSolver {
            problem,
            params,
            fidelity,
            normal,
            ht_b,
        })
    }

    pub fn normal_operator(&self) -> &SylvesterOperator {
        &self.normal
    }

    /// `X₀ = B`, `Y₀ = D(X₀)`, `Z₀ = 0`, and `R₀ = B`, `W₀ = 0` for TV/L1.
    pub fn initial_state(&self) -> Result<AdmmState> {
        let b = &self.problem.b;
        let (m, n) = b.shape();
        let l1 = self.fidelity == Fidelity::L1;
        Ok(AdmmState {
            x: b.clone(),
            y: self.problem.gradient.apply(b)?,
            z: GradientPair::zeros(m, n),
            r: l1.then(|| b.clone()),
            w: l1.then(|| DenseMatrix::zeros(m, n)),
            iter: 0,
        })
    }

    pub fn solve(&self) -> Result<AdmmOutput> {
        self.run(self.initial_state()?)
    }

    /// `E = Hᵀ(ρR − W) + Dᵀ(βY − Z)`.
    fn rhs(&self, s: &AdmmState) -> Result<DenseMatrix> {
        let beta = self.params.beta;
        let mut split = s.y.clone();
        split.vertical.scale_mut(beta);
        split.horizontal.scale_mut(beta);
        split.axpy(-1.0, &s.z);
        let mut e = self.problem.gradient.adjoint_apply(&split)?;
        match (&s.r, &s.w) {
            (Some(r), Some(w)) => {
                let mut t = r.scaled(self.params.rho);
                t -= w;
                e += &self.problem.blur.adjoint_apply(&t)?;
            }
            _ => e += &self.ht_b,
        }
        Ok(e)
    }

    /// Shrinkage and multiplier updates at the current X. Returns
    /// `(‖DX − Y‖, ‖HX − R‖)`.
    fn split_step(&self, s: &mut AdmmState, c: &Cache) -> Result<(f64, Option<f64>)> {
        let p = &self.params;
        let mut primal_h = None;
        if let (Some(r), Some(w)) = (s.r.as_mut(), s.w.as_mut()) {
            *r = shrink_l1_residual(&c.hx, &self.problem.b, w, p.rho)?;
            let gap = &c.hx - r;
            w.axpy(p.rho, &gap);
            primal_h = Some(gap.frobenius_norm());
        }
        let k = &c.dx.vertical + &s.z.vertical.scaled(1.0 / p.beta);
        let l = &c.dx.horizontal + &s.z.horizontal.scaled(1.0 / p.beta);
        s.y = p.tv.shrink(&k, &l, p.mu / p.beta)?;
        let gap = c.dx.difference(&s.y);
        s.z.axpy(p.beta, &gap);
        Ok((gap.frobenius_norm(), primal_h))
    }

    fn cache(&self, x: &DenseMatrix) -> Result<Cache> {
        Ok(Cache {
            hx: self.problem.blur.apply(x)?,
            dx: self.problem.gradient.apply(x)?,
        })
    }

    fn objective(&self, c: &Cache) -> f64 {
        self.fidelity.value(&(&c.hx - &self.problem.b)) + self.params.mu * self.params.tv.value(&c.dx)
    }

    /// Runs the iteration from `state` until the relative change drops
    /// below `epsilon` or `max_iter` iterations have completed.
    pub fn run(&self, mut state: AdmmState) -> Result<AdmmOutput> {
        let shape = self.problem.b.shape();
        if state.x.shape() != shape || state.y.shape() != shape || state.z.shape() != shape {
            return dim_err("state does not match the problem shape");
        }
        if state.r.is_some() != (self.fidelity == Fidelity::L1) || state.r.is_some() != state.w.is_some() {
            return Err(Error::Parameter("state split variables do not match the fidelity".into()));
        }
        let p = self.params;
        let start = Instant::now();
        let mut gmks = GmksSolver::new(
            self.normal.clone(),
            GmksConfig {
                arnoldi_steps: p.arnoldi_steps,
                max_basis: p.max_basis,
            },
        );
        let mut trace = ConvergenceTrace::default();
        let mut prev_yz: Option<(GradientPair, GradientPair)> = None;
        let mut cache = self.cache(&state.x)?;

        if p.order == UpdateOrder::ShrinkFirst {
            let e = self.rhs(&state)?;
            let x1 = gmks.solve_initial(&e, &state.x)?.x.clone();
            state.x = x1;
            cache = self.cache(&state.x)?;
        }

        for k in 1..=p.max_iter {
            let x_old = state.x.clone();
            let y_old = state.y.clone();
            let z_old = state.z.clone();
            let (primal_d, primal_h, sylvester_residual) = match p.order {
                UpdateOrder::ShrinkFirst => {
                    let (pd, ph) = self.split_step(&mut state, &cache)?;
                    let e = self.rhs(&state)?;
                    let sol = gmks.solve_next(&e)?;
                    state.x = sol.x.clone();
                    let res = sol.residual_norm;
                    cache = self.cache(&state.x)?;
                    (pd, ph, res)
                }
                UpdateOrder::Classic => {
                    let e = self.rhs(&state)?;
                    let sol = if k == 1 {
                        gmks.solve_initial(&e, &state.x)?
                    } else {
                        gmks.solve_next(&e)?
                    };
                    state.x = sol.x.clone();
                    let res = sol.residual_norm;
                    cache = self.cache(&state.x)?;
                    let (pd, ph) = self.split_step(&mut state, &cache)?;
                    (pd, ph, res)
                }
            };
            state.iter = k;
            if !state.is_finite() {
                return Err(Error::NumericFailure {
                    iteration: k,
                    trace: Box::new(trace),
                });
            }
            let multiplier_inner = prev_yz.as_ref().map(|_| {
                state.y.difference(&y_old).inner(&state.z.difference(&z_old))
            });
            prev_yz = Some((y_old, z_old));
            let old_norm = x_old.frobenius_norm();
            let change = (&state.x - &x_old).frobenius_norm();
            let rel_change = if old_norm > 0.0 { change / old_norm } else { change };
            trace.records.push(IterationRecord {
                iter: k,
                objective: self.objective(&cache),
                primal_d,
                primal_h,
                rel_change,
                sylvester_residual,
                elapsed_s: if p.record_time { start.elapsed().as_secs_f64() } else { 0.0 },
                multiplier_inner,
                basis_dim: gmks.basis().map_or(0, |b| b.dim()),
            });
            if rel_change < p.epsilon {
                trace.converged = true;
                break;
            }
        }
        Ok(AdmmOutput { state, trace })
    }
}

/// Runs a solver on a prepared problem.
pub fn solve(problem: &RestorationProblem, params: SolverParams, fidelity: Fidelity) -> Result<AdmmOutput> {
    AdmmSolver::new(problem, params, fidelity)?.solve()
}

/// TV/L2 restoration of `b ≈ H₂ X H₁ᵀ`.
pub fn solve_tvl2(
    h1: &DenseMatrix,
    h2: &DenseMatrix,
    b: &DenseMatrix,
    params: SolverParams,
) -> Result<(DenseMatrix, ConvergenceTrace)> {
    let problem = RestorationProblem::separable(h1, h2, b.clone())?;
    let out = solve(&problem, params, Fidelity::L2)?;
    Ok((out.state.x, out.trace))
}

/// TV/L1 restoration of `b ≈ H₂ X H₁ᵀ`.
pub fn solve_tvl1(
    h1: &DenseMatrix,
    h2: &DenseMatrix,
    b: &DenseMatrix,
    params: SolverParams,
) -> Result<(DenseMatrix, ConvergenceTrace)> {
    let problem = RestorationProblem::separable(h1, h2, b.clone())?;
    let out = solve(&problem, params, Fidelity::L1)?;
    Ok((out.state.x, out.trace))
}

/// Restored channels of a multichannel run.
#[derive(Debug, Clone)]
pub struct MultichannelOutput {
    pub channels: Vec<DenseMatrix>,
    /// One trace per independent solve (a single trace when coupled).
    pub traces: Vec<ConvergenceTrace>,
}

impl MultichannelOutput {
    /// Iterations of the slowest solve.
    pub fn iterations(&self) -> usize {
        self.traces.iter().map(ConvergenceTrace::iterations).max().unwrap_or(0)
    }
}

/// Restores `k` channels blurred by `Σ_d mix[c, d] · row_blur · X⁽ᵈ⁾ · col_blurᵀ`.
///
/// An identity `mix` (within-channel blur) decouples the channels, which
/// are then solved independently on parallel threads. Any other `mix`
/// couples them and the side-by-side `m × kn` system is solved at once.
pub fn multichannel_solve(
    mix: &DenseMatrix,
    row_blur: &DenseMatrix,
    col_blur: &DenseMatrix,
    channels: &[DenseMatrix],
    params: SolverParams,
    fidelity: Fidelity,
) -> Result<MultichannelOutput> {
    let k = channels.len();
    if k == 0 || mix.shape() != (k, k) {
        return dim_err(format!("mix is {:?} for {k} channels", mix.shape()));
    }
    let (m, n) = channels[0].shape();
    if channels.iter().any(|c| c.shape() != (m, n)) {
        return dim_err("channels differ in shape");
    }
    if row_blur.shape() != (m, m) || col_blur.shape() != (n, n) {
        return dim_err("spatial blur does not match channel shape");
    }
    params.validate(fidelity)?;

    if (mix - &DenseMatrix::identity(k)).max_abs() == 0.0 {
        let results: Vec<Result<AdmmOutput>> = std::thread::scope(|scope| {
            let handles: Vec<_> = channels
                .iter()
                .map(|b| {
                    scope.spawn(move || {
                        let problem = RestorationProblem::separable(col_blur, row_blur, b.clone())?;
                        solve(&problem, params, fidelity)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("channel solver panicked"))
                .collect()
        });
        let mut out = MultichannelOutput {
            channels: Vec::with_capacity(k),
            traces: Vec::with_capacity(k),
        };
        for r in results {
            let r = r?;
            out.channels.push(r.state.x);
            out.traces.push(r.trace);
        }
        return Ok(out);
    }

    let stacked = stack_channels(channels)?;
    let problem = RestorationProblem::new(
        multichannel_blur(mix, row_blur, col_blur)?,
        Gradient::multichannel(m, n, k)?,
        stacked,
    )?;
    let r = solve(&problem, params, fidelity)?;
    Ok(MultichannelOutput {
        channels: split_channels(&r.state.x, k)?,
        traces: vec![r.trace],
    })
}

/// `[X⁽¹⁾, …, X⁽ᵏ⁾]` side by side.
pub fn stack_channels(channels: &[DenseMatrix]) -> Result<DenseMatrix> {
    let Some(first) = channels.first() else {
        return dim_err("no channels");
    };
    let (m, n) = first.shape();
    if channels.iter().any(|c| c.shape() != (m, n)) {
        return dim_err("channels differ in shape");
    }
    Ok(DenseMatrix::from_fn(m, n * channels.len(), |i, j| channels[j / n][(i, j % n)]))
}

/// Inverse of [`stack_channels`].
pub fn split_channels(stacked: &DenseMatrix, k: usize) -> Result<Vec<DenseMatrix>> {
    let total = stacked.cols();
    if k == 0 || total % k != 0 {
        return dim_err(format!("cannot split {total} columns into {k} channels"));
    }
    let n = total / k;
    Ok((0..k).map(|c| stacked.column_block(c * n, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matricize, vectorize};
    use crate::operators::{cross_channel_matrix, gaussian_toeplitz, kron};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mild_blur(n: usize) -> DenseMatrix {
        // diagonally dominant, well conditioned
        let mut h = gaussian_toeplitz(0.6, 1, n).unwrap();
        h.scale_mut(1.0 / h[(1, 1)]);
        h
    }

    #[test]
    fn objective_zero_for_constant_exact_data() {
        let x = DenseMatrix::filled(5, 4, 0.7);
        let blur = SylvesterOperator::identity(5, 4);
        let g = Gradient::new(5, 4).unwrap();
        for tv in [TvFlavor::Anisotropic, TvFlavor::Isotropic] {
            for fid in [Fidelity::L1, Fidelity::L2] {
                assert_eq!(tv_objective(&x, &blur, &g, &x, 3.0, tv, fid).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn objective_step_column_image() {
        let (m, n, h, mu) = (6, 5, 0.8, 2.0);
        let x = DenseMatrix::from_fn(m, n, |_, j| if j >= 2 { h } else { 0.0 });
        let blur = SylvesterOperator::identity(m, n);
        let g = Gradient::new(m, n).unwrap();
        let v = tv_objective(&x, &blur, &g, &x, mu, TvFlavor::Anisotropic, Fidelity::L2).unwrap();
        assert!((v - mu * m as f64 * h).abs() < 1e-12);
    }

    #[test]
    fn objective_matches_double_loop() {
        let mut g = rng(1);
        let (m, n) = (6, 7);
        let x = DenseMatrix::random(m, n, &mut g);
        let b = DenseMatrix::random(m, n, &mut g);
        let h1 = DenseMatrix::random(n, n, &mut g);
        let h2 = DenseMatrix::random(m, m, &mut g);
        let blur = separable_blur(&h1, &h2).unwrap();
        let grad = Gradient::new(m, n).unwrap();
        let hx = h2.matmul(&x).unwrap().matmul(&h1.transpose()).unwrap();
        let (mut l1, mut l2, mut tv1, mut tv2) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..m {
            for j in 0..n {
                let r: f64 = hx[(i, j)] - b[(i, j)];
                l1 += r.abs();
                l2 += r * r;
                let dv = if i + 1 < m { x[(i + 1, j)] - x[(i, j)] } else { 0.0 };
                let dh = if j + 1 < n { x[(i, j + 1)] - x[(i, j)] } else { 0.0 };
                tv1 += dv.abs() + dh.abs();
                tv2 += (dv * dv + dh * dh).sqrt();
            }
        }
        let mu = 0.3;
        let cases = [
            (TvFlavor::Anisotropic, Fidelity::L1, l1 + mu * tv1),
            (TvFlavor::Isotropic, Fidelity::L1, l1 + mu * tv2),
            (TvFlavor::Anisotropic, Fidelity::L2, l2 + mu * tv1),
            (TvFlavor::Isotropic, Fidelity::L2, l2 + mu * tv2),
        ];
        for (tv, fid, want) in cases {
            let got = tv_objective(&x, &blur, &grad, &b, mu, tv, fid).unwrap();
            assert!((got - want).abs() < 1e-10 * want);
        }
    }

    #[test]
    fn parsing_and_validation() {
        assert_eq!("iso".parse::<TvFlavor>().unwrap(), TvFlavor::Isotropic);
        assert_eq!("tvl2".parse::<Fidelity>().unwrap(), Fidelity::L2);
        assert!("foo".parse::<TvFlavor>().is_err());
        let mut p = SolverParams::default();
        p.rho = 0.0;
        assert!(p.validate(Fidelity::L1).is_err());
        assert!(p.validate(Fidelity::L2).is_ok());
        p.beta = -1.0;
        assert!(p.validate(Fidelity::L2).is_err());
        assert!(SolverParams::default().with_max_iter(0).validate(Fidelity::L2).is_err());
    }

    #[test]
    fn noise_free_tvl2_recovers_truth() {
        let n = 8;
        let h = mild_blur(n);
        let xhat = DenseMatrix::random(n, n, &mut rng(2));
        let b = h.matmul(&xhat).unwrap().matmul(&h.transpose()).unwrap();
        let params = SolverParams::new(1e-12, 1e-3, 1.0, 1e-12).with_max_iter(400);
        let (x, trace) = solve_tvl2(&h, &h, &b, params).unwrap();
        assert!((&x - &xhat).frobenius_norm() / xhat.frobenius_norm() < 1e-3);
        assert!(trace.iterations() >= 1);
    }

    #[test]
    fn zero_mu_tvl2_is_least_squares() {
        let n = 6;
        let mut g = rng(3);
        let h = mild_blur(n);
        let b = DenseMatrix::random(n, n, &mut g);
        let params = SolverParams::new(0.0, 1e-3, 1.0, 1e-13).with_max_iter(400);
        let (x, _) = solve_tvl2(&h, &h, &b, params).unwrap();
        // dense normal equations: (H⊗H)ᵀ(H⊗H) vec X = (H⊗H)ᵀ vec B
        let k = kron(&h, &h);
        let lhs = k.transpose_matmul(&k).unwrap();
        let rhs = k.transpose_matmul(&matricize(&vectorize(&b), n * n, 1).unwrap()).unwrap();
        let resid = &lhs.matmul(&matricize(&vectorize(&x), n * n, 1).unwrap()).unwrap() - &rhs;
        assert!(resid.frobenius_norm() < 1e-6 * rhs.frobenius_norm());
    }

    #[test]
    fn tvl1_fixed_point() {
        let n = 8;
        let h = mild_blur(n);
        let xhat = DenseMatrix::filled(n, n, 0.4);
        let b = h.matmul(&xhat).unwrap().matmul(&h.transpose()).unwrap();
        let problem = RestorationProblem::separable(&h, &h, b.clone()).unwrap();
        let params = SolverParams::new(0.1, 10.0, 5.0, 0.0).with_max_iter(1);
        let solver = AdmmSolver::new(&problem, params, Fidelity::L1).unwrap();
        let state = AdmmState {
            x: xhat.clone(),
            y: GradientPair::zeros(n, n),
            z: GradientPair::zeros(n, n),
            r: Some(b),
            w: Some(DenseMatrix::zeros(n, n)),
            iter: 0,
        };
        let out = solver.run(state).unwrap();
        assert_eq!(out.trace.iterations(), 1);
        assert!(out.trace.records[0].rel_change < 1e-10);
    }

    #[test]
    fn runs_are_deterministic() {
        let n = 10;
        let h = mild_blur(n);
        let b = DenseMatrix::random(n, n, &mut rng(4));
        let mut params = SolverParams::new(0.05, 5.0, 2.0, 1e-4).with_max_iter(30);
        params.record_time = false;
        let a = solve_tvl1(&h, &h, &b, params).unwrap();
        let c = solve_tvl1(&h, &h, &b, params).unwrap();
        assert_eq!(a.0, c.0);
        assert_eq!(a.1, c.1);
    }

    #[test]
    fn update_orders_give_same_iterates() {
        let n = 9;
        let h = mild_blur(n);
        let b = DenseMatrix::random(n, n, &mut rng(5));
        for fid in [Fidelity::L1, Fidelity::L2] {
            let mut p = SolverParams::new(0.1, 4.0, 3.0, 0.0).with_max_iter(6);
            let problem = RestorationProblem::separable(&h, &h, b.clone()).unwrap();
            let shrink_first = solve(&problem, p, fid).unwrap();
            p.order = UpdateOrder::Classic;
            p.max_iter = 7;
            let classic = solve(&problem, p, fid).unwrap();
            // classic iteration k+1 produces X_{k+1} from the same (Y_k, Z_k)
            assert!((shrink_first.x() - classic.x()).frobenius_norm() < 1e-12 * shrink_first.x().frobenius_norm());
        }
    }

    #[test]
    fn tvl2_multiplier_monotonicity() {
        let n = 12;
        let h = mild_blur(n);
        let b = DenseMatrix::random(n, n, &mut rng(6));
        for tv in [TvFlavor::Anisotropic, TvFlavor::Isotropic] {
            let params = SolverParams::new(0.05, 3.0, 1.0, 1e-6).with_tv(tv).with_max_iter(60);
            let (_, trace) = solve_tvl2(&h, &h, &b, params).unwrap();
            assert!(trace.records[0].multiplier_inner.is_none());
            for r in &trace.records[1..] {
                assert!(r.multiplier_inner.unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn primal_residuals_decay() {
        let n = 16;
        let h = mild_blur(n);
        let xhat = DenseMatrix::from_fn(n, n, |i, j| if (4..11).contains(&i) && j > 5 { 0.9 } else { 0.2 });
        let mut b = h.matmul(&xhat).unwrap().matmul(&h.transpose()).unwrap();
        for (i, j) in [(1, 2), (7, 7), (12, 3), (14, 14), (3, 11)] {
            b[(i, j)] = if (i + j) % 2 == 0 { 1.0 } else { 0.0 };
        }
        let params = SolverParams::new(0.05, 20.0, 5.0, 1e-6).with_max_iter(1000);
        let (_, trace) = solve_tvl1(&h, &h, &b, params).unwrap();
        let (first, last) = (trace.first().unwrap(), trace.last().unwrap());
        assert!(last.primal_d < 0.01 * first.primal_d);
        assert!(last.primal_h.unwrap() < 0.01 * first.primal_h.unwrap());
    }

    #[test]
    fn single_channel_multichannel_reduces() {
        let n = 7;
        let h = mild_blur(n);
        let b = DenseMatrix::random(n, n, &mut rng(8));
        let mut params = SolverParams::new(0.05, 5.0, 2.0, 1e-4).with_max_iter(25);
        params.record_time = false;
        let mc = multichannel_solve(&DenseMatrix::identity(1), &h, &h, &[b.clone()], params, Fidelity::L1).unwrap();
        let (x, trace) = solve_tvl1(&h, &h, &b, params).unwrap();
        assert_eq!(mc.channels[0], x);
        assert_eq!(mc.traces[0], trace);
    }

    #[test]
    fn cross_channel_noise_free_recovery() {
        let n = 6;
        let h = mild_blur(n);
        let mix = cross_channel_matrix();
        let mut g = rng(9);
        let truth: Vec<DenseMatrix> = (0..3).map(|_| DenseMatrix::random(n, n, &mut g)).collect();
        let blur = multichannel_blur(&mix, &h, &h).unwrap();
        let b = split_channels(&blur.apply(&stack_channels(&truth).unwrap()).unwrap(), 3).unwrap();
        let params = SolverParams::new(1e-12, 1e-3, 1.0, 1e-13).with_max_iter(400);
        let out = multichannel_solve(&mix, &h, &h, &b, params, Fidelity::L2).unwrap();
        let x = stack_channels(&out.channels).unwrap();
        let t = stack_channels(&truth).unwrap();
        let resid = &blur.apply(&x).unwrap() - &stack_channels(&b).unwrap();
        assert!(resid.frobenius_norm() < 1e-6 * t.frobenius_norm());
        assert!((&x - &t).frobenius_norm() / t.frobenius_norm() < 1e-3);
    }

    #[test]
    fn stack_split_round_trip() {
        let mut g = rng(10);
        let chans: Vec<DenseMatrix> = (0..3).map(|_| DenseMatrix::random(4, 5, &mut g)).collect();
        let s = stack_channels(&chans).unwrap();
        assert_eq!(s.shape(), (4, 15));
        assert_eq!(split_channels(&s, 3).unwrap(), chans);
        assert!(split_channels(&s, 4).is_err());
    }

    #[test]
    fn multichannel_shape_errors() {
        let h = mild_blur(4);
        let b = vec![DenseMatrix::zeros(4, 4); 2];
        let p = SolverParams::default();
        assert!(multichannel_solve(&DenseMatrix::identity(3), &h, &h, &b, p, Fidelity::L1).is_err());
        assert!(multichannel_solve(&DenseMatrix::identity(2), &mild_blur(5), &h, &b, p, Fidelity::L1).is_err());
    }
}
