//! Structured linear operators on matrix variables.
//!
//! Everything here is a map `X ↦ Σᵢ Lᵢ X Rᵢ`: the separable blur
//! `H(X) = H₂ X H₁ᵀ`, its adjoint, the square forward-difference gradient and
//! the normal operator `ρ HᵀH + β DᵀD` of the X-subproblem.

use std::f64::consts::PI;

use crate::error::{dim_err, param_err, Result};
use crate::linalg::{gemm_into, DenseMatrix};

/// One factor of a Sylvester term.
///
/// `Kron` keeps `outer ⊗ inner` unexpanded so that multichannel blurs, whose
/// column factor is a channel-mixing matrix Kronecker a 1-D blur, never
/// materialize an `nk × nk` matrix when multiplied from the right.
#[derive(Debug, Clone)]
pub enum Coefficient {
    Identity(usize),
    Dense(DenseMatrix),
    Kron { outer: DenseMatrix, inner: DenseMatrix },
}

impl Coefficient {
    pub fn rows(&self) -> usize {
        match self {
            Coefficient::Identity(n) => *n,
            Coefficient::Dense(m) => m.rows(),
            Coefficient::Kron { outer, inner } => outer.rows() * inner.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Coefficient::Identity(n) => *n,
            Coefficient::Dense(m) => m.cols(),
            Coefficient::Kron { outer, inner } => outer.cols() * inner.cols(),
        }
    }

    pub fn transpose(&self) -> Coefficient {
        match self {
            Coefficient::Identity(n) => Coefficient::Identity(*n),
            Coefficient::Dense(m) => Coefficient::Dense(m.transpose()),
            Coefficient::Kron { outer, inner } => Coefficient::Kron {
                outer: outer.transpose(),
                inner: inner.transpose(),
            },
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Coefficient::Identity(n) => DenseMatrix::identity(*n),
            Coefficient::Dense(m) => m.clone(),
            Coefficient::Kron { outer, inner } => kron(outer, inner),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Coefficient) -> Result<Coefficient> {
        if self.cols() != other.rows() {
            return dim_err(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            ));
        }
        Ok(match (self, other) {
            (Coefficient::Identity(_), c) | (c, Coefficient::Identity(_)) => c.clone(),
            (
                Coefficient::Kron { outer: o1, inner: i1 },
                Coefficient::Kron { outer: o2, inner: i2 },
            ) if o1.cols() == o2.rows() => Coefficient::Kron {
                outer: o1.matmul(o2)?,
                inner: i1.matmul(i2)?,
            },
            (a, b) => Coefficient::Dense(a.to_dense().matmul(&b.to_dense())?),
        })
    }

    /// `self · x`.
    fn left_mul(&self, x: &DenseMatrix) -> DenseMatrix {
        match self {
            Coefficient::Identity(_) => x.clone(),
            Coefficient::Dense(m) => m.matmul(x).expect("shape checked by operator"),
            Coefficient::Kron { .. } => self.to_dense().matmul(x).expect("shape checked by operator"),
        }
    }

    /// `x · self`.
    fn right_mul(&self, x: &DenseMatrix) -> DenseMatrix {
        match self {
            Coefficient::Identity(_) => x.clone(),
            Coefficient::Dense(m) => x.matmul(m).expect("shape checked by operator"),
            Coefficient::Kron { outer, inner } => kron_right_mul(x, outer, inner),
        }
    }
}

/// `x · (outer ⊗ inner)` computed block by block.
fn kron_right_mul(x: &DenseMatrix, outer: &DenseMatrix, inner: &DenseMatrix) -> DenseMatrix {
    let m = x.rows();
    let (k, l) = outer.shape();
    let (a, b) = inner.shape();
    let mut out = DenseMatrix::zeros(m, l * b);
    let mut partial = vec![0.0; m * b];
    for d in 0..k {
        let xd = x.column_block(d * a, a);
        let mut computed = false;
        for c in 0..l {
            let w = outer[(d, c)];
            if w == 0.0 {
                continue;
            }
            if !computed {
                gemm_into(1.0, xd.as_slice(), m, a, inner.as_slice(), b, 0.0, &mut partial);
                computed = true;
            }
            for (o, p) in out.column_block_mut(c * b, b).iter_mut().zip(&partial) {
                *o += w * p;
            }
        }
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = b.shape();
    DenseMatrix::from_fn(a.rows() * p, a.cols() * q, |i, j| {
        a[(i / p, j / q)] * b[(i % p, j % q)]
    })
}

/// A single product `left · X · right`.
#[derive(Debug, Clone)]
pub struct SylvesterTerm {
    pub left: Coefficient,
    pub right: Coefficient,
}

impl SylvesterTerm {
    pub fn new(left: Coefficient, right: Coefficient) -> Self {
        SylvesterTerm { left, right }
    }

    pub fn dense(left: DenseMatrix, right: DenseMatrix) -> Self {
        SylvesterTerm::new(Coefficient::Dense(left), Coefficient::Dense(right))
    }

    fn input_shape(&self) -> (usize, usize) {
        (self.left.cols(), self.right.rows())
    }

    fn output_shape(&self) -> (usize, usize) {
        (self.left.rows(), self.right.cols())
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        // multiply on the side that shrinks the intermediate first
        let (p, m) = (self.left.rows(), self.left.cols());
        let (n, q) = (self.right.rows(), self.right.cols());
        if p * n <= m * q || matches!(self.right, Coefficient::Kron { .. }) {
            self.right.right_mul(&self.left.left_mul(x))
        } else {
            self.left.left_mul(&self.right.right_mul(x))
        }
    }

    fn transpose(&self) -> SylvesterTerm {
        SylvesterTerm::new(self.left.transpose(), self.right.transpose())
    }
}

/// Linear map `X ↦ Σᵢ Lᵢ X Rᵢ` from `m × n` to `p × q` matrices.
#[derive(Debug, Clone)]
pub struct SylvesterOperator {
    terms: Vec<SylvesterTerm>,
    input: (usize, usize),
    output: (usize, usize),
}

impl SylvesterOperator {
    pub fn new(terms: Vec<SylvesterTerm>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return dim_err("a Sylvester operator needs at least one term");
        };
        let input = first.input_shape();
        let output = first.output_shape();
        for t in &terms {
            if t.input_shape() != input || t.output_shape() != output {
                return dim_err(format!(
                    "term maps {:?} -> {:?}, expected {:?} -> {:?}",
                    t.input_shape(),
                    t.output_shape(),
                    input,
                    output
                ));
            }
        }
        Ok(SylvesterOperator {
            terms,
            input,
            output,
        })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        SylvesterOperator {
            terms: vec![SylvesterTerm::new(
                Coefficient::Identity(rows),
                Coefficient::Identity(cols),
            )],
            input: (rows, cols),
            output: (rows, cols),
        }
    }

    pub fn terms(&self) -> &[SylvesterTerm] {
        &self.terms
    }

    pub fn input_shape(&self) -> (usize, usize) {
        self.input
    }

    pub fn output_shape(&self) -> (usize, usize) {
        self.output
    }

    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.shape() != self.input {
            return dim_err(format!(
                "operator expects {:?} input, got {:?}",
                self.input,
                x.shape()
            ));
        }
        let mut out = self.terms[0].apply(x);
        for t in &self.terms[1..] {
            out += &t.apply(x);
        }
        Ok(out)
    }

    /// `Σᵢ Lᵢᵀ X Rᵢᵀ`.
    pub fn adjoint_apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.shape() != self.output {
            return dim_err(format!(
                "adjoint expects {:?} input, got {:?}",
                self.output,
                x.shape()
            ));
        }
        let mut out = self.terms[0].transpose().apply(x);
        for t in &self.terms[1..] {
            out += &t.transpose().apply(x);
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> SylvesterOperator {
        SylvesterOperator {
            terms: self.terms.iter().map(SylvesterTerm::transpose).collect(),
            input: self.output,
            output: self.input,
        }
    }

    /// `self ∘ inner`, i.e. `X ↦ self(inner(X))`.
    pub fn compose(&self, inner: &SylvesterOperator) -> Result<SylvesterOperator> {
        if inner.output != self.input {
            return dim_err("composition shape mismatch");
        }
        let mut terms = Vec::with_capacity(self.terms.len() * inner.terms.len());
        for outer_t in &self.terms {
            for inner_t in &inner.terms {
                terms.push(SylvesterTerm::new(
                    outer_t.left.compose(&inner_t.left)?,
                    inner_t.right.compose(&outer_t.right)?,
                ));
            }
        }
        SylvesterOperator::new(terms)
    }

    /// The Gram operator `Aᵀ ∘ A`.
    pub fn gram(&self) -> Result<SylvesterOperator> {
        self.adjoint().compose(self)
    }

    /// Multiplies every term by `alpha` (folded into the left factor).
    pub fn scaled(&self, alpha: f64) -> SylvesterOperator {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let left = match &t.left {
                    Coefficient::Identity(n) => {
                        Coefficient::Dense(DenseMatrix::identity(*n).scaled(alpha))
                    }
                    Coefficient::Dense(m) => Coefficient::Dense(m.scaled(alpha)),
                    Coefficient::Kron { outer, inner } => Coefficient::Kron {
                        outer: outer.scaled(alpha),
                        inner: inner.clone(),
                    },
                };
                SylvesterTerm::new(left, t.right.clone())
            })
            .collect();
        SylvesterOperator {
            terms,
            input: self.input,
            output: self.output,
        }
    }

    /// Sum of two operators with the same shapes.
    pub fn plus(&self, other: &SylvesterOperator) -> Result<SylvesterOperator> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SylvesterOperator::new(terms)
    }
}

/// Separable single-channel blur `X ↦ H₂ X H₁ᵀ`.
pub fn separable_blur(h1: &DenseMatrix, h2: &DenseMatrix) -> Result<SylvesterOperator> {
    SylvesterOperator::new(vec![SylvesterTerm::dense(h2.clone(), h1.transpose())])
}

/// Blur of a `k`-channel image stored as the `m × kn` matrix
/// `[X⁽¹⁾, …, X⁽ᵏ⁾]`: channel `c` of the output is
/// `Σ_d mix[c, d] · row_blur · X⁽ᵈ⁾ · col_blurᵀ`.
///
/// With `mix = I` this is within-channel blurring only.
pub fn multichannel_blur(
    mix: &DenseMatrix,
    row_blur: &DenseMatrix,
    col_blur: &DenseMatrix,
) -> Result<SylvesterOperator> {
    if !mix.is_square() || !row_blur.is_square() || !col_blur.is_square() {
        return dim_err("multichannel blur factors must be square");
    }
    SylvesterOperator::new(vec![SylvesterTerm::new(
        Coefficient::Dense(row_blur.clone()),
        Coefficient::Kron {
            outer: mix.transpose(),
            inner: col_blur.transpose(),
        },
    )])
}

/// Banded symmetric Toeplitz matrix sampling a Gaussian PSF:
/// `h_ij = exp(−(i−j)²/(2σ²)) / (σ√(2π))` for `|i − j| ≤ band`, else 0.
pub fn gaussian_toeplitz(sigma: f64, band: usize, dim: usize) -> Result<DenseMatrix> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return param_err(format!("sigma must be positive, got {sigma}"));
    }
    if dim == 0 || band >= dim {
        return param_err(format!("need 0 <= band < dim, got band={band}, dim={dim}"));
    }
    let scale = 1.0 / (sigma * (2.0 * PI).sqrt());
    let taps: Vec<f64> = (0..=band)
        .map(|k| scale * (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    Ok(DenseMatrix::from_fn(dim, dim, |i, j| {
        taps.get(i.abs_diff(j)).copied().unwrap_or(0.0)
    }))
}

/// The fixed 3 × 3 cross-channel (colour mixing) blur.
pub fn cross_channel_matrix() -> DenseMatrix {
    DenseMatrix::from_rows(&[&[0.7, 0.2, 0.1], &[0.25, 0.5, 0.25], &[0.15, 0.1, 0.75]])
        .expect("constant rows")
}

/// Square forward difference on `dim` samples: `(Cx)ᵢ = xᵢ₊₁ − xᵢ` for
/// `i < dim − 1`; the last row is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceOperator {
    dim: usize,
}

impl DifferenceOperator {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return param_err("difference operator dimension must be positive");
        }
        Ok(DifferenceOperator { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, self.dim, |i, j| {
            if i + 1 >= self.dim {
                0.0
            } else if j == i {
                -1.0
            } else if j == i + 1 {
                1.0
            } else {
                0.0
            }
        })
    }

    /// `CᵀC`, the 1-D Neumann Laplacian.
    pub fn gram_matrix(&self) -> DenseMatrix {
        let c = self.matrix();
        c.transpose_matmul(&c).expect("square")
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for i in 0..x.len().saturating_sub(1) {
            out[i] = x[i + 1] - x[i];
        }
        out
    }
}

/// Pair of difference images: `vertical = C_m X` (the `M⁽ⁿ⁾` component) and
/// `horizontal = X C_nᵀ` per channel (the `M⁽ᵐ⁾` component).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub vertical: DenseMatrix,
    pub horizontal: DenseMatrix,
}

impl GradientPair {
    pub fn new(vertical: DenseMatrix, horizontal: DenseMatrix) -> Result<Self> {
        if vertical.shape() != horizontal.shape() {
            return dim_err("gradient components must share one shape");
        }
        Ok(GradientPair {
            vertical,
            horizontal,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        GradientPair {
            vertical: DenseMatrix::zeros(rows, cols),
            horizontal: DenseMatrix::zeros(rows, cols),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.vertical.shape()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vertical
            .frobenius_norm()
            .hypot(self.horizontal.frobenius_norm())
    }

    pub fn inner(&self, other: &GradientPair) -> f64 {
        crate::linalg::dot(self.vertical.as_slice(), other.vertical.as_slice())
            + crate::linalg::dot(self.horizontal.as_slice(), other.horizontal.as_slice())
    }

    pub fn axpy(&mut self, alpha: f64, other: &GradientPair) {
        self.vertical.axpy(alpha, &other.vertical);
        self.horizontal.axpy(alpha, &other.horizontal);
    }

    pub fn difference(&self, other: &GradientPair) -> GradientPair {
        GradientPair {
            vertical: &self.vertical - &other.vertical,
            horizontal: &self.horizontal - &other.horizontal,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.vertical.is_finite() && self.horizontal.is_finite()
    }
}

/// Discrete gradient `D = (D_{1,n}; D_{1,m})` of an image with `channels`
/// channels stored side by side as a `rows × (channels · cols)` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gradient {
    vertical: DifferenceOperator,
    horizontal: DifferenceOperator,
    channels: usize,
}

impl Gradient {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        Self::multichannel(rows, cols, 1)
    }

    pub fn multichannel(rows: usize, cols: usize, channels: usize) -> Result<Self> {
        if channels == 0 {
            return param_err("need at least one channel");
        }
        Ok(Gradient {
            vertical: DifferenceOperator::new(rows)?,
            horizontal: DifferenceOperator::new(cols)?,
            channels,
        })
    }

    pub fn from_operators(vertical: DifferenceOperator, horizontal: DifferenceOperator) -> Self {
        Gradient {
            vertical,
            horizontal,
            channels: 1,
        }
    }

    /// Shape of the image the gradient acts on.
    pub fn image_shape(&self) -> (usize, usize) {
        (self.vertical.dim, self.horizontal.dim * self.channels)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    fn check(&self, shape: (usize, usize)) -> Result<()> {
        if shape != self.image_shape() {
            return dim_err(format!(
                "gradient expects {:?}, got {:?}",
                self.image_shape(),
                shape
            ));
        }
        Ok(())
    }

    /// `(C_m X, X C_nᵀ)` with zero last row / zero last column per channel.
    pub fn apply(&self, x: &DenseMatrix) -> Result<GradientPair> {
        self.check(x.shape())?;
        let (m, total) = x.shape();
        let n = self.horizontal.dim;
        let mut vertical = DenseMatrix::zeros(m, total);
        let mut horizontal = DenseMatrix::zeros(m, total);
        for j in 0..total {
            for i in 0..m.saturating_sub(1) {
                vertical[(i, j)] = x[(i + 1, j)] - x[(i, j)];
            }
            if (j + 1) % n != 0 {
                for i in 0..m {
                    horizontal[(i, j)] = x[(i, j + 1)] - x[(i, j)];
                }
            }
        }
        Ok(GradientPair {
            vertical,
            horizontal,
        })
    }

    /// `C_mᵀ · vertical + horizontal · C_n` per channel.
    pub fn adjoint_apply(&self, y: &GradientPair) -> Result<DenseMatrix> {
        self.check(y.vertical.shape())?;
        self.check(y.horizontal.shape())?;
        let (m, total) = self.image_shape();
        let n = self.horizontal.dim;
        let v = &y.vertical;
        let h = &y.horizontal;
        let mut out = DenseMatrix::zeros(m, total);
        for j in 0..total {
            for i in 0..m {
                let mut s = 0.0;
                if i + 1 < m {
                    s -= v[(i, j)];
                }
                if i >= 1 {
                    s += v[(i - 1, j)];
                }
                let jc = j % n;
                if jc + 1 < n {
                    s -= h[(i, j)];
                }
                if jc >= 1 {
                    s += h[(i, j - 1)];
                }
                out[(i, j)] = s;
            }
        }
        Ok(out)
    }

    /// Sylvester terms of `β DᵀD`: `β C_mᵀC_m X + X (I ⊗ β C_nᵀC_n)`.
    pub fn normal_terms(&self, beta: f64) -> Vec<SylvesterTerm> {
        let (m, total) = self.image_shape();
        let vertical = self.vertical.gram_matrix().scaled(beta);
        let horizontal = self.horizontal.gram_matrix().scaled(beta);
        let right = if self.channels == 1 {
            Coefficient::Dense(horizontal)
        } else {
            Coefficient::Kron {
                outer: DenseMatrix::identity(self.channels),
                inner: horizontal,
            }
        };
        vec![
            SylvesterTerm::new(Coefficient::Dense(vertical), Coefficient::Identity(total)),
            SylvesterTerm::new(Coefficient::Identity(m), right),
        ]
    }
}

/// The X-subproblem operator `X ↦ ρ Hᵀ(H(X)) + β Dᵀ(D(X))`.
///
/// For a single-term blur `H₂ X H₁ᵀ` this is the three-term operator
/// `ρ H₂ᵀH₂ X H₁ᵀH₁ + β C_mᵀC_m X + β X C_nᵀC_n`; it is self-adjoint and
/// positive semidefinite.
pub fn build_normal_operator(
    blur: &SylvesterOperator,
    gradient: &Gradient,
    beta: f64,
    rho: f64,
) -> Result<SylvesterOperator> {
    if !(beta > 0.0) || !(rho > 0.0) {
        return param_err(format!(
            "penalties must be positive, got beta={beta}, rho={rho}"
        ));
    }
    normal_operator_unchecked(blur, gradient, beta, rho)
}

pub(crate) fn normal_operator_unchecked(
    blur: &SylvesterOperator,
    gradient: &Gradient,
    beta: f64,
    rho: f64,
) -> Result<SylvesterOperator> {
    if blur.input_shape() != gradient.image_shape() || blur.output_shape() != blur.input_shape()
    {
        return dim_err("blur and gradient act on different image shapes");
    }
    let mut terms = blur.gram()?.scaled(rho).terms;
    if beta != 0.0 {
        terms.extend(gradient.normal_terms(beta));
    }
    SylvesterOperator::new(terms)
}

/// Discretized one-dimensional Phillips test problem on `[−6, 6]`.
#[derive(Debug, Clone)]
pub struct PhillipsProblem {
    /// Galerkin matrix of `k₁(s, t) = f₁(s − t)` in orthonormal box functions.
    pub kernel: DenseMatrix,
    /// Coefficients of `f₁` in the box basis, `h^{-1/2} ∫_cell f₁`.
    pub solution: Vec<f64>,
    /// Coefficients of `g₁` in the box basis.
    pub rhs: Vec<f64>,
    pub midpoints: Vec<f64>,
}

/// Two-dimensional separable Phillips problem: `h1 = h2 = kernel` and
/// `x_true = x xᵀ` for the box coefficients `x` of `f₁`.
#[derive(Debug, Clone)]
pub struct PhillipsProblem2d {
    pub h1: DenseMatrix,
    pub h2: DenseMatrix,
    pub x_true: DenseMatrix,
}

const PHILLIPS_HALF_WIDTH: f64 = 6.0;
const PHILLIPS_SUPPORT: f64 = 3.0;
const GAUSS_POINTS: usize = 64;

/// `f₁(s) = 1 + cos(πs/3)` for `|s| < 3`, zero otherwise.
pub fn phillips_f(s: f64) -> f64 {
    if s.abs() < PHILLIPS_SUPPORT {
        1.0 + (PI * s / 3.0).cos()
    } else {
        0.0
    }
}

/// `g₁(s) = (6 − |s|)(1 + ½cos(πs/3)) + 9/(2π) sin(π|s|/3)` on `|s| ≤ 6`.
pub fn phillips_g(s: f64) -> f64 {
    let a = s.abs();
    (6.0 - a) * (1.0 + 0.5 * (PI * s / 3.0).cos()) + 9.0 / (2.0 * PI) * (PI * a / 3.0).sin()
}

pub fn phillips_1d(n: usize) -> Result<PhillipsProblem> {
    if n < 8 {
        return param_err(format!("phillips needs n >= 8, got {n}"));
    }
    let h = 2.0 * PHILLIPS_HALF_WIDTH / n as f64;
    let rule = gauss_legendre(GAUSS_POINTS);
    // Toeplitz: entry depends on the cell offset only.
    // (1/h)∫∫_{cells} f(s−t) = (1/h)∫_{−h}^{h} (h − |u|) f(u + d·h) du
    let band: Vec<f64> = (0..n)
        .map(|d| {
            let shift = d as f64 * h;
            let mut cuts = vec![-h, 0.0, h];
            for kink in [-PHILLIPS_SUPPORT - shift, PHILLIPS_SUPPORT - shift] {
                if kink > -h && kink < h {
                    cuts.push(kink);
                }
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let integral: f64 = cuts
                .windows(2)
                .map(|w| {
                    integrate(&rule, w[0], w[1], |u| (h - u.abs()) * phillips_f(u + shift))
                })
                .sum();
            integral / h
        })
        .collect();
    let kernel = DenseMatrix::from_fn(n, n, |i, j| band[i.abs_diff(j)]);
    let midpoints: Vec<f64> = (0..n)
        .map(|i| -PHILLIPS_HALF_WIDTH + (i as f64 + 0.5) * h)
        .collect();
    let project = |f: fn(f64) -> f64| -> Vec<f64> {
        midpoints
            .iter()
            .map(|&c| {
                let (a, b) = (c - 0.5 * h, c + 0.5 * h);
                let mut cuts = vec![a, b];
                for kink in [-PHILLIPS_SUPPORT, 0.0, PHILLIPS_SUPPORT] {
                    if kink > a && kink < b {
                        cuts.push(kink);
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.windows(2).map(|w| integrate(&rule, w[0], w[1], f)).sum::<f64>() / h.sqrt()
            })
            .collect()
    };
    Ok(PhillipsProblem {
        kernel,
        solution: project(phillips_f),
        rhs: project(phillips_g),
        midpoints,
    })
}

pub fn phillips_problem(n: usize) -> Result<PhillipsProblem2d> {
    let p = phillips_1d(n)?;
    let f = &p.solution;
    Ok(PhillipsProblem2d {
        h1: p.kernel.clone(),
        h2: p.kernel,
        x_true: DenseMatrix::from_fn(n, n, |i, j| f[i] * f[j]),
    })
}

struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn integrate(rule: &GaussRule, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Gauss-Legendre nodes and weights on `[−1, 1]` by Newton iteration on
/// the Legendre recurrence.
fn gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / deriv;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}
