//! Dense real matrices with Frobenius geometry.
//!
//! Besides ordinary arithmetic this module provides the pieces the Krylov
//! solver is built from: column-stacking `vec`/`mat` reshapes, the
//! ⋄-product (block Gram matrix of Frobenius inner products) and a global QR
//! factorization of a block row that can be grown one block at a time.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use rand::Rng;

use crate::error::{dim_err, Error, Result};

/// Relative tolerance below which an appended block is treated as linearly
/// dependent on the blocks already in a [`GlobalQr`].
pub const RANK_TOLERANCE: f64 = 1e-12;

/// A real `rows × cols` matrix.
///
/// Entries are addressed by `(row, col)`; the storage layout is an
/// implementation detail.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    // column-major
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from row slices. All rows must have equal length.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return dim_err("rows of unequal length");
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Matrix with independent entries drawn uniformly from `[-1, 1)`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        (row < self.rows && col < self.cols).then(|| self.data[col * self.rows + row])
    }

    /// Entries in column-stacking order.
    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Contiguous columns `start..start + count` as a matrix.
    pub(crate) fn column_block(&self, start: usize, count: usize) -> DenseMatrix {
        let lo = start * self.rows;
        let hi = (start + count) * self.rows;
        DenseMatrix {
            rows: self.rows,
            cols: count,
            data: self.data[lo..hi].to_vec(),
        }
    }

    pub(crate) fn column_block_mut(&mut self, start: usize, count: usize) -> &mut [f64] {
        let lo = start * self.rows;
        let hi = (start + count) * self.rows;
        &mut self.data[lo..hi]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two equally shaped matrices.
    pub fn zip_map(&self, other: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<DenseMatrix> {
        self.check_same_shape(other, "zip_map")?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &DenseMatrix) {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale_mut(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        self.map(|v| alpha * v)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        gemm_into(
            1.0,
            &self.data,
            self.rows,
            self.cols,
            &other.data,
            other.cols,
            0.0,
            &mut out.data,
        );
        Ok(out)
    }

    /// `selfᵀ · other` without forming the transpose.
    pub fn transpose_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return dim_err(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let (m, k, n) = (self.cols, self.rows, other.cols);
        let mut out = DenseMatrix::zeros(m, n);
        // SAFETY: strides describe the column-major buffers read as Aᵀ.
        unsafe {
            matrixmultiply::dgemm(
                m,
                k,
                n,
                1.0,
                self.data.as_ptr(),
                k as isize,
                1,
                other.data.as_ptr(),
                1,
                k as isize,
                0.0,
                out.data.as_mut_ptr(),
                1,
                m as isize,
            );
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &DenseMatrix, what: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return dim_err(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        Ok(())
    }
}

/// `c = alpha · a · b + beta · c` for column-major buffers, `a` is `m × k`,
/// `b` is `k × n`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm_into(
    alpha: f64,
    a: &[f64],
    m: usize,
    k: usize,
    b: &[f64],
    n: usize,
    beta: f64,
    c: &mut [f64],
) {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    assert_eq!(c.len(), m * n);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: the asserts above bound every access made through these strides.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            1,
            k as isize,
            beta,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            if self.cols > 8 {
                write!(f, "...")?;
            }
            writeln!(f)?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

// Arithmetic operators panic on shape mismatch, like indexing out of bounds.

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&DenseMatrix> for DenseMatrix {
    fn add_assign(&mut self, rhs: &DenseMatrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&DenseMatrix> for DenseMatrix {
    fn sub_assign(&mut self, rhs: &DenseMatrix) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: f64) -> DenseMatrix {
        self.scaled(rhs)
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        self.scaled(-1.0)
    }
}

/// Frobenius inner product `tr(aᵀ b)`.
pub fn frobenius_inner(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    a.check_same_shape(b, "frobenius_inner")?;
    Ok(dot(&a.data, &b.data))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Stacks the columns of `a` from left to right.
pub fn vectorize(a: &DenseMatrix) -> Vec<f64> {
    a.data.clone()
}

/// Inverse of [`vectorize`].
pub fn matricize(v: &[f64], rows: usize, cols: usize) -> Result<DenseMatrix> {
    if v.len() != rows * cols {
        return dim_err(format!(
            "vector of length {} cannot fill {rows}x{cols}",
            v.len()
        ));
    }
    Ok(DenseMatrix {
        rows,
        cols,
        data: v.to_vec(),
    })
}

/// The ⋄-product `Aᵀ ⋄ B`: entry `(i, j)` is `⟨a[i], b[j]⟩_F`.
pub fn diamond_product(a: &[DenseMatrix], b: &[DenseMatrix]) -> Result<DenseMatrix> {
    let shape = a.first().or(b.first()).map(DenseMatrix::shape);
    if let Some(shape) = shape {
        if a.iter().chain(b).any(|blk| blk.shape() != shape) {
            return dim_err("diamond product blocks must share one shape");
        }
    }
    Ok(DenseMatrix::from_fn(a.len(), b.len(), |i, j| {
        dot(&a[i].data, &b[j].data)
    }))
}

/// Outcome of a successful [`GlobalQr::append`].
#[derive(Debug, Clone)]
pub struct QrAppend {
    /// Coefficients of the new block along the existing `Q` blocks.
    pub r_column: Vec<f64>,
    /// Frobenius norm of the orthogonal remainder; the new diagonal of `R`.
    pub r_diag: f64,
}

/// Global QR factorization `[A₁, …, A_k] = [Q₁, …, Q_k](R ⊗ I)` with
/// F-orthonormal `Qᵢ` and upper triangular `R`.
#[derive(Debug, Clone, Default)]
pub struct GlobalQr {
    q_blocks: Vec<DenseMatrix>,
    // column j holds R[0..=j, j]
    r_columns: Vec<Vec<f64>>,
}

impl GlobalQr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.q_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_blocks.is_empty()
    }

    pub fn q_blocks(&self) -> &[DenseMatrix] {
        &self.q_blocks
    }

    pub fn r_factor(&self) -> DenseMatrix {
        let k = self.len();
        let mut r = DenseMatrix::zeros(k, k);
        for (j, col) in self.r_columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                r[(i, j)] = v;
            }
        }
        r
    }

    /// Appends `block` as a new column of the factored block row.
    ///
    /// The orthogonalization is classical Gram-Schmidt with one
    /// reorthogonalization pass. If the remainder is below
    /// [`RANK_TOLERANCE`]` · ‖block‖_F` the factorization is not modified and
    /// [`Error::RankDeficient`] is returned.
    pub fn append(&mut self, block: &DenseMatrix) -> Result<QrAppend> {
        if let Some(first) = self.q_blocks.first() {
            if first.shape() != block.shape() {
                return dim_err(format!(
                    "block {:?} does not match factor blocks {:?}",
                    block.shape(),
                    first.shape()
                ));
            }
        }
        let norm = block.frobenius_norm();
        let mut remainder = block.clone();
        let mut r_column = vec![0.0; self.len()];
        for _ in 0..2 {
            let coeffs: Vec<f64> = self
                .q_blocks
                .iter()
                .map(|q| dot(&q.data, &remainder.data))
                .collect();
            for (q, (&c, acc)) in self.q_blocks.iter().zip(coeffs.iter().zip(&mut r_column)) {
                remainder.axpy(-c, q);
                *acc += c;
            }
        }
        let r_diag = remainder.frobenius_norm();
        let tolerance = RANK_TOLERANCE * norm;
        if !(r_diag > tolerance) {
            return Err(Error::RankDeficient {
                remainder: r_diag,
                tolerance,
            });
        }
        remainder.scale_mut(1.0 / r_diag);
        self.q_blocks.push(remainder);
        let mut stored = r_column.clone();
        stored.push(r_diag);
        self.r_columns.push(stored);
        Ok(QrAppend { r_column, r_diag })
    }

    /// Column `j` of `R` down to the diagonal.
    pub fn r_column(&self, j: usize) -> &[f64] {
        &self.r_columns[j]
    }

    /// `Σⱼ cⱼ Qⱼ`.
    pub fn combine(&self, coefficients: &[f64]) -> Result<DenseMatrix> {
        let Some(first) = self.q_blocks.first() else {
            return dim_err("empty factorization");
        };
        if coefficients.len() != self.len() {
            return dim_err("coefficient count differs from factor length");
        }
        let mut out = DenseMatrix::zeros(first.rows(), first.cols());
        for (q, &c) in self.q_blocks.iter().zip(coefficients) {
            out.axpy(c, q);
        }
        Ok(out)
    }

    /// `Qᵀ ⋄ target`.
    pub fn project(&self, target: &DenseMatrix) -> Vec<f64> {
        self.q_blocks
            .iter()
            .map(|q| dot(&q.data, &target.data))
            .collect()
    }

    /// Minimizes `‖target − [A₁,…,A_k](y ⊗ I)‖_F` over `y`.
    pub fn solve_least_squares(&self, target: &DenseMatrix) -> Result<Vec<f64>> {
        if let Some(first) = self.q_blocks.first() {
            if first.shape() != target.shape() {
                return dim_err("least-squares target shape differs from factor blocks");
            }
        }
        let rhs = self.project(target);
        back_substitute(&self.r_columns, &rhs)
    }
}

fn back_substitute(r_columns: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let k = rhs.len();
    let scale = (0..k).fold(0.0f64, |m, j| m.max(r_columns[j][j].abs()));
    let mut y = rhs.to_vec();
    for j in (0..k).rev() {
        let d = r_columns[j][j];
        if !(d.abs() > SINGULAR_TOLERANCE * scale) {
            return Err(Error::Singular { index: j, value: d });
        }
        y[j] /= d;
        let yj = y[j];
        for (i, yi) in y.iter_mut().enumerate().take(j) {
            *yi -= r_columns[j][i] * yj;
        }
    }
    Ok(y)
}

const SINGULAR_TOLERANCE: f64 = 1e-14;

/// Solves `r · y = rhs` for square upper triangular `r` by back substitution.
///
/// A diagonal entry whose magnitude is not above `1e-14` times the largest
/// diagonal magnitude is reported as [`Error::Singular`].
pub fn upper_triangular_solve(r: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if !r.is_square() || r.rows() != rhs.len() {
        return dim_err(format!(
            "triangular solve with {}x{} matrix and length-{} rhs",
            r.rows(),
            r.cols(),
            rhs.len()
        ));
    }
    let cols: Vec<Vec<f64>> = (0..r.cols())
        .map(|j| (0..=j).map(|i| r[(i, j)]).collect())
        .collect();
    back_substitute(&cols, rhs)
}
