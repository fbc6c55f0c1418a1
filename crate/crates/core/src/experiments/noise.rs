//! Seeded noise models.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{param_err, Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    /// Impulsive corruption of a fraction of the pixels.
    #[default]
    SaltPepper,
    /// Additive zero-mean white Gaussian noise at a relative level.
    GaussianWhite,
}

impl NoiseKind {
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::SaltPepper => "salt-pepper",
            NoiseKind::GaussianWhite => "gaussian-white",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "salt-pepper" | "salt-and-pepper" | "sp" | "impulse" => Ok(NoiseKind::SaltPepper),
            "gaussian-white" | "gaussian" | "white" => Ok(NoiseKind::GaussianWhite),
            _ => Err(Error::Parameter(format!("unknown noise kind '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Pixel fraction for salt-and-pepper, `‖E‖_F / ‖B̂‖_F` for Gaussian.
    pub level: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, level: f64, seed: u64) -> Self {
        NoiseSpec { kind, level, seed }
    }

    pub fn apply(&self, clean: &DenseMatrix) -> Result<DenseMatrix> {
        match self.kind {
            NoiseKind::SaltPepper => add_salt_pepper(clean, self.level, self.seed),
            NoiseKind::GaussianWhite => add_gaussian_white(clean, self.level, self.seed),
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level <= 1.0) {
        return param_err(format!("noise level must lie in (0, 1], got {level}"));
    }
    Ok(())
}

/// Sets exactly `round(level · len)` distinct entries, chosen uniformly, to
/// 0 or 1 with equal probability. Intensities are assumed to lie in `[0, 1]`.
pub fn add_salt_pepper(x: &DenseMatrix, level: f64, seed: u64) -> Result<DenseMatrix> {
    add_salt_pepper_range(x, level, seed, 0.0, 1.0)
}

/// [`add_salt_pepper`] with explicit pepper (`lo`) and salt (`hi`) values.
pub fn add_salt_pepper_range(x: &DenseMatrix, level: f64, seed: u64, lo: f64, hi: f64) -> Result<DenseMatrix> {
    check_level(level)?;
    let len = x.len();
    let count = ((level * len as f64).round() as usize).min(len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = x.clone();
    let data = out.as_mut_slice();
    for idx in sample(&mut rng, len, count) {
        data[idx] = if rng.random_bool(0.5) { hi } else { lo };
    }
    Ok(out)
}

/// `B̂ + E` with `E` white Gaussian, scaled so that `‖E‖_F = ν ‖B̂‖_F`.
pub fn add_gaussian_white(b_hat: &DenseMatrix, nu: f64, seed: u64) -> Result<DenseMatrix> {
    check_level(nu)?;
    let signal = b_hat.frobenius_norm();
    if !(signal > 0.0) {
        return Err(Error::Degenerate("noise-free image is zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = b_hat.shape();
    let mut e = DenseMatrix::zeros(m, n);
    for v in e.as_mut_slice() {
        *v = rng.sample(StandardNormal);
    }
    let scale = nu * signal / e.frobenius_norm();
    let mut out = b_hat.clone();
    out.axpy(scale, &e);
    Ok(out)
}
