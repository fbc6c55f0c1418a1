//! Restoration quality measures.

use crate::error::{dim_err, Error, Result};
use crate::linalg::DenseMatrix;

/// `10 log₁₀(‖X̂ − mean(X̂)‖² / ‖X_k − X̂‖²)` in decibels; `+∞` when the
/// restoration is exact.
pub fn snr(x_k: &DenseMatrix, x_hat: &DenseMatrix) -> Result<f64> {
    if x_k.shape() != x_hat.shape() {
        return dim_err("snr arguments differ in shape");
    }
    let mean = x_hat.mean();
    let signal: f64 = x_hat.iter().map(|v| (v - mean) * (v - mean)).sum();
    let error: f64 = x_k.iter().zip(x_hat.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / error).log10())
}

/// SNR after clamping the restoration to `[0, 1]`.
pub fn snr_clamped(x_k: &DenseMatrix, x_hat: &DenseMatrix) -> Result<f64> {
    snr(&clamp_unit(x_k), x_hat)
}

/// `‖X̂ − X_k‖_F / ‖X̂‖_F`.
pub fn relative_error(x_k: &DenseMatrix, x_hat: &DenseMatrix) -> Result<f64> {
    if x_k.shape() != x_hat.shape() {
        return dim_err("relative_error arguments differ in shape");
    }
    let norm = x_hat.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::Degenerate("reference image is zero".into()));
    }
    Ok((x_hat - x_k).frobenius_norm() / norm)
}

pub fn clamp_unit(x: &DenseMatrix) -> DenseMatrix {
    x.map(|v| v.clamp(0.0, 1.0))
}
