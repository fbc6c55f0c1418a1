//! Closed-form shrinkage steps of the splitting.

use crate::error::{dim_err, param_err, Result};
use crate::linalg::DenseMatrix;
pub use crate::operators::GradientPair;

/// Scalar soft threshold `max(|t| − τ, 0) · sign(t)`.
#[inline]
pub fn soft_threshold(t: f64, tau: f64) -> f64 {
    let mag = t.abs() - tau;
    if mag > 0.0 {
        mag.copysign(t)
    } else {
        0.0
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold >= 0.0) {
        return param_err(format!("threshold must be nonnegative, got {threshold}"));
    }
    Ok(())
}

/// Isotropic (two-dimensional) shrinkage applied per pixel to `T = (k, l)`:
/// `max(‖T‖₂ − τ, 0) · T / ‖T‖₂`, with `0 · (0/0) = 0`.
pub fn shrink_isotropic(k: &DenseMatrix, l: &DenseMatrix, threshold: f64) -> Result<GradientPair> {
    check_threshold(threshold)?;
    if k.shape() != l.shape() {
        return dim_err("shrink_isotropic arguments differ in shape");
    }
    let (rows, cols) = k.shape();
    let mut vertical = DenseMatrix::zeros(rows, cols);
    let mut horizontal = DenseMatrix::zeros(rows, cols);
    for ((v, h), (&a, &b)) in vertical
        .as_mut_slice()
        .iter_mut()
        .zip(horizontal.as_mut_slice())
        .zip(k.as_slice().iter().zip(l.as_slice()))
    {
        let norm = a.hypot(b);
        if norm > threshold {
            let factor = (norm - threshold) / norm;
            *v = factor * a;
            *h = factor * b;
        }
    }
    Ok(GradientPair {
        vertical,
        horizontal,
    })
}

/// Anisotropic shrinkage: componentwise soft thresholding of `k` and `l`.
pub fn shrink_anisotropic(k: &DenseMatrix, l: &DenseMatrix, threshold: f64) -> Result<GradientPair> {
    check_threshold(threshold)?;
    if k.shape() != l.shape() {
        return dim_err("shrink_anisotropic arguments differ in shape");
    }
    Ok(GradientPair {
        vertical: k.map(|t| soft_threshold(t, threshold)),
        horizontal: l.map(|t| soft_threshold(t, threshold)),
    })
}

/// Minimizer of `‖R − B‖₁ + (ρ/2)‖H(X) − R‖² + ⟨H(X) − R, W⟩` over `R`:
/// `B + soft(H(X) − B + W/ρ, 1/ρ)`.
pub fn shrink_l1_residual(
    hx: &DenseMatrix,
    b: &DenseMatrix,
    w: &DenseMatrix,
    rho: f64,
) -> Result<DenseMatrix> {
    if !(rho > 0.0) {
        return param_err(format!("rho must be positive, got {rho}"));
    }
    if hx.shape() != b.shape() || w.shape() != b.shape() {
        return dim_err("shrink_l1_residual arguments differ in shape");
    }
    let tau = 1.0 / rho;
    let mut out = b.clone();
    for ((r, &h), &m) in out
        .as_mut_slice()
        .iter_mut()
        .zip(hx.as_slice())
        .zip(w.as_slice())
    {
        let bv = *r;
        *r = bv + soft_threshold(h - bv + tau * m, tau);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(v: f64) -> DenseMatrix {
        DenseMatrix::filled(1, 1, v)
    }

    #[test]
    fn isotropic_zero_pixel_stays_zero() {
        for tau in [0.0, 0.5, 3.0] {
            let out = shrink_isotropic(&one(0.0), &one(0.0), tau).unwrap();
            assert_eq!(out.vertical[(0, 0)], 0.0);
            assert_eq!(out.horizontal[(0, 0)], 0.0);
        }
    }

    #[test]
    fn isotropic_three_four_five() {
        let out = shrink_isotropic(&one(3.0), &one(4.0), 1.0).unwrap();
        assert!((out.vertical[(0, 0)] - 2.4).abs() < 1e-15);
        assert!((out.horizontal[(0, 0)] - 3.2).abs() < 1e-15);
    }

    #[test]
    fn anisotropic_examples() {
        let out = shrink_anisotropic(&one(2.5), &one(-0.3), 1.0).unwrap();
        assert_eq!(out.vertical[(0, 0)], 1.5);
        assert_eq!(out.horizontal[(0, 0)], 0.0);
        let neg = shrink_anisotropic(&one(-2.5), &one(0.0), 1.0).unwrap();
        assert_eq!(neg.vertical[(0, 0)], -1.5);
    }

    #[test]
    fn residual_examples() {
        let b = DenseMatrix::from_rows(&[&[1.0, -2.0], &[0.5, 3.0]]).unwrap();
        let zero = DenseMatrix::zeros(2, 2);
        assert_eq!(shrink_l1_residual(&b, &b, &zero, 2.0).unwrap(), b);
        let r = shrink_l1_residual(&one(7.0), &one(2.0), &one(0.0), 1.0).unwrap();
        assert_eq!(r[(0, 0)], 6.0);
    }

    #[test]
    fn parameter_errors() {
        assert!(shrink_isotropic(&one(1.0), &one(1.0), -0.1).is_err());
        assert!(shrink_anisotropic(&one(1.0), &one(1.0), -0.1).is_err());
        assert!(shrink_l1_residual(&one(1.0), &one(1.0), &one(0.0), 0.0).is_err());
        assert!(shrink_isotropic(&one(1.0), &DenseMatrix::zeros(1, 2), 0.1).is_err());
    }

    #[test]
    fn zero_threshold_is_identity() {
        let k = DenseMatrix::from_rows(&[&[1.0, -2.0, 0.0]]).unwrap();
        let l = DenseMatrix::from_rows(&[&[0.5, 0.0, -4.0]]).unwrap();
        let iso = shrink_isotropic(&k, &l, 0.0).unwrap();
        let ani = shrink_anisotropic(&k, &l, 0.0).unwrap();
        for out in [iso, ani] {
            assert!((&out.vertical - &k).max_abs() < 1e-15);
            assert!((&out.horizontal - &l).max_abs() < 1e-15);
        }
    }

    /// Coarse-to-fine grid minimizer of a convex function on `[lo, hi]`.
    fn grid_min_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        let mut best = lo;
        let mut step = (hi - lo) / 200.0;
        while step > 1e-7 {
            let mut t = lo;
            let mut fbest = f64::INFINITY;
            while t <= hi + 1e-15 {
                let v = f(t);
                if v < fbest {
                    fbest = v;
                    best = t;
                }
                t += step;
            }
            lo = best - step;
            hi = best + step;
            step /= 20.0;
        }
        best
    }

    #[test]
    fn soft_threshold_matches_grid_oracle() {
        for (t, mu, beta) in [(2.3, 0.7, 1.5), (-1.1, 0.4, 0.5), (0.2, 1.0, 2.0), (-3.0, 2.0, 3.0)] {
            let oracle = grid_min_1d(|m| mu * m.abs() + 0.5 * beta * (m - t).powi(2), -5.0, 5.0);
            assert!((soft_threshold(t, mu / beta) - oracle).abs() < 1e-6);
        }
    }

    #[test]
    fn residual_shrink_matches_grid_oracle() {
        for (hx, b, w, rho) in [(7.0, 2.0, 0.0, 1.0), (0.3, 0.1, 0.5, 4.0), (-1.0, 0.8, -0.2, 0.5)] {
            let f = |r: f64| (r - b).abs() + 0.5 * rho * (hx - r).powi(2) + w * (hx - r);
            let oracle = grid_min_1d(f, -10.0, 10.0);
            let got = shrink_l1_residual(&one(hx), &one(b), &one(w), rho).unwrap()[(0, 0)];
            assert!((got - oracle).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn isotropic_magnitude_exact(a in -5.0f64..5.0, b in -5.0f64..5.0, tau in 0.0f64..3.0) {
            let out = shrink_isotropic(&one(a), &one(b), tau).unwrap();
            let mag = out.vertical[(0, 0)].hypot(out.horizontal[(0, 0)]);
            prop_assert!((mag - (a.hypot(b) - tau).max(0.0)).abs() < 1e-12);
        }

        #[test]
        fn shrinks_are_nonexpansive(
            a in proptest::collection::vec(-4.0f64..4.0, 8),
            b in proptest::collection::vec(-4.0f64..4.0, 8),
            tau in 0.0f64..2.0,
        ) {
            let k1 = DenseMatrix::from_fn(2, 2, |i, j| a[2 * i + j]);
            let l1 = DenseMatrix::from_fn(2, 2, |i, j| a[4 + 2 * i + j]);
            let k2 = DenseMatrix::from_fn(2, 2, |i, j| b[2 * i + j]);
            let l2 = DenseMatrix::from_fn(2, 2, |i, j| b[4 + 2 * i + j]);
            let input = (&k1 - &k2).frobenius_norm().hypot((&l1 - &l2).frobenius_norm());
            for f in [shrink_isotropic, shrink_anisotropic] {
                let d = f(&k1, &l1, tau).unwrap().difference(&f(&k2, &l2, tau).unwrap());
                prop_assert!(d.frobenius_norm() <= input + 1e-12);
            }
            let zero = DenseMatrix::zeros(2, 2);
            let r1 = shrink_l1_residual(&k1, &l1, &zero, 1.0 / (tau + 0.1)).unwrap();
            let r2 = shrink_l1_residual(&k2, &l1, &zero, 1.0 / (tau + 0.1)).unwrap();
            prop_assert!((&r1 - &r2).frobenius_norm() <= (&k1 - &k2).frobenius_norm() + 1e-12);
        }
    }
}
