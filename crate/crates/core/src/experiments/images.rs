//! Procedural test images with intensities in `[0, 1]`.

use crate::error::{param_err, Result};
use crate::linalg::DenseMatrix;

const SUPERSAMPLE: usize = 3;

fn render(size: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> [DenseMatrix; 3] {
    let mut out = [
        DenseMatrix::zeros(size, size),
        DenseMatrix::zeros(size, size),
        DenseMatrix::zeros(size, size),
    ];
    let s = SUPERSAMPLE as f64;
    let w = 1.0 / (s * s);
    for i in 0..size {
        for j in 0..size {
            let mut acc = [0.0; 3];
            for a in 0..SUPERSAMPLE {
                for b in 0..SUPERSAMPLE {
                    let v = (i as f64 + (a as f64 + 0.5) / s) / size as f64;
                    let u = (j as f64 + (b as f64 + 0.5) / s) / size as f64;
                    let c = f(u, v);
                    for k in 0..3 {
                        acc[k] += w * c[k];
                    }
                }
            }
            for k in 0..3 {
                out[k][(i, j)] = acc[k].clamp(0.0, 1.0);
            }
        }
    }
    out
}

// (intensity, semi-axis a, semi-axis b, centre x, centre y, angle in degrees)
const HEAD: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

fn inside(e: &[f64; 6], x: f64, y: f64) -> bool {
    let (s, c) = e[5].to_radians().sin_cos();
    let (dx, dy) = (x - e[3], y - e[4]);
    let (xr, yr) = (c * dx + s * dy, -s * dx + c * dy);
    (xr / e[1]).powi(2) + (yr / e[2]).powi(2) <= 1.0
}

/// Grayscale head phantom built from ten ellipses, with a gentle tissue
/// texture inside the skull.
pub fn head_phantom(size: usize) -> Result<DenseMatrix> {
    if size < 8 {
        return param_err(format!("phantom size must be at least 8, got {size}"));
    }
    let [img, _, _] = render(size, |u, v| {
        let (x, y) = (2.0 * u - 1.0, 1.0 - 2.0 * v);
        let mut val: f64 = HEAD.iter().filter(|e| inside(e, x, y)).map(|e| e[0]).sum();
        if inside(&HEAD[1], x, y) {
            val += 0.05 * (1.0 + (5.0 * x + 1.3).sin() * (4.0 * y).cos());
        }
        [val; 3]
    });
    Ok(img)
}

fn petal_radius(theta: f64, petals: f64, radius: f64) -> f64 {
    radius * (0.6 + 0.4 * (0.5 * petals * theta).cos().abs())
}

fn flower(u: f64, v: f64, cu: f64, cv: f64, radius: f64, petals: f64, hue: [f64; 3]) -> Option<[f64; 3]> {
    let (du, dv) = (u - cu, v - cv);
    let r = du.hypot(dv);
    let t = dv.atan2(du);
    if r < 0.22 * radius {
        let dots = 0.08 * (60.0 * r / radius).sin() * (7.0 * t).cos();
        return Some([0.25 + dots, 0.17 + dots, 0.05]);
    }
    let edge = petal_radius(t, petals, radius);
    if r < edge {
        let q = r / edge;
        let shade = 1.0 - 0.35 * q * q;
        let vein = 0.06 * (petals * t).cos();
        return Some([hue[0] * shade + vein, hue[1] * shade + 0.25 * q, hue[2] * shade]);
    }
    None
}

/// RGB scene: two flowers on a stem over a textured background.
pub fn flower_scene(size: usize) -> Result<[DenseMatrix; 3]> {
    if size < 8 {
        return param_err(format!("scene size must be at least 8, got {size}"));
    }
    Ok(render(size, |u, v| {
        if let Some(c) = flower(u, v, 0.55, 0.42, 0.3, 5.0, [0.9, 0.12, 0.1]) {
            return c;
        }
        if let Some(c) = flower(u, v, 0.2, 0.22, 0.14, 6.0, [0.95, 0.55, 0.1]) {
            return c;
        }
        let stem = u - 0.55 - 0.03 * (8.0 * v).sin();
        if v > 0.6 && stem.abs() < 0.014 {
            return [0.18, 0.45, 0.12];
        }
        let leaf = ((u - 0.66) / 0.1).powi(2) + ((v - 0.8) / 0.035).powi(2);
        if leaf < 1.0 {
            return [0.15, 0.55 - 0.15 * leaf, 0.1];
        }
        let texture = 0.05 * (23.0 * u + 3.0 * (9.0 * v).sin()).sin();
        [
            0.3 + 0.25 * v + texture,
            0.5 + 0.2 * (1.0 - v) + texture,
            0.65 - 0.4 * v + 0.5 * texture,
        ]
    }))
}
