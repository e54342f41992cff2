//! Poincaré disk, upper half-plane and horocyclic charts of H².

use crate::error::{GhError, Result};

/// `arccosh(1 + delta)` written as `2 asinh(sqrt(delta / 2))`, which stays
/// accurate for tiny `delta`.
fn arccosh_one_plus(delta: f64) -> f64 {
    2.0 * (0.5 * delta.max(0.0)).sqrt().asinh()
}

/// Exponential map at the origin of the Poincaré disk for a tangent vector
/// of length `r` and direction `theta`.
pub fn exp_map_h2(r: f64, theta: f64) -> [f64; 2] {
    let rho = (0.5 * r).tanh();
    [rho * theta.cos(), rho * theta.sin()]
}

/// Hyperbolic distance between two points of the Poincaré disk.
pub fn disk_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let diff2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let ca = 1.0 - (a[0] * a[0] + a[1] * a[1]);
    let cb = 1.0 - (b[0] * b[0] + b[1] * b[1]);
    arccosh_one_plus(2.0 * diff2 / (ca * cb))
}

/// Hyperbolic distance between two upper half-plane points `(u, v)`, `v > 0`.
pub fn halfplane_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let diff2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    arccosh_one_plus(diff2 / (2.0 * a[1] * b[1]))
}

/// Horocyclic `(x, y)` to half-plane `(u, v) = (y, e^{-x})`.
pub fn horocyclic_to_halfplane(p: [f64; 2]) -> [f64; 2] {
    [p[1], (-p[0]).exp()]
}

pub fn horocyclic_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    halfplane_distance(horocyclic_to_halfplane(a), horocyclic_to_halfplane(b))
}

/// Moves a Poincaré disk point to horocyclic coordinates.
///
/// The Cayley map `z = i(1 + w)/(1 - w)` sends the disk to the upper
/// half-plane with `0 ↦ i`; the result is `(x, y) = (-ln Im z, Re z)`, so the
/// disk origin lands on `(0, 0)`.
pub fn disk_to_horocyclic(w: [f64; 2]) -> Result<[f64; 2]> {
    let [a, b] = w;
    let norm2 = a * a + b * b;
    if !(norm2 < 1.0) {
        return Err(GhError::Domain(format!(
            "disk point ({a}, {b}) has norm >= 1"
        )));
    }
    let den = (1.0 - a) * (1.0 - a) + b * b;
    let re = -2.0 * b / den;
    let im = (1.0 - norm2) / den;
    Ok([-im.ln(), re])
}
