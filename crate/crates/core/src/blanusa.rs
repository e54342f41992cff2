//! Smooth isometric-type embedding `F` of the hyperbolic plane into ℝ⁶.
//!
//! Built from the anti-periodic bump `χ(t) = sin(πt) e^{-1/sin²(πt)}`: its
//! normalized primitives give `ψ₁, ψ₂` with `ψ₁² + ψ₂² = 1`, which wind a
//! helix `h` of radius `|sinh x|/c` through ℝ⁴. Together with the
//! coordinates `ψ(x, y)` the map `f₀` sends horocyclic `(x, y)` into ℝ⁶.
//!
//! The first coordinate of `f₀` uses the scalar `ε = (G₁² + G₂²)/c²`, which
//! makes its integrand constant. [`BlanusaConstants::pullback_metric`]
//! measures how far the resulting map is from an isometry.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::geometry::{Chart, PointCloud};
use crate::quadrature::{adaptive_simpson, QuadratureSpec};

/// Half-width of the interval on which the derivative sup-norms are taken.
const SUP_INTERVAL: f64 = 2.0;
/// Smallest grid accepted for the sup-norm scan.
pub const MIN_SUP_GRID_POINTS: usize = 10_000;
pub const DEFAULT_SUP_GRID_POINTS: usize = 100_000;
/// Relative agreement required between the two finite-difference step sizes.
pub const SUP_REFINEMENT_TOL: f64 = 1e-4;
/// Radicands of `ψᵢ` down to this value are clamped to zero.
const RADICAND_FLOOR: f64 = -1e-12;

/// `χ(t) = sin(πt)·exp(-1/sin²(πt))`, extended by 0 at the integers.
pub fn chi(t: f64) -> f64 {
    let nearest = t.round();
    if (t - nearest).abs() <= 1e-12 {
        return 0.0;
    }
    // Reduce to [-1, 1] so that χ(t + 2k) and χ(-t) see the same sine argument.
    let reduced = t - 2.0 * (0.5 * t).round();
    let s = (PI * reduced).sin();
    s * (-1.0 / (s * s)).exp()
}

/// `∫ₐᵇ χ(t) dt` by adaptive Simpson.
pub fn chi_integral(a: f64, b: f64, q: &QuadratureSpec) -> Result<f64> {
    adaptive_simpson(chi, a, b, q)
}

/// `∫₀ᵗ χ`, with `t` reduced modulo the period 2. Past the midpoint of the
/// period the integral is taken from the far end, where `∫₀² χ = 0`.
pub fn chi_primitive(t: f64, q: &QuadratureSpec) -> Result<f64> {
    let r = t - 2.0 * (0.5 * t).floor();
    if r <= 1.0 {
        chi_integral(0.0, r, q)
    } else {
        chi_integral(r, 2.0, q).map(|v| -v)
    }
}

/// `(sinh⁻¹(y eˣ), log √(e^{-2x} + y²))`.
pub fn psi_coords(x: f64, y: f64) -> [f64; 2] {
    let s = y * x.exp();
    // log √(e^{-2x}(1 + s²)) = -x + ½ log(1 + s²)
    [s.asinh(), -x + 0.5 * (s * s).ln_1p()]
}

fn normalized_root(integral: f64, area: f64) -> Result<f64> {
    let radicand = integral / area;
    if radicand < RADICAND_FLOOR {
        return Err(GhError::Numerical(format!(
            "ψ radicand {radicand:e} is negative beyond round-off; quadrature tolerance too loose"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Scalars shared by every evaluation of the embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlanusaConstants {
    /// `∫₀¹ χ`.
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "G1")]
    pub g1: f64,
    #[serde(rename = "G2")]
    pub g2: f64,
    pub c: f64,
    pub epsilon: f64,
    pub quadrature: QuadratureSpec,
    pub sup_grid_points: usize,
    /// `|G(h) - G(h/2)| / G(h/2)` for `G₁` and `G₂`.
    pub sup_refinement: [f64; 2],
}

/// The `6 × 2` Jacobian of `F` summarized as `JᵀJ`, with its Frobenius
/// distance from the horocyclic metric `diag(1, e^{2x})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackDiagnostic {
    pub x: f64,
    pub y: f64,
    pub metric: [[f64; 2]; 2],
    pub deviation: f64,
}

impl BlanusaConstants {
    /// Computes `A`, the sup-norms `G₁, G₂`, `c = 2 max(G₁, G₂)` and `ε`.
    ///
    /// `Gᵢ` is the largest central difference of `x ↦ sinh(x) ψᵢ(x)` over
    /// `sup_grid_points` uniform nodes of `[-2, 2]`, taken with the node
    /// spacing `h` and with `h/2`; the finer value is kept and the relative
    /// change is recorded in `sup_refinement`.
    pub fn compute(q: QuadratureSpec, sup_grid_points: usize) -> Result<Self> {
        q.validate()?;
        if sup_grid_points < MIN_SUP_GRID_POINTS {
            return Err(GhError::param(format!(
                "sup_grid_points must be at least {MIN_SUP_GRID_POINTS}, got {sup_grid_points}"
            )));
        }
        let area = chi_integral(0.0, 1.0, &q)?;
        if !(area > 0.0) {
            return Err(GhError::Numerical(format!("∫₀¹ χ = {area} is not positive")));
        }

        let n = sup_grid_points;
        let h = 2.0 * SUP_INTERVAL / (n - 1) as f64;
        // Fine grid of spacing h/2 covering [-2 - h, 2 + h]; node k of the
        // coarse grid sits at fine index 2k + 2.
        let fine_len = 2 * (n - 1) + 5;
        let fine: Vec<f64> = (0..fine_len)
            .map(|j| -SUP_INTERVAL - h + 0.5 * h * j as f64)
            .collect();
        let shifted: Vec<f64> = fine.iter().map(|x| 1.0 + x).collect();
        let prim = cumulative_chi_integral(&fine, &q)?;
        let prim_shifted = cumulative_chi_integral(&shifted, &q)?;

        let mut products = [Vec::with_capacity(fine_len), Vec::with_capacity(fine_len)];
        for (j, &x) in fine.iter().enumerate() {
            let sh = x.sinh();
            products[0].push(sh * normalized_root(prim_shifted[j], area)?);
            products[1].push(sh * normalized_root(prim[j], area)?);
        }

        let mut g = [0.0; 2];
        let mut refinement = [0.0; 2];
        for (i, p) in products.iter().enumerate() {
            let mut coarse_step = 0.0_f64;
            let mut fine_step = 0.0_f64;
            for k in 0..n {
                let j = 2 * k + 2;
                let d_h = (p[j + 2] - p[j - 2]) / (2.0 * h);
                let d_half = (p[j + 1] - p[j - 1]) / h;
                if !(d_h.is_finite() && d_half.is_finite()) {
                    return Err(GhError::Numerical(format!(
                        "non-finite derivative sample of sinh·ψ{} at x = {}",
                        i + 1,
                        fine[j]
                    )));
                }
                coarse_step = coarse_step.max(d_h.abs());
                fine_step = fine_step.max(d_half.abs());
            }
            g[i] = fine_step;
            refinement[i] = (coarse_step - fine_step).abs() / fine_step;
        }

        let c = 2.0 * g[0].max(g[1]);
        let epsilon = (g[0] * g[0] + g[1] * g[1]) / (c * c);
        Ok(BlanusaConstants {
            area,
            g1: g[0],
            g2: g[1],
            c,
            epsilon,
            quadrature: q,
            sup_grid_points,
            sup_refinement: refinement,
        })
    }

    /// Default quadrature (`abs_tol = 1e-10`) and a 10⁵-node sup scan.
    pub fn standard() -> Result<Self> {
        BlanusaConstants::compute(QuadratureSpec::default(), DEFAULT_SUP_GRID_POINTS)
    }

    /// Whether both sup-norms were stable under halving the difference step.
    pub fn sup_refinement_ok(&self) -> bool {
        self.sup_refinement.iter().all(|r| *r <= SUP_REFINEMENT_TOL)
    }

    /// `ψ₁(x) = √(∫₀^{1+x} χ / A)`.
    pub fn psi1(&self, x: f64) -> Result<f64> {
        normalized_root(chi_primitive(1.0 + x, &self.quadrature)?, self.area)
    }

    /// `ψ₂(x) = √(∫₀ˣ χ / A)`.
    pub fn psi2(&self, x: f64) -> Result<f64> {
        normalized_root(chi_primitive(x, &self.quadrature)?, self.area)
    }

    /// `h(x, y) = sinh(x)/c · (ψ₁ cos cy, ψ₁ sin cy, ψ₂ cos cy, ψ₂ sin cy)`.
    pub fn h(&self, x: f64, y: f64) -> Result<[f64; 4]> {
        let scale = x.sinh() / self.c;
        let (p1, p2) = (self.psi1(x)?, self.psi2(x)?);
        let (s, co) = (self.c * y).sin_cos();
        Ok([scale * p1 * co, scale * p1 * s, scale * p2 * co, scale * p2 * s])
    }

    /// `f₀(x, y) = (√(1-ε²)·sinh⁻¹(y eˣ), log √(e^{-2x} + y²), h(ψ(x, y)))`.
    pub fn f0(&self, x: f64, y: f64) -> Result<[f64; 6]> {
        let [u, v] = psi_coords(x, y);
        let helix = self.h(u, v)?;
        let stretch = (1.0 - self.epsilon * self.epsilon).sqrt();
        Ok([stretch * u, v, helix[0], helix[1], helix[2], helix[3]])
    }

    /// The embedding of `Hⁿ` into ℝ^{6n-6} for `n = ys.len() + 1`:
    /// `κ (f₀(x, √(n-1) y₁), …, f₀(x, √(n-1) y_{n-1}))` with `κ = 1/√(n-1)`.
    pub fn f_general(&self, x: f64, ys: &[f64]) -> Result<Vec<f64>> {
        if ys.is_empty() {
            return Err(GhError::param("the general embedding needs n >= 2 (at least one y)"));
        }
        let m = ys.len() as f64;
        let (root, kappa) = (m.sqrt(), 1.0 / m.sqrt());
        let mut out = Vec::with_capacity(6 * ys.len());
        for &y in ys {
            out.extend(self.f0(x, root * y)?.iter().map(|v| kappa * v));
        }
        Ok(out)
    }

    /// `F = f₀` applied row by row to a horocyclic cloud.
    pub fn embed_cloud(&self, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.chart() != Chart::HorocyclicH2 {
            return Err(GhError::Chart(format!(
                "the hyperbolic embedding expects a horocyclic-H2 cloud, got {}",
                cloud.chart()
            )));
        }
        let rows: Vec<[f64; 6]> = (0..cloud.len())
            .into_par_iter()
            .map(|i| {
                let p = cloud.point(i);
                self.f0(p[0], p[1])
            })
            .collect::<Result<_>>()?;
        let coords = rows.into_iter().flatten().collect();
        PointCloud::new(Chart::AMBIENT_E6, coords)
    }

    /// Central-difference pullback metric of `F` at `(x, y)`.
    pub fn pullback_metric(&self, x: f64, y: f64, step: f64) -> Result<PullbackDiagnostic> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(GhError::param(format!("difference step must be positive, got {step}")));
        }
        let column = |dx: f64, dy: f64| -> Result<[f64; 6]> {
            let plus = self.f0(x + dx, y + dy)?;
            let minus = self.f0(x - dx, y - dy)?;
            let mut col = [0.0; 6];
            for k in 0..6 {
                col[k] = (plus[k] - minus[k]) / (2.0 * step);
            }
            Ok(col)
        };
        let jx = column(step, 0.0)?;
        let jy = column(0.0, step)?;
        let dot = |a: &[f64; 6], b: &[f64; 6]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let (gxx, gxy, gyy) = (dot(&jx, &jx), dot(&jx, &jy), dot(&jy, &jy));
        let metric = [[gxx, gxy], [gxy, gyy]];
        let target_yy = (2.0 * x).exp();
        let deviation =
            ((gxx - 1.0).powi(2) + 2.0 * gxy * gxy + (gyy - target_yy).powi(2)).sqrt();
        if !deviation.is_finite() {
            return Err(GhError::Numerical(format!(
                "non-finite pullback metric at ({x}, {y})"
            )));
        }
        Ok(PullbackDiagnostic { x, y, metric, deviation })
    }
}

/// Primitive `t ↦ ∫₀ᵗ χ` at every entry of `points`, accumulated piecewise
/// outward from 0 over the sorted points. Each piece gets a share of
/// `q.abs_tol` proportional to its length.
fn cumulative_chi_integral(points: &[f64], q: &QuadratureSpec) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    let lo = points[order[0]].min(0.0);
    let hi = points[order[points.len() - 1]].max(0.0);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let piece = |a: f64, b: f64| -> Result<f64> {
        let tol = (q.abs_tol * (b - a).abs() / span).max(f64::MIN_POSITIVE);
        adaptive_simpson(chi, a, b, &QuadratureSpec { abs_tol: tol, ..*q })
    };

    let split = order.partition_point(|&i| points[i] < 0.0);
    let mut out = vec![0.0; points.len()];
    let (mut acc, mut prev) = (0.0, 0.0);
    for &i in &order[split..] {
        acc += piece(prev, points[i])?;
        prev = points[i];
        out[i] = acc;
    }
    let (mut acc, mut prev) = (0.0, 0.0);
    for &i in order[..split].iter().rev() {
        acc += piece(prev, points[i])?;
        prev = points[i];
        out[i] = acc;
    }
    Ok(out)
}

/// Invariant checks and pullback deviations for one set of constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticReport {
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "G1")]
    pub g1: f64,
    #[serde(rename = "G2")]
    pub g2: f64,
    pub c: f64,
    pub epsilon: f64,
    pub sup_refinement: [f64; 2],
    /// `max |ψ₁² + ψ₂² - 1|` on 401 nodes of `[-2, 2]`.
    pub psi_identity_max_error: f64,
    /// `max |c‖h(x, y)‖ - |sinh x|| / |sinh x|` on a 20 × 20 grid of `[-2, 2]²`.
    pub h_norm_max_rel_error: f64,
    /// `max_k |F(0, 0)_k|`.
    pub origin_max_abs: f64,
    /// `max |χ(t + 1) + χ(t)|` and `max |χ(-t) + χ(t)|` over 1000 random `t`.
    pub chi_antiperiodicity_max_error: f64,
    pub pullback_step: f64,
    pub pullback_deviations: Vec<PullbackDiagnostic>,
    pub max_pullback_deviation: f64,
}

/// Thresholds for the hard invariants of [`DiagnosticReport`].
pub const PSI_IDENTITY_TOL: f64 = 1e-8;
pub const H_NORM_REL_TOL: f64 = 1e-9;
pub const ORIGIN_TOL: f64 = 1e-10;
pub const CHI_SYMMETRY_TOL: f64 = 1e-14;

impl DiagnosticReport {
    pub fn hard_invariants_hold(&self) -> bool {
        self.psi_identity_max_error <= PSI_IDENTITY_TOL
            && self.h_norm_max_rel_error <= H_NORM_REL_TOL
            && self.origin_max_abs <= ORIGIN_TOL
            && self.chi_antiperiodicity_max_error <= CHI_SYMMETRY_TOL
            && self.pullback_deviations.iter().all(|d| d.deviation.is_finite())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// Runs the invariant suite and the pullback scan on a `grid × grid` lattice
/// over `[-0.5, 0.5]²`.
pub fn diagnose(consts: &BlanusaConstants, grid: usize, step: f64, seed: u64) -> Result<DiagnosticReport> {
    let psi_identity_max_error = linspace(-2.0, 2.0, 401)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&x| {
            let (a, b) = (consts.psi1(x)?, consts.psi2(x)?);
            Ok((a * a + b * b - 1.0).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut h_norm_max_rel_error = 0.0_f64;
    for x in linspace(-2.0, 2.0, 20) {
        for y in linspace(-2.0, 2.0, 20) {
            let v = consts.h(x, y)?;
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt() * consts.c;
            let target = x.sinh().abs();
            let err = if target == 0.0 { norm } else { (norm - target).abs() / target };
            h_norm_max_rel_error = h_norm_max_rel_error.max(err);
        }
    }

    let origin_max_abs = consts.f0(0.0, 0.0)?.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chi_antiperiodicity_max_error = 0.0_f64;
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(-4.0..4.0);
        let e1 = (chi(t + 1.0) + chi(t)).abs();
        let e2 = (chi(-t) + chi(t)).abs();
        chi_antiperiodicity_max_error = chi_antiperiodicity_max_error.max(e1).max(e2);
    }

    let mut pullback_deviations = Vec::with_capacity(grid * grid);
    for x in linspace(-0.5, 0.5, grid) {
        for y in linspace(-0.5, 0.5, grid) {
            pullback_deviations.push(consts.pullback_metric(x, y, step)?);
        }
    }
    let max_pullback_deviation = pullback_deviations.iter().map(|d| d.deviation).fold(0.0, f64::max);

    Ok(DiagnosticReport {
        area: consts.area,
        g1: consts.g1,
        g2: consts.g2,
        c: consts.c,
        epsilon: consts.epsilon,
        sup_refinement: consts.sup_refinement,
        psi_identity_max_error,
        h_norm_max_rel_error,
        origin_max_abs,
        chi_antiperiodicity_max_error,
        pullback_step: step,
        pullback_deviations,
        max_pullback_deviation,
    })
}
