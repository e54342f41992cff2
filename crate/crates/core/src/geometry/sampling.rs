use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cloud::{Chart, PointCloud};
use super::hyperbolic::{disk_to_horocyclic, exp_map_h2};
use super::signature::{ModelSpace, SpaceKind};
use crate::error::{GhError, Result};

/// Smallest geodesic radius sampled on the hyperbolic ball.
pub const HYPERBOLIC_R_MIN: f64 = 1e-8;
/// Largest geodesic radius sampled on the hyperbolic ball; beyond it the
/// embedding's integrals are evaluated too far from the origin.
pub const HYPERBOLIC_R_MAX: f64 = 0.97;

/// Grid size of a polar sampling, `n_radial x n_angular`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Resolution {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Resolution {
    pub const fn new(n_radial: usize, n_angular: usize) -> Self {
        Resolution { n_radial, n_angular }
    }

    pub fn point_count(&self) -> usize {
        self.n_radial * self.n_angular
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_radial, self.n_angular)
    }
}

impl FromStr for Resolution {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GhError::Format(format!("expected RxT grid such as 100x100, got '{s}'"));
        let (r, t) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Ok(Resolution {
            n_radial: r.trim().parse().map_err(|_| bad())?,
            n_angular: t.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Tensor-grid sampling of a unit ball: `n_radial` radii from `r_min` to
/// `r_max` inclusive, crossed with `n_angular` angles `2πk/n_angular`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl SamplingSpec {
    pub fn new(n_radial: usize, n_angular: usize, r_min: f64, r_max: f64) -> Self {
        SamplingSpec { n_radial, n_angular, r_min, r_max }
    }

    /// The standard radial range for `space` at the given grid size.
    pub fn for_space(space: ModelSpace, res: Resolution) -> Self {
        let (r_min, r_max) = match space.kind {
            SpaceKind::Euclidean | SpaceKind::Spherical => (0.0, 1.0),
            SpaceKind::Hyperbolic => (HYPERBOLIC_R_MIN, HYPERBOLIC_R_MAX),
        };
        SamplingSpec::new(res.n_radial, res.n_angular, r_min, r_max)
    }

    pub fn resolution(&self) -> Resolution {
        Resolution::new(self.n_radial, self.n_angular)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_radial < 2 || self.n_angular < 2 {
            return Err(GhError::param(format!(
                "grid {}x{} too small, both counts must be at least 2",
                self.n_radial, self.n_angular
            )));
        }
        if !(self.r_min.is_finite() && self.r_max.is_finite()) {
            return Err(GhError::param("radial bounds must be finite"));
        }
        if !(0.0 <= self.r_min && self.r_min < self.r_max && self.r_max <= 1.0) {
            return Err(GhError::param(format!(
                "radial range [{}, {}] must satisfy 0 <= r_min < r_max <= 1",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }

    fn validate_hyperbolic(&self) -> Result<()> {
        self.validate()?;
        if self.r_min < HYPERBOLIC_R_MIN || self.r_max > HYPERBOLIC_R_MAX {
            return Err(GhError::param(format!(
                "hyperbolic radial range [{}, {}] must lie within [{HYPERBOLIC_R_MIN}, {HYPERBOLIC_R_MAX}]",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }

    fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let last = (self.n_radial - 1) as f64;
        (0..self.n_radial).map(move |i| {
            if i + 1 == self.n_radial {
                self.r_max
            } else {
                self.r_min + (self.r_max - self.r_min) * (i as f64 / last)
            }
        })
    }

    fn angles(&self) -> Vec<f64> {
        (0..self.n_angular)
            .map(|k| TAU * k as f64 / self.n_angular as f64)
            .collect()
    }

    fn polar_grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let angles = self.angles();
        self.radii()
            .flat_map(move |r| angles.clone().into_iter().map(move |t| (r, t)))
    }
}

/// `(r cos t, r sin t)` over the polar grid.
pub fn sample_euclidean_ball(spec: &SamplingSpec) -> Result<PointCloud> {
    spec.validate()?;
    let coords = spec
        .polar_grid()
        .flat_map(|(r, t)| [r * t.cos(), r * t.sin()])
        .collect();
    PointCloud::new(Chart::PolarEuclidean, coords)
}

/// `(sin β cos α, sin β sin α, cos β)` with β on the radial grid, α on the angular one.
pub fn sample_sphere_cap(spec: &SamplingSpec) -> Result<PointCloud> {
    spec.validate()?;
    let coords = spec
        .polar_grid()
        .flat_map(|(beta, alpha)| {
            let (sb, cb) = beta.sin_cos();
            [sb * alpha.cos(), sb * alpha.sin(), cb]
        })
        .collect();
    PointCloud::new(Chart::ExtrinsicSphere, coords)
}

/// Exponential-map image of the polar grid, in horocyclic coordinates.
pub fn sample_hyperbolic_ball(spec: &SamplingSpec) -> Result<PointCloud> {
    spec.validate_hyperbolic()?;
    let mut coords = Vec::with_capacity(2 * spec.n_radial * spec.n_angular);
    for (r, t) in spec.polar_grid() {
        coords.extend_from_slice(&disk_to_horocyclic(exp_map_h2(r, t))?);
    }
    PointCloud::new(Chart::HorocyclicH2, coords)
}

/// Dispatches to the sampler for `space`.
pub fn sample(space: ModelSpace, spec: &SamplingSpec) -> Result<PointCloud> {
    match space.kind {
        SpaceKind::Euclidean => sample_euclidean_ball(spec),
        SpaceKind::Spherical => sample_sphere_cap(spec),
        SpaceKind::Hyperbolic => sample_hyperbolic_ball(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_diameter, horocyclic_distance};

    #[test]
    fn tiny_euclidean_grid() {
        let c = sample_euclidean_ball(&SamplingSpec::new(2, 4, 0.0, 1.0)).unwrap();
        assert_eq!(c.len(), 8);
        for i in 0..4 {
            assert_eq!(c.point(i), &[0.0, 0.0]);
        }
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (i, e) in expected.iter().enumerate() {
            let p = c.point(4 + i);
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(sample_euclidean_ball(&SamplingSpec::new(1, 4, 0.0, 1.0)).is_err());
        assert!(sample_euclidean_ball(&SamplingSpec::new(4, 1, 0.0, 1.0)).is_err());
        assert!(sample_euclidean_ball(&SamplingSpec::new(4, 4, 0.5, 0.5)).is_err());
        assert!(sample_euclidean_ball(&SamplingSpec::new(4, 4, 0.0, 1.2)).is_err());
        assert!(sample_sphere_cap(&SamplingSpec::new(4, 4, -0.1, 1.0)).is_err());
        assert!(sample_hyperbolic_ball(&SamplingSpec::new(4, 4, 0.0, 0.9)).is_err());
        assert!(sample_hyperbolic_ball(&SamplingSpec::new(4, 4, 1e-8, 0.98)).is_err());
    }

    #[test]
    fn standard_grids_have_ten_thousand_points() {
        let res = Resolution::new(100, 100);
        let e = sample(ModelSpace::E2, &SamplingSpec::for_space(ModelSpace::E2, res)).unwrap();
        let s = sample(ModelSpace::S2, &SamplingSpec::for_space(ModelSpace::S2, res)).unwrap();
        let h = sample(ModelSpace::H2, &SamplingSpec::for_space(ModelSpace::H2, res)).unwrap();
        assert_eq!((e.len(), s.len(), h.len()), (10_000, 10_000, 10_000));
        let max_norm = e.points().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        assert!((max_norm - 1.0).abs() < 1e-15);
        for p in s.points() {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((n - 1.0).abs() <= 1e-12);
        }
        for p in h.points() {
            assert!(horocyclic_distance([0.0, 0.0], [p[0], p[1]]) <= 0.97 + 1e-9);
        }
    }

    #[test]
    fn sphere_pole_row() {
        let c = sample_sphere_cap(&SamplingSpec::new(3, 5, 0.0, 1.0)).unwrap();
        for i in 0..5 {
            assert_eq!(c.point(i), &[0.0, 0.0, 1.0]);
        }
        let far = c.point(14);
        let angle = far[2].acos();
        assert!((angle - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_single_ray_matches_composition() {
        let c = sample_hyperbolic_ball(&SamplingSpec::new(2, 2, 0.25, 0.5)).unwrap();
        // Row (r = 0.5, θ = 0): disk point (tanh 0.25, 0).
        let a = 0.25f64.tanh();
        let expected = -((1.0 + a) / (1.0 - a)).ln();
        let p = c.point(2);
        assert!((p[0] - expected).abs() < 1e-14 && p[1].abs() < 1e-15);
        // Geodesic radius 0.5 means x = -0.5 on the real axis.
        assert!((p[0] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn samplers_are_deterministic() {
        let spec = SamplingSpec::new(17, 23, 1e-8, 0.97);
        assert_eq!(sample_hyperbolic_ball(&spec).unwrap(), sample_hyperbolic_ball(&spec).unwrap());
    }

    #[test]
    fn euclidean_diameter_approaches_two() {
        let c = sample_euclidean_ball(&SamplingSpec::new(10, 100, 0.0, 1.0)).unwrap();
        assert!(geodesic_diameter(&c).unwrap() >= 1.99);
    }

    #[test]
    fn resolution_parsing() {
        assert_eq!("30x40".parse::<Resolution>().unwrap(), Resolution::new(30, 40));
        assert!("30".parse::<Resolution>().is_err());
        assert!("ax3".parse::<Resolution>().is_err());
    }
}
