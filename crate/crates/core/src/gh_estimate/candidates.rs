use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::geometry::{Chart, PointCloud, Resolution};

pub const AMBIENT_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// A plane placed on two basis axes.
    EuclideanPlane,
    /// An extrinsic sphere placed on three basis axes, optionally negated.
    SphereTriple,
}

impl Family {
    pub fn source_dim(self) -> usize {
        match self {
            Family::EuclideanPlane => 2,
            Family::SphereTriple => 3,
        }
    }
}

/// One rigid placement of a source chart into ℝ⁶: coordinates (negated if
/// `negate`) go to `axes`, the rest are zero, and `offset_value` is added
/// to coordinate `offset_axis`. Axes are 1-based basis indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCandidate {
    pub family: Family,
    pub axes: Vec<u8>,
    pub negate: bool,
    pub offset_axis: u8,
    pub offset_value: f64,
}

impl EmbeddingCandidate {
    pub fn validate(&self) -> Result<()> {
        if self.axes.len() != self.family.source_dim() {
            return Err(GhError::param(format!(
                "{:?} needs {} axes, got {}",
                self.family,
                self.family.source_dim(),
                self.axes.len()
            )));
        }
        let in_range = |a: u8| (1..=AMBIENT_DIM as u8).contains(&a);
        if !self.axes.iter().all(|&a| in_range(a)) || !in_range(self.offset_axis) {
            return Err(GhError::param(format!("axes must lie in 1..=6: {:?}", self)));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[..i].contains(a) {
                return Err(GhError::param(format!("repeated axis {a} in {:?}", self.axes)));
            }
        }
        if self.negate && self.family == Family::EuclideanPlane {
            return Err(GhError::param("negation applies to the sphere family only"));
        }
        if !self.offset_value.is_finite() {
            return Err(GhError::param("offset must be finite"));
        }
        Ok(())
    }

    pub(crate) fn sign(&self) -> f64 {
        if self.negate {
            -1.0
        } else {
            1.0
        }
    }

    /// Writes the image of `src` into `out`.
    pub(crate) fn place(&self, src: &[f64], out: &mut [f64; AMBIENT_DIM]) {
        *out = [0.0; AMBIENT_DIM];
        let sign = self.sign();
        for (&axis, &v) in self.axes.iter().zip(src) {
            out[axis as usize - 1] = sign * v;
        }
        out[self.offset_axis as usize - 1] += self.offset_value;
    }
}

/// Places every point of `cloud` according to `c`.
pub fn apply_candidate(c: &EmbeddingCandidate, cloud: &PointCloud) -> Result<PointCloud> {
    c.validate()?;
    if cloud.ambient_dim() != c.family.source_dim() {
        return Err(GhError::param(format!(
            "{:?} places {}-dimensional points, cloud has dimension {}",
            c.family,
            c.family.source_dim(),
            cloud.ambient_dim()
        )));
    }
    let mut coords = Vec::with_capacity(cloud.len() * AMBIENT_DIM);
    let mut buf = [0.0; AMBIENT_DIM];
    for p in cloud.points() {
        c.place(p, &mut buf);
        coords.extend_from_slice(&buf);
    }
    PointCloud::new(Chart::AMBIENT_E6, coords)
}

/// Knobs of the candidate search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CandidateGridSpec {
    pub offset_steps: usize,
    pub offset_range: (f64, f64),
    pub offset_axes: Vec<u8>,
    pub coarse: Resolution,
    pub fine: Resolution,
    pub refine_top_k: usize,
    /// Score every candidate at the fine resolution and skip the coarse pass.
    pub exhaustive: bool,
}

impl Default for CandidateGridSpec {
    fn default() -> Self {
        CandidateGridSpec {
            offset_steps: 100,
            offset_range: (-0.5, 0.5),
            offset_axes: (1..=AMBIENT_DIM as u8).collect(),
            coarse: Resolution::new(30, 30),
            fine: Resolution::new(100, 100),
            refine_top_k: 50,
            exhaustive: false,
        }
    }
}

impl CandidateGridSpec {
    /// Reduced setting that runs in minutes: 20 offset steps, 30×30 coarse
    /// clouds, 100×100 fine clouds, top 50 refined.
    pub fn desk_scale() -> Self {
        CandidateGridSpec { offset_steps: 20, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.offset_range;
        if self.offset_steps < 1 {
            return Err(GhError::param("offset_steps must be at least 1"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(GhError::param(format!("offset range [{lo}, {hi}] is invalid")));
        }
        if self.refine_top_k < 1 {
            return Err(GhError::param("refine_top_k must be at least 1"));
        }
        if self.offset_axes.is_empty()
            || !self.offset_axes.iter().all(|a| (1..=AMBIENT_DIM as u8).contains(a))
        {
            return Err(GhError::param(format!("offset axes {:?} must lie in 1..=6", self.offset_axes)));
        }
        for r in [self.coarse, self.fine] {
            if r.n_radial < 2 || r.n_angular < 2 {
                return Err(GhError::param(format!("resolution {r} too small")));
            }
        }
        Ok(())
    }

    /// Offset values, inclusive of both ends; a single step sits at the midpoint.
    pub fn offsets(&self) -> Vec<f64> {
        let (lo, hi) = self.offset_range;
        let n = self.offset_steps;
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()
    }
}

fn ordered_tuples(k: usize) -> Vec<Vec<u8>> {
    fn extend(prefix: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for a in 1..=AMBIENT_DIM as u8 {
            if !prefix.contains(&a) {
                prefix.push(a);
                extend(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(k), k, &mut out);
    out
}

fn enumerate(family: Family, negations: &[bool], grid: &CandidateGridSpec) -> Vec<EmbeddingCandidate> {
    let offsets = grid.offsets();
    let zero_axis = grid.offset_axes.first().copied().unwrap_or(1);
    let mut out = Vec::new();
    for axes in ordered_tuples(family.source_dim()) {
        for &negate in negations {
            let make = |offset_axis: u8, offset_value: f64| EmbeddingCandidate {
                family,
                axes: axes.clone(),
                negate,
                offset_axis,
                offset_value,
            };
            out.push(make(zero_axis, 0.0));
            for &axis in &grid.offset_axes {
                for &value in &offsets {
                    // A zero offset repeats the candidate pushed above.
                    if value != 0.0 {
                        out.push(make(axis, value));
                    }
                }
            }
        }
    }
    out
}

/// All ordered axis pairs, each with the zero offset and the offset grid.
pub fn enumerate_euclidean_candidates(grid: &CandidateGridSpec) -> Vec<EmbeddingCandidate> {
    enumerate(Family::EuclideanPlane, &[false], grid)
}

/// All ordered axis triples, with and without negation, each with the
/// zero offset and the offset grid.
pub fn enumerate_sphere_candidates(grid: &CandidateGridSpec) -> Vec<EmbeddingCandidate> {
    enumerate(Family::SphereTriple, &[false, true], grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hausdorff::euclidean_diameter;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_counts() {
        let grid = CandidateGridSpec::default();
        assert_eq!(enumerate_euclidean_candidates(&grid).len(), 30 * (6 * 100 + 1));
        assert_eq!(enumerate_sphere_candidates(&grid).len(), 120 * 2 * (6 * 100 + 1));
    }

    #[test]
    fn degenerate_grid_deduplicates_zero_offsets() {
        let grid = CandidateGridSpec {
            offset_steps: 1,
            offset_axes: vec![1],
            offset_range: (0.0, 0.0),
            ..Default::default()
        };
        let cands = enumerate_euclidean_candidates(&grid);
        assert_eq!(cands.len(), 30);
        assert!(cands.iter().all(|c| c.offset_value == 0.0));
    }

    #[test]
    fn axes_are_distinct_and_valid() {
        let grid = CandidateGridSpec { offset_steps: 3, ..Default::default() };
        for c in enumerate_euclidean_candidates(&grid).iter().chain(&enumerate_sphere_candidates(&grid)) {
            c.validate().unwrap();
        }
    }

    #[test]
    fn offsets_include_endpoints() {
        let grid = CandidateGridSpec { offset_steps: 5, ..Default::default() };
        assert_eq!(grid.offsets(), vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
    }

    #[test]
    fn placement_examples() {
        let e = PointCloud::from_rows(Chart::PolarEuclidean, &[[0.3, -0.7]]).unwrap();
        let c = EmbeddingCandidate {
            family: Family::EuclideanPlane,
            axes: vec![1, 2],
            negate: false,
            offset_axis: 1,
            offset_value: 0.0,
        };
        assert_eq!(apply_candidate(&c, &e).unwrap().coords(), &[0.3, -0.7, 0.0, 0.0, 0.0, 0.0]);

        let s = PointCloud::from_rows(Chart::ExtrinsicSphere, &[[0.1, 0.2, 0.3]]).unwrap();
        let c = EmbeddingCandidate {
            family: Family::SphereTriple,
            axes: vec![4, 5, 6],
            negate: true,
            offset_axis: 1,
            offset_value: 0.5,
        };
        assert_eq!(apply_candidate(&c, &s).unwrap().coords(), &[0.5, 0.0, 0.0, -0.1, -0.2, -0.3]);
        assert!(apply_candidate(&c, &e).is_err());
    }

    #[test]
    fn placement_preserves_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let grid = CandidateGridSpec { offset_steps: 4, ..Default::default() };
        let cands = enumerate_sphere_candidates(&grid);
        for _ in 0..100 {
            let c = &cands[rng.gen_range(0..cands.len())];
            let rows: Vec<[f64; 3]> = (0..2).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
            let src = PointCloud::from_rows(Chart::ExtrinsicSphere, &rows).unwrap();
            let placed = apply_candidate(c, &src).unwrap();
            let d_src = euclidean_diameter(&PointCloud::new(Chart::Ambient(3), src.coords().to_vec()).unwrap());
            assert!((euclidean_diameter(&placed) - d_src).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_catches_bad_candidates() {
        let mut c = EmbeddingCandidate {
            family: Family::EuclideanPlane,
            axes: vec![2, 2],
            negate: false,
            offset_axis: 1,
            offset_value: 0.0,
        };
        assert!(c.validate().is_err());
        c.axes = vec![1, 7];
        assert!(c.validate().is_err());
        c.axes = vec![1, 2];
        c.negate = true;
        assert!(c.validate().is_err());
    }
}
