//! Upper-bound estimates of Gromov-Hausdorff distances between unit balls.
//!
//! The hyperbolic ball is sampled, pushed into ℝ⁶ once by the embedding `F`,
//! and indexed. Every candidate placement of the Euclidean (or spherical)
//! ball is scored by its exact symmetric Hausdorff distance to that image,
//! and the smallest score is the estimate. A coarse pass over all candidates
//! keeps the best `refine_top_k`, which are then re-scored on finer clouds.

mod cache;
mod candidates;
mod table;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blanusa::BlanusaConstants;
use crate::error::{GhError, Result};
use crate::geometry::{geodesic_diameter, sample, ModelSpace, PointCloud, Resolution, SamplingSpec};
use crate::hausdorff::NearestNeighborIndex;

pub use cache::{CachedEstimate, DistanceCache};
pub use candidates::{
    apply_candidate, enumerate_euclidean_candidates, enumerate_sphere_candidates, CandidateGridSpec,
    EmbeddingCandidate, Family, AMBIENT_DIM,
};
pub use table::{
    analytic_gh_e2_s2, signature_distance, DistanceTable, Provenance, TableEntry, ANALYTIC_GH_E2_S2,
    PUBLISHED_GH_E2_H2, PUBLISHED_GH_S2_H2,
};

/// The model-space pairs estimated numerically against H².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelPair {
    E2H2,
    S2H2,
}

impl ModelPair {
    pub fn source(self) -> ModelSpace {
        match self {
            ModelPair::E2H2 => ModelSpace::E2,
            ModelPair::S2H2 => ModelSpace::S2,
        }
    }

    pub fn family(self) -> Family {
        match self {
            ModelPair::E2H2 => Family::EuclideanPlane,
            ModelPair::S2H2 => Family::SphereTriple,
        }
    }

    pub fn candidates(self, grid: &CandidateGridSpec) -> Vec<EmbeddingCandidate> {
        match self {
            ModelPair::E2H2 => enumerate_euclidean_candidates(grid),
            ModelPair::S2H2 => enumerate_sphere_candidates(grid),
        }
    }
}

impl std::str::FromStr for ModelPair {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e2h2" | "e2-h2" => Ok(ModelPair::E2H2),
            "s2h2" | "s2-h2" => Ok(ModelPair::S2H2),
            _ => Err(GhError::Format(format!("unknown pair '{s}', expected e2h2 or s2h2"))),
        }
    }
}

impl std::fmt::Display for ModelPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelPair::E2H2 => "e2h2",
            ModelPair::S2H2 => "s2h2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GHEstimate {
    pub pair: (ModelSpace, ModelSpace),
    pub value: f64,
    pub best_candidate: EmbeddingCandidate,
    /// Best score of the coarse pass (equal to `value` in exhaustive mode).
    pub coarse_value: f64,
    /// Source and target sampling of the final scoring pass.
    pub cloud_specs_used: (SamplingSpec, SamplingSpec),
    pub candidates_evaluated: usize,
}

/// Scores candidate placements of a fixed source cloud against a fixed
/// cloud in ℝ⁶.
///
/// Both directions of the Hausdorff distance use an index built once: the
/// target index answers `source → target` queries for the placed source
/// points, and the source index answers `target → source` queries after
/// undoing the placement. For a rigid placement the squared distance from a
/// target point `q` to a placed source point splits into the part of
/// `q - offset` orthogonal to the candidate's axes plus a distance inside
/// the source chart, so one source index serves every candidate.
pub struct CandidateScorer {
    source: PointCloud,
    source_index: NearestNeighborIndex,
    target: PointCloud,
    target_index: NearestNeighborIndex,
}

impl CandidateScorer {
    pub fn new(source: &PointCloud, target: &PointCloud) -> Result<Self> {
        if target.ambient_dim() != AMBIENT_DIM {
            return Err(GhError::param(format!(
                "target cloud must live in ℝ⁶, got dimension {}",
                target.ambient_dim()
            )));
        }
        if source.is_empty() || target.is_empty() {
            return Err(GhError::param("scoring needs non-empty clouds"));
        }
        Ok(CandidateScorer {
            source: source.clone(),
            source_index: NearestNeighborIndex::from_coords(source.coords(), source.ambient_dim()),
            target: target.clone(),
            target_index: NearestNeighborIndex::from_coords(target.coords(), AMBIENT_DIM),
        })
    }

    pub fn source(&self) -> &PointCloud {
        &self.source
    }

    pub fn target(&self) -> &PointCloud {
        &self.target
    }

    /// Symmetric Hausdorff distance between the placed source and the target.
    pub fn score(&self, c: &EmbeddingCandidate) -> Result<f64> {
        c.validate()?;
        let dim = self.source.ambient_dim();
        if dim != c.family.source_dim() {
            return Err(GhError::param(format!(
                "{:?} candidate cannot place a {dim}-dimensional cloud",
                c.family
            )));
        }

        // Only the running maximum matters, so each query may stop as soon as
        // it finds a point closer than that. Grid clouds list the outer ring
        // last; scanning backwards raises the maximum early.
        let mut placed = [0.0; AMBIENT_DIM];
        let mut worst = 0.0_f64;
        for p in self.source.points().rev() {
            c.place(p, &mut placed);
            worst = worst.max(self.target_index.nearest_squared_beyond(&placed, worst));
        }

        let sign = c.sign();
        let offset_axis = c.offset_axis as usize - 1;
        let mut on_axis = [false; AMBIENT_DIM];
        for &a in &c.axes {
            on_axis[a as usize - 1] = true;
        }
        let mut local = [0.0; 3];
        for q in self.target.points().rev() {
            let mut shifted = [0.0; AMBIENT_DIM];
            shifted.copy_from_slice(q);
            shifted[offset_axis] -= c.offset_value;
            let mut orthogonal = 0.0;
            for k in 0..AMBIENT_DIM {
                if !on_axis[k] {
                    orthogonal += shifted[k] * shifted[k];
                }
            }
            for (slot, &a) in local.iter_mut().zip(&c.axes) {
                *slot = sign * shifted[a as usize - 1];
            }
            let bound = worst - orthogonal;
            let inside = self.source_index.nearest_squared_beyond(&local[..dim], bound);
            if inside > bound {
                worst = worst.max(orthogonal + inside);
            }
        }
        Ok(worst.sqrt())
    }

    /// Scores in enumeration order, computed in parallel.
    pub fn score_all(&self, candidates: &[EmbeddingCandidate]) -> Result<Vec<f64>> {
        candidates.par_iter().map(|c| self.score(c)).collect()
    }

    /// Position and score of the best candidate; ties go to the lowest position.
    pub fn best(&self, candidates: &[EmbeddingCandidate]) -> Result<(usize, f64)> {
        if candidates.is_empty() {
            return Err(GhError::param("no candidates to score"));
        }
        let scores = self.score_all(candidates)?;
        Ok(argmin(&scores))
    }
}

fn argmin(scores: &[f64]) -> (usize, f64) {
    scores
        .iter()
        .copied()
        .enumerate()
        .fold((usize::MAX, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
}

/// Runs the coarse-to-fine search of `candidates` for `source` against a
/// target cloud in ℝ⁶ produced at each resolution by `target_at`.
fn search_candidates<T>(
    source: ModelSpace,
    target_space: ModelSpace,
    target_at: T,
    candidates: &[EmbeddingCandidate],
    grid: &CandidateGridSpec,
) -> Result<GHEstimate>
where
    T: Fn(Resolution) -> Result<(SamplingSpec, PointCloud)>,
{
    grid.validate()?;
    if candidates.is_empty() {
        return Err(GhError::param("the candidate list is empty"));
    }
    let scorer_at = |res: Resolution| -> Result<(SamplingSpec, SamplingSpec, CandidateScorer)> {
        let source_spec = SamplingSpec::for_space(source, res);
        let source_cloud = sample(source, &source_spec)?;
        let (target_spec, target_cloud) = target_at(res)?;
        Ok((source_spec, target_spec, CandidateScorer::new(&source_cloud, &target_cloud)?))
    };

    if grid.exhaustive {
        let (source_spec, target_spec, scorer) = scorer_at(grid.fine)?;
        let (best, value) = scorer.best(candidates)?;
        return Ok(GHEstimate {
            pair: (source, target_space),
            value,
            best_candidate: candidates[best].clone(),
            coarse_value: value,
            cloud_specs_used: (source_spec, target_spec),
            candidates_evaluated: candidates.len(),
        });
    }

    let (_, _, coarse) = scorer_at(grid.coarse)?;
    let coarse_scores = coarse.score_all(candidates)?;
    let mut ranked: Vec<usize> = (0..candidates.len()).collect();
    ranked.sort_by(|&a, &b| coarse_scores[a].total_cmp(&coarse_scores[b]).then(a.cmp(&b)));
    ranked.truncate(grid.refine_top_k);
    let coarse_value = coarse_scores[ranked[0]];

    let (source_spec, target_spec, fine) = scorer_at(grid.fine)?;
    // Re-score in enumeration order so ties resolve to the earliest candidate.
    ranked.sort_unstable();
    let shortlist: Vec<EmbeddingCandidate> = ranked.iter().map(|&i| candidates[i].clone()).collect();
    let (best, value) = fine.best(&shortlist)?;

    Ok(GHEstimate {
        pair: (source, target_space),
        value,
        best_candidate: shortlist[best].clone(),
        coarse_value,
        cloud_specs_used: (source_spec, target_spec),
        candidates_evaluated: candidates.len() + shortlist.len(),
    })
}

/// Samples the hyperbolic ball at `res` and embeds it into ℝ⁶.
pub fn embedded_hyperbolic_ball(res: Resolution, consts: &BlanusaConstants) -> Result<(SamplingSpec, PointCloud)> {
    let spec = SamplingSpec::for_space(ModelSpace::H2, res);
    let cloud = sample(ModelSpace::H2, &spec)?;
    Ok((spec, consts.embed_cloud(&cloud)?))
}

/// Estimates `d_GH(B_{E²}, B_{H²})` or `d_GH(B_{S²}, B_{H²})`.
pub fn estimate_gh(pair: ModelPair, grid: &CandidateGridSpec, consts: &BlanusaConstants) -> Result<GHEstimate> {
    let candidates = pair.candidates(grid);
    estimate_gh_with_candidates(pair, &candidates, grid, consts)
}

/// [`estimate_gh`] over an explicit candidate list.
pub fn estimate_gh_with_candidates(
    pair: ModelPair,
    candidates: &[EmbeddingCandidate],
    grid: &CandidateGridSpec,
    consts: &BlanusaConstants,
) -> Result<GHEstimate> {
    if let Some(c) = candidates.iter().find(|c| c.family != pair.family()) {
        return Err(GhError::param(format!("{:?} candidate supplied for pair {pair}", c.family)));
    }
    search_candidates(
        pair.source(),
        ModelSpace::H2,
        |res| embedded_hyperbolic_ball(res, consts),
        candidates,
        grid,
    )
}

/// Numeric counterpart of [`analytic_gh_e2_s2`]: the plane sits on axes
/// (1, 2) and the sphere candidates are searched against it. Not used for
/// the default table.
pub fn estimate_gh_e2_s2_numeric(grid: &CandidateGridSpec) -> Result<GHEstimate> {
    let plane = EmbeddingCandidate {
        family: Family::EuclideanPlane,
        axes: vec![1, 2],
        negate: false,
        offset_axis: 1,
        offset_value: 0.0,
    };
    let target_at = |res: Resolution| -> Result<(SamplingSpec, PointCloud)> {
        let spec = SamplingSpec::for_space(ModelSpace::E2, res);
        let cloud = sample(ModelSpace::E2, &spec)?;
        Ok((spec, apply_candidate(&plane, &cloud)?))
    };
    search_candidates(
        ModelSpace::S2,
        ModelSpace::E2,
        target_at,
        &enumerate_sphere_candidates(grid),
        grid,
    )
}

/// `max(diam A, diam B)` in the intrinsic metrics, an upper bound on `d_GH(A, B)`.
pub fn diameter_bound(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(geodesic_diameter(a)?.max(geodesic_diameter(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use crate::hausdorff::hausdorff_naive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(rng: &mut ChaCha8Rng, chart: Chart, n: usize) -> PointCloud {
        let coords = (0..n * chart.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PointCloud::new(chart, coords).unwrap()
    }

    #[test]
    fn scorer_matches_explicit_placement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let target = random_cloud(&mut rng, Chart::AMBIENT_E6, 150);
        let grid = CandidateGridSpec { offset_steps: 3, ..Default::default() };
        for (chart, cands) in [
            (Chart::PolarEuclidean, enumerate_euclidean_candidates(&grid)),
            (Chart::ExtrinsicSphere, enumerate_sphere_candidates(&grid)),
        ] {
            let source = random_cloud(&mut rng, chart, 120);
            let scorer = CandidateScorer::new(&source, &target).unwrap();
            for _ in 0..40 {
                let c = &cands[rng.gen_range(0..cands.len())];
                let placed = apply_candidate(c, &source).unwrap();
                let oracle = hausdorff_naive(&placed, &target).unwrap().distance;
                let fast = scorer.score(c).unwrap();
                assert!((fast - oracle).abs() < 1e-12, "{c:?}: {fast} vs {oracle}");
            }
        }
    }

    #[test]
    fn scorer_rejects_mismatched_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let target = random_cloud(&mut rng, Chart::AMBIENT_E6, 10);
        let source = random_cloud(&mut rng, Chart::PolarEuclidean, 10);
        let scorer = CandidateScorer::new(&source, &target).unwrap();
        let grid = CandidateGridSpec { offset_steps: 1, ..Default::default() };
        let sphere = enumerate_sphere_candidates(&grid);
        assert!(scorer.score(&sphere[0]).is_err());
        assert!(scorer.best(&[]).is_err());
        assert!(CandidateScorer::new(&source, &source).is_err());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("E2H2".parse::<ModelPair>().unwrap(), ModelPair::E2H2);
        assert_eq!("s2-h2".parse::<ModelPair>().unwrap(), ModelPair::S2H2);
        assert!("e2s2".parse::<ModelPair>().is_err());
    }

    #[test]
    fn argmin_prefers_first() {
        assert_eq!(argmin(&[0.3, 0.1, 0.1, 0.2]), (1, 0.1));
    }
}
