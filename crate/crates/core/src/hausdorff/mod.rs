//! Exact Hausdorff distances between point clouds sharing an ambient space.
//!
//! Three interchangeable routes compute the same numbers: a brute-force
//! double scan (the reference), the early-break scan that abandons an inner
//! loop once the running maximum cannot grow, and a k-d tree path. All of
//! them compare squared distances and take one square root at the end, so
//! they agree to the last bit on the distance. Witness ties go to the lowest
//! index.

mod kdtree;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};
use crate::geometry::PointCloud;
use kdtree::{squared_distance, KdTree};

/// One directed component `sup_{a ∈ A} d(a, B)` and the row of `A` attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Directed {
    pub distance: f64,
    pub witness: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffResult {
    pub distance: f64,
    pub witness_a: usize,
    pub witness_b: usize,
    pub direction_ab: f64,
    pub direction_ba: f64,
}

impl HausdorffResult {
    fn combine(ab: Directed, ba: Directed) -> Self {
        HausdorffResult {
            distance: ab.distance.max(ba.distance),
            witness_a: ab.witness,
            witness_b: ba.witness,
            direction_ab: ab.distance,
            direction_ba: ba.distance,
        }
    }
}

/// Which route [`hausdorff`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Naive,
    EarlyBreak { seed: u64 },
    Tree,
}

fn check_pair(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(GhError::param("Hausdorff distance needs non-empty clouds"));
    }
    if a.ambient_dim() != b.ambient_dim() {
        return Err(GhError::param(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    Ok(())
}

/// Running maximum keeping the earliest index on ties.
#[derive(Clone, Copy)]
struct ArgMax {
    value: f64,
    index: usize,
}

impl ArgMax {
    const EMPTY: ArgMax = ArgMax { value: f64::NEG_INFINITY, index: usize::MAX };

    fn merge(self, other: ArgMax) -> ArgMax {
        if other.value > self.value || (other.value == self.value && other.index < self.index) {
            other
        } else {
            self
        }
    }

    fn finish(self) -> Directed {
        Directed { distance: self.value.sqrt(), witness: self.index }
    }
}

/// Brute-force `sup_{a ∈ A} min_{b ∈ B} ‖a - b‖`.
pub fn directed_hausdorff_naive(a: &PointCloud, b: &PointCloud) -> Result<Directed> {
    check_pair(a, b)?;
    let mut best = ArgMax::EMPTY;
    for (i, p) in a.points().enumerate() {
        let nearest = b
            .points()
            .map(|q| squared_distance(p, q))
            .fold(f64::INFINITY, f64::min);
        if nearest > best.value {
            best = ArgMax { value: nearest, index: i };
        }
    }
    Ok(best.finish())
}

pub fn hausdorff_naive(a: &PointCloud, b: &PointCloud) -> Result<HausdorffResult> {
    Ok(HausdorffResult::combine(
        directed_hausdorff_naive(a, b)?,
        directed_hausdorff_naive(b, a)?,
    ))
}

/// Early-break directed scan: `B` is visited in an order shuffled by
/// `shuffle_seed`, and the inner loop stops at the first point of `B` closer
/// than the running maximum, since that `a` cannot raise it. The result is
/// exact and independent of the seed.
pub fn directed_hausdorff_earlybreak(a: &PointCloud, b: &PointCloud, shuffle_seed: u64) -> Result<Directed> {
    check_pair(a, b)?;
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));

    let mut cmax = 0.0_f64;
    let mut witness = 0;
    for (i, p) in a.points().enumerate() {
        let mut cmin = f64::INFINITY;
        let mut broke = false;
        for &j in &order {
            let d = squared_distance(p, b.point(j));
            if d < cmax {
                broke = true;
                break;
            }
            cmin = cmin.min(d);
        }
        if !broke && cmin > cmax {
            cmax = cmin;
            witness = i;
        }
    }
    Ok(Directed { distance: cmax.sqrt(), witness })
}

pub fn hausdorff_earlybreak(a: &PointCloud, b: &PointCloud, shuffle_seed: u64) -> Result<HausdorffResult> {
    Ok(HausdorffResult::combine(
        directed_hausdorff_earlybreak(a, b, shuffle_seed)?,
        directed_hausdorff_earlybreak(b, a, shuffle_seed.wrapping_add(1))?,
    ))
}

/// Exact nearest-neighbour index over a fixed point set.
#[derive(Debug, Clone)]
pub struct NearestNeighborIndex {
    tree: KdTree,
}

pub fn build_nn_index(b: &PointCloud) -> Result<NearestNeighborIndex> {
    if b.is_empty() {
        return Err(GhError::param("cannot index an empty cloud"));
    }
    Ok(NearestNeighborIndex::from_coords(b.coords(), b.ambient_dim()))
}

impl NearestNeighborIndex {
    pub(crate) fn from_coords(coords: &[f64], dim: usize) -> Self {
        NearestNeighborIndex { tree: KdTree::build(coords, dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.tree.dim()
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.len() == 0
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.ambient_dim() {
            return Err(GhError::param(format!(
                "query has dimension {}, index has {}",
                query.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Distance from `query` to the closest indexed point.
    pub fn nn_distance(&self, query: &[f64]) -> Result<f64> {
        self.check_query(query)?;
        Ok(self.tree.nearest(query).0.sqrt())
    }

    /// Index and distance of the closest indexed point (lowest index on ties).
    pub fn nearest(&self, query: &[f64]) -> Result<(usize, f64)> {
        self.check_query(query)?;
        let (d2, i) = self.tree.nearest(query);
        Ok((i, d2.sqrt()))
    }

    pub(crate) fn nearest_squared(&self, query: &[f64]) -> f64 {
        self.tree.nearest(query).0
    }

    /// Exact squared nearest distance when it exceeds `bound`, otherwise
    /// some value not above `bound`.
    pub(crate) fn nearest_squared_beyond(&self, query: &[f64], bound: f64) -> f64 {
        self.tree.nearest_beyond(query, bound)
    }

    /// `sup_{q ∈ queries} d(q, indexed set)` over row-major `queries`.
    pub(crate) fn directed_from(&self, queries: &[f64]) -> Directed {
        let dim = self.ambient_dim();
        queries
            .par_chunks_exact(dim)
            .enumerate()
            .map(|(i, q)| ArgMax { value: self.nearest_squared(q), index: i })
            .reduce(|| ArgMax::EMPTY, ArgMax::merge)
            .finish()
    }
}

/// Directed distance from `a` to the set indexed by `index`.
pub fn directed_hausdorff_indexed(a: &PointCloud, index: &NearestNeighborIndex) -> Result<Directed> {
    if a.is_empty() {
        return Err(GhError::param("Hausdorff distance needs non-empty clouds"));
    }
    if a.ambient_dim() != index.ambient_dim() {
        return Err(GhError::param(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim(),
            index.ambient_dim()
        )));
    }
    Ok(index.directed_from(a.coords()))
}

/// Tree-accelerated symmetric distance; the two directions run concurrently.
pub fn hausdorff_accelerated(a: &PointCloud, b: &PointCloud) -> Result<HausdorffResult> {
    check_pair(a, b)?;
    let (ab, ba) = rayon::join(
        || build_nn_index(b).map(|ib| ib.directed_from(a.coords())),
        || build_nn_index(a).map(|ia| ia.directed_from(b.coords())),
    );
    Ok(HausdorffResult::combine(ab?, ba?))
}

pub fn hausdorff(a: &PointCloud, b: &PointCloud, algo: Algorithm) -> Result<HausdorffResult> {
    match algo {
        Algorithm::Naive => hausdorff_naive(a, b),
        Algorithm::EarlyBreak { seed } => hausdorff_earlybreak(a, b, seed),
        Algorithm::Tree => hausdorff_accelerated(a, b),
    }
}

/// Largest pairwise Euclidean distance within one cloud.
pub fn euclidean_diameter(cloud: &PointCloud) -> f64 {
    let n = cloud.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            (i + 1..n)
                .map(|j| squared_distance(p, cloud.point(j)))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}
