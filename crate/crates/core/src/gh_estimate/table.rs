use serde::{Deserialize, Serialize};

use super::GHEstimate;
use crate::error::{GhError, Result};
use crate::geometry::{ModelSpace, ProductSignature, SpaceKind};

pub const ANALYTIC_GH_E2_S2: f64 = 0.23;
/// Published estimates for the two numerically computed pairs.
pub const PUBLISHED_GH_E2_H2: f64 = 0.77;
pub const PUBLISHED_GH_S2_H2: f64 = 0.84;

/// `d_GH(B_{E²}, B_{S²})`, known in closed form.
pub fn analytic_gh_e2_s2() -> f64 {
    ANALYTIC_GH_E2_S2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AnalyticConstant,
    /// A published numeric estimate taken as given.
    Published,
    Computed,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub a: ModelSpace,
    pub b: ModelSpace,
    pub value: f64,
    pub provenance: Provenance,
}

/// Symmetric GH distances between distinct 2-dimensional model spaces.
/// The diagonal is implicit and zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TableEntry>", into = "Vec<TableEntry>")]
pub struct DistanceTable {
    /// Indexed by [`pair_slot`]: (E, S), (E, H), (S, H).
    entries: [TableEntry; 3],
}

fn pair_slot(a: SpaceKind, b: SpaceKind) -> Option<usize> {
    match (a.min(b), a.max(b)) {
        (SpaceKind::Euclidean, SpaceKind::Spherical) => Some(0),
        (SpaceKind::Euclidean, SpaceKind::Hyperbolic) => Some(1),
        (SpaceKind::Spherical, SpaceKind::Hyperbolic) => Some(2),
        _ => None,
    }
}

fn check_value(value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(GhError::param(format!("GH distance {value} outside [0, 1]")));
    }
    Ok(())
}

impl Default for DistanceTable {
    fn default() -> Self {
        let entry = |a, b, value, provenance| TableEntry { a, b, value, provenance };
        DistanceTable {
            entries: [
                entry(ModelSpace::E2, ModelSpace::S2, ANALYTIC_GH_E2_S2, Provenance::AnalyticConstant),
                entry(ModelSpace::E2, ModelSpace::H2, PUBLISHED_GH_E2_H2, Provenance::Published),
                entry(ModelSpace::S2, ModelSpace::H2, PUBLISHED_GH_S2_H2, Provenance::Published),
            ],
        }
    }
}

impl DistanceTable {
    /// `d(a, b)`; zero when `a == b`.
    pub fn get(&self, a: ModelSpace, b: ModelSpace) -> f64 {
        self.entry(a, b).map_or(0.0, |e| e.value)
    }

    pub fn entry(&self, a: ModelSpace, b: ModelSpace) -> Option<&TableEntry> {
        pair_slot(a.kind, b.kind).map(|i| &self.entries[i])
    }

    pub fn entries(&self) -> &[TableEntry; 3] {
        &self.entries
    }

    pub fn set(&mut self, a: ModelSpace, b: ModelSpace, value: f64, provenance: Provenance) -> Result<()> {
        check_value(value)?;
        let slot = pair_slot(a.kind, b.kind)
            .ok_or_else(|| GhError::param(format!("d({a}, {b}) is fixed at 0")))?;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.entries[slot] = TableEntry { a: lo, b: hi, value, provenance };
        Ok(())
    }

    pub fn with_user_value(mut self, a: ModelSpace, b: ModelSpace, value: f64) -> Result<Self> {
        self.set(a, b, value, Provenance::UserSupplied)?;
        Ok(self)
    }

    /// Replaces the entry of the estimate's pair with the computed value.
    pub fn with_estimate(mut self, estimate: &GHEstimate) -> Result<Self> {
        let (a, b) = estimate.pair;
        self.set(a, b, estimate.value, Provenance::Computed)?;
        Ok(self)
    }

    /// Builds a table from the defaults overridden by computed estimates.
    pub fn from_estimates<'a>(estimates: impl IntoIterator<Item = &'a GHEstimate>) -> Result<Self> {
        estimates
            .into_iter()
            .try_fold(DistanceTable::default(), |t, e| t.with_estimate(e))
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            check_value(e.value)?;
            if pair_slot(e.a.kind, e.b.kind) != Some(i) || e.a > e.b {
                return Err(GhError::param(format!("table entry {i} holds pair ({}, {})", e.a, e.b)));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<TableEntry>> for DistanceTable {
    type Error = GhError;

    fn try_from(list: Vec<TableEntry>) -> Result<Self> {
        let mut slots: [Option<TableEntry>; 3] = [None; 3];
        for e in list {
            check_value(e.value)?;
            let i = pair_slot(e.a.kind, e.b.kind)
                .ok_or_else(|| GhError::Format(format!("table entry for ({}, {}) is not allowed", e.a, e.b)))?;
            if slots[i].is_some() {
                return Err(GhError::Format(format!("duplicate table entry for ({}, {})", e.a, e.b)));
            }
            let (a, b) = if e.a <= e.b { (e.a, e.b) } else { (e.b, e.a) };
            slots[i] = Some(TableEntry { a, b, ..e });
        }
        match slots {
            [Some(es), Some(eh), Some(sh)] => Ok(DistanceTable { entries: [es, eh, sh] }),
            _ => Err(GhError::Format("distance table needs all three pairs".into())),
        }
    }
}

impl From<DistanceTable> for Vec<TableEntry> {
    fn from(t: DistanceTable) -> Self {
        t.entries.to_vec()
    }
}

/// GH distance between two product signatures where one is defined.
///
/// Equal multisets give 0. Equal-size multisets differing in one factor
/// (`M₁` in `a`, `M₂` in `b`) give `d(M₁, M₂)`, the shared factors
/// contributing 0. Multisets whose sizes differ by one, with the smaller
/// contained in the larger, give 1. Every other pair is unrelated (`None`).
pub fn signature_distance(a: &ProductSignature, b: &ProductSignature, table: &DistanceTable) -> Option<f64> {
    let (ca, cb) = (a.counts(), b.counts());
    if ca == cb {
        return Some(0.0);
    }
    let (na, nb) = (a.factor_count(), b.factor_count());
    if na == nb {
        let mut removed = None;
        let mut added = None;
        for kind in SpaceKind::ALL {
            let (x, y) = (ca[kind.index()], cb[kind.index()]);
            match x as i64 - y as i64 {
                0 => {}
                1 if removed.is_none() => removed = Some(kind),
                -1 if added.is_none() => added = Some(kind),
                _ => return None,
            }
        }
        let (m1, m2) = (removed?, added?);
        return Some(table.get(ModelSpace::plane(m1), ModelSpace::plane(m2)));
    }
    let (small, large) = if na < nb { (ca, cb) } else { (cb, ca) };
    if na.abs_diff(nb) == 1 && small.iter().zip(&large).all(|(s, l)| s <= l) {
        return Some(1.0);
    }
    None
}
