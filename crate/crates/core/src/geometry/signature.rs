use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GhError, Result};

/// The three constant-curvature model geometries. The declaration order is
/// the canonical factor order used for signature keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 3] = [SpaceKind::Euclidean, SpaceKind::Spherical, SpaceKind::Hyperbolic];

    pub fn curvature_sign(self) -> i8 {
        match self {
            SpaceKind::Euclidean => 0,
            SpaceKind::Spherical => 1,
            SpaceKind::Hyperbolic => -1,
        }
    }

    fn letter(self) -> char {
        match self {
            SpaceKind::Euclidean => 'E',
            SpaceKind::Spherical => 'S',
            SpaceKind::Hyperbolic => 'H',
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

/// A model space of fixed dimension. The curvature sign is derived from the
/// kind so the two can never disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelSpace {
    pub kind: SpaceKind,
    pub dimension: u32,
}

impl ModelSpace {
    pub const E2: ModelSpace = ModelSpace::plane(SpaceKind::Euclidean);
    pub const S2: ModelSpace = ModelSpace::plane(SpaceKind::Spherical);
    pub const H2: ModelSpace = ModelSpace::plane(SpaceKind::Hyperbolic);

    pub const fn plane(kind: SpaceKind) -> Self {
        ModelSpace { kind, dimension: 2 }
    }

    pub fn curvature_sign(&self) -> i8 {
        self.kind.curvature_sign()
    }
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.dimension)
    }
}

impl FromStr for ModelSpace {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let kind = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('E') => SpaceKind::Euclidean,
            Some('S') => SpaceKind::Spherical,
            Some('H') => SpaceKind::Hyperbolic,
            _ => return Err(GhError::Format(format!("unknown model space '{s}'"))),
        };
        let rest = chars.as_str();
        let dimension = if rest.is_empty() {
            2
        } else {
            rest.parse::<u32>()
                .map_err(|_| GhError::Format(format!("bad dimension in model space '{s}'")))?
        };
        if dimension != 2 {
            return Err(GhError::Format(format!(
                "only 2-dimensional model spaces are supported, got '{s}'"
            )));
        }
        Ok(ModelSpace { kind, dimension })
    }
}

impl Serialize for ModelSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A product manifold signature: a multiset of 2-dimensional model spaces,
/// stored as per-kind counts so that equality is multiset equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductSignature {
    counts: [u32; 3],
}

impl ProductSignature {
    pub fn new(factors: &[ModelSpace]) -> Result<Self> {
        if factors.is_empty() {
            return Err(GhError::param("a product signature needs at least one factor"));
        }
        let mut counts = [0u32; 3];
        for f in factors {
            counts[f.kind.index()] += 1;
        }
        Ok(ProductSignature { counts })
    }

    pub fn from_counts(euclidean: u32, spherical: u32, hyperbolic: u32) -> Result<Self> {
        let counts = [euclidean, spherical, hyperbolic];
        if counts.iter().sum::<u32>() == 0 {
            return Err(GhError::param("a product signature needs at least one factor"));
        }
        Ok(ProductSignature { counts })
    }

    pub fn single(space: ModelSpace) -> Self {
        let mut counts = [0u32; 3];
        counts[space.kind.index()] = 1;
        ProductSignature { counts }
    }

    pub fn counts(&self) -> [u32; 3] {
        self.counts
    }

    pub fn count(&self, kind: SpaceKind) -> u32 {
        self.counts[kind.index()]
    }

    pub fn factor_count(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Factors in canonical order (E before S before H).
    pub fn factors(&self) -> Vec<ModelSpace> {
        SpaceKind::ALL
            .iter()
            .flat_map(|&k| std::iter::repeat(ModelSpace::plane(k)).take(self.counts[k.index()] as usize))
            .collect()
    }

    /// Deterministic textual key, e.g. `E2xS2xH2`.
    pub fn canonical_key(&self) -> String {
        self.factors()
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Sort key realizing the canonical node order: fewer factors first,
    /// then lexicographic on the canonical factor sequence.
    pub fn canonical_order(&self) -> (u32, Vec<SpaceKind>) {
        (self.factor_count(), self.factors().into_iter().map(|f| f.kind).collect())
    }

    /// All signatures with between 1 and `max_factors` factors, in canonical order.
    pub fn enumerate(max_factors: u32) -> Vec<ProductSignature> {
        let mut out = Vec::new();
        for n in 1..=max_factors {
            // Lexicographic over sorted factor sequences: more E's first, then more S's.
            for e in (0..=n).rev() {
                for s in (0..=(n - e)).rev() {
                    out.push(ProductSignature { counts: [e, s, n - e - s] });
                }
            }
        }
        out
    }
}

impl fmt::Display for ProductSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_key())
    }
}

impl FromStr for ProductSignature {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .split(['x', 'X', '*', '×'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<ModelSpace>>>()?;
        ProductSignature::new(&factors)
            .map_err(|_| GhError::Format(format!("empty product signature '{s}'")))
    }
}

impl Serialize for ProductSignature {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.canonical_key())
    }
}

impl<'de> Deserialize<'de> for ProductSignature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
