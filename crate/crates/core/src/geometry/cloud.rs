use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hyperbolic::horocyclic_distance;
use super::signature::ModelSpace;
use crate::error::{GhError, Result};

/// Coordinate chart a cloud is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Cartesian coordinates of E² obtained from a polar grid.
    PolarEuclidean,
    /// Points of S² ⊂ ℝ³.
    ExtrinsicSphere,
    /// Horocyclic coordinates of H², metric `dx² + e^{2x} dy²`.
    HorocyclicH2,
    /// Plain points of ℝᵈ; `Ambient(6)` is the common embedding space.
    Ambient(usize),
}

impl Chart {
    pub const AMBIENT_E6: Chart = Chart::Ambient(6);

    pub fn dim(&self) -> usize {
        match self {
            Chart::PolarEuclidean | Chart::HorocyclicH2 => 2,
            Chart::ExtrinsicSphere => 3,
            Chart::Ambient(d) => *d,
        }
    }

    /// The model space this chart discretizes, if any.
    pub fn source_space(&self) -> Option<ModelSpace> {
        match self {
            Chart::PolarEuclidean => Some(ModelSpace::E2),
            Chart::ExtrinsicSphere => Some(ModelSpace::S2),
            Chart::HorocyclicH2 => Some(ModelSpace::H2),
            Chart::Ambient(_) => None,
        }
    }

    fn intrinsic_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Chart::ExtrinsicSphere => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let cross = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let cross_norm = cross.iter().map(|c| c * c).sum::<f64>().sqrt();
                cross_norm.atan2(dot)
            }
            Chart::HorocyclicH2 => horocyclic_distance([a[0], a[1]], [b[0], b[1]]),
            Chart::PolarEuclidean | Chart::Ambient(_) => euclidean(a, b),
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::PolarEuclidean => f.write_str("polar-Euclidean"),
            Chart::ExtrinsicSphere => f.write_str("extrinsic-sphere"),
            Chart::HorocyclicH2 => f.write_str("horocyclic-H2"),
            Chart::Ambient(d) => write!(f, "ambient-E{d}"),
        }
    }
}

impl FromStr for Chart {
    type Err = GhError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar-Euclidean" => Ok(Chart::PolarEuclidean),
            "extrinsic-sphere" => Ok(Chart::ExtrinsicSphere),
            "horocyclic-H2" => Ok(Chart::HorocyclicH2),
            _ => s
                .strip_prefix("ambient-E")
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&d| d >= 1)
                .map(Chart::Ambient)
                .ok_or_else(|| GhError::Format(format!("unknown chart label '{s}'"))),
        }
    }
}

impl Serialize for Chart {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Chart {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A finite, non-empty set of points with finite coordinates, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    chart: Chart,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CloudMetadata {
    chart: Chart,
    dim: usize,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct CloudJson {
    metadata: CloudMetadata,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(chart: Chart, coords: Vec<f64>) -> Result<Self> {
        let dim = chart.dim();
        if dim == 0 || coords.is_empty() {
            return Err(GhError::param("a point cloud needs at least one point"));
        }
        if coords.len() % dim != 0 {
            return Err(GhError::param(format!(
                "{} coordinates do not split into rows of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(GhError::Numerical(format!(
                "non-finite coordinate in row {} of a {chart} cloud",
                pos / dim
            )));
        }
        Ok(PointCloud { chart, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(chart: Chart, rows: &[R]) -> Result<Self> {
        let dim = chart.dim();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(GhError::param(format!(
                    "row {i} has {} coordinates, chart {chart} needs {dim}",
                    row.len()
                )));
            }
            coords.extend_from_slice(row);
        }
        PointCloud::new(chart, coords)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn ambient_dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.ambient_dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.ambient_dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn source_space(&self) -> Option<ModelSpace> {
        self.chart.source_space()
    }

    /// Same cloud with every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        PointCloud::new(self.chart, self.coords.iter().map(|c| c * s).collect())
    }

    /// Drops exact duplicate rows, keeping first occurrences in order.
    pub fn dedup(&self) -> Self {
        let mut seen = std::collections::HashSet::new();
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            let key: Vec<u64> = p.iter().map(|c| c.to_bits()).collect();
            if seen.insert(key) {
                coords.extend_from_slice(p);
            }
        }
        PointCloud { chart: self.chart, coords }
    }

    /// Writes the CSV form: a `# chart=<label> dim=<d>` header, then one row per point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# chart={} dim={}", self.chart, self.ambient_dim())?;
        let mut line = String::new();
        for p in self.points() {
            line.clear();
            for (k, c) in p.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{c:.16e}"));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| GhError::Format("empty CSV input".into()))??;
        let (chart, dim) = parse_header(&header)?;
        let mut coords = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let before = coords.len();
            for field in line.split(',') {
                let v = field.trim().parse::<f64>().map_err(|e| {
                    GhError::Format(format!("line {}: bad number '{field}': {e}", lineno + 2))
                })?;
                coords.push(v);
            }
            if coords.len() - before != dim {
                return Err(GhError::Format(format!(
                    "line {}: expected {dim} columns, found {}",
                    lineno + 2,
                    coords.len() - before
                )));
            }
        }
        PointCloud::new(chart, coords)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = CloudJson {
            metadata: CloudMetadata {
                chart: self.chart,
                dim: self.ambient_dim(),
                count: self.len(),
            },
            points: self.points().map(<[f64]>::to_vec).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CloudJson = serde_json::from_str(text)?;
        if doc.metadata.dim != doc.metadata.chart.dim() {
            return Err(GhError::Format(format!(
                "metadata dim {} disagrees with chart {}",
                doc.metadata.dim, doc.metadata.chart
            )));
        }
        if doc.metadata.count != doc.points.len() {
            return Err(GhError::Format(format!(
                "metadata count {} but {} points present",
                doc.metadata.count,
                doc.points.len()
            )));
        }
        PointCloud::from_rows(doc.metadata.chart, &doc.points)
    }
}

fn parse_header(header: &str) -> Result<(Chart, usize)> {
    let body = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| GhError::Format("CSV header must start with '#'".into()))?;
    let mut chart = None;
    let mut dim = None;
    for token in body.split_whitespace() {
        if let Some(v) = token.strip_prefix("chart=") {
            chart = Some(v.parse::<Chart>()?);
        } else if let Some(v) = token.strip_prefix("dim=") {
            dim = Some(
                v.parse::<usize>()
                    .map_err(|_| GhError::Format(format!("bad dim '{v}'")))?,
            );
        }
    }
    let chart = chart.ok_or_else(|| GhError::Format("CSV header lacks chart=".into()))?;
    let dim = dim.ok_or_else(|| GhError::Format("CSV header lacks dim=".into()))?;
    if chart.dim() != dim {
        return Err(GhError::Format(format!("chart {chart} has dimension {}, header says {dim}", chart.dim())));
    }
    Ok((chart, dim))
}

/// Largest pairwise intrinsic distance, by exhaustive scan.
///
/// Only the intrinsic charts are accepted; clouds in an ambient chart get
/// their (Euclidean) diameter from the `hausdorff` utilities instead.
pub fn geodesic_diameter(cloud: &PointCloud) -> Result<f64> {
    let chart = cloud.chart();
    if let Chart::Ambient(_) = chart {
        return Err(GhError::Chart(format!(
            "geodesic diameter is defined for intrinsic charts only, got {chart}"
        )));
    }
    let n = cloud.len();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let a = cloud.point(i);
            (i + 1..n)
                .map(|j| chart.intrinsic_distance(a, cloud.point(j)))
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diameter_of_small_clouds() {
        let c = PointCloud::from_rows(Chart::PolarEuclidean, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((geodesic_diameter(&c).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let single = PointCloud::from_rows(Chart::HorocyclicH2, &[[0.3, -0.2]]).unwrap();
        assert_eq!(geodesic_diameter(&single).unwrap(), 0.0);
    }

    #[test]
    fn diameter_rejects_ambient() {
        let c = PointCloud::from_rows(Chart::AMBIENT_E6, &[[0.0; 6]]).unwrap();
        assert!(matches!(geodesic_diameter(&c), Err(GhError::Chart(_))));
    }

    #[test]
    fn sphere_distance_is_great_circle() {
        let c = PointCloud::from_rows(Chart::ExtrinsicSphere, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!((geodesic_diameter(&c).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(PointCloud::new(Chart::PolarEuclidean, vec![]).is_err());
        assert!(PointCloud::new(Chart::PolarEuclidean, vec![1.0, 2.0, 3.0]).is_err());
        assert!(matches!(
            PointCloud::new(Chart::PolarEuclidean, vec![1.0, f64::NAN]),
            Err(GhError::Numerical(_))
        ));
        assert!(PointCloud::from_rows(Chart::ExtrinsicSphere, &[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn csv_header_format() {
        let c = PointCloud::from_rows(Chart::ExtrinsicSphere, &[[0.0, 0.0, 1.0]]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# chart=extrinsic-sphere dim=3\n"));
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let bad = "# chart=polar-Euclidean dim=2\n1.0,2.0,3.0\n";
        assert!(PointCloud::read_csv(bad.as_bytes()).is_err());
        let mismatch = "# chart=polar-Euclidean dim=3\n1.0,2.0,3.0\n";
        assert!(PointCloud::read_csv(mismatch.as_bytes()).is_err());
        assert!(PointCloud::read_csv("".as_bytes()).is_err());
    }

    #[test]
    fn dedup_keeps_first_occurrences() {
        let c = PointCloud::from_rows(Chart::Ambient(1), &[[0.0], [1.0], [0.0], [2.0], [1.0]]).unwrap();
        assert_eq!(c.dedup().coords(), &[0.0, 1.0, 2.0]);
    }

    fn brute_diameter(cloud: &PointCloud) -> f64 {
        let mut best = 0.0_f64;
        for i in 0..cloud.len() {
            for j in 0..cloud.len() {
                let (a, b) = (cloud.point(i), cloud.point(j));
                let d = match cloud.chart() {
                    Chart::ExtrinsicSphere => {
                        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                        dot.clamp(-1.0, 1.0).acos()
                    }
                    Chart::HorocyclicH2 => {
                        let (u1, v1, u2, v2) = (a[1], (-a[0]).exp(), b[1], (-b[0]).exp());
                        (1.0 + ((u1 - u2).powi(2) + (v1 - v2).powi(2)) / (2.0 * v1 * v2)).acosh()
                    }
                    _ => ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt(),
                };
                best = best.max(d);
            }
        }
        best
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip(rows in prop::collection::vec(prop::array::uniform3(-1e6f64..1e6), 1..40)) {
            let c = PointCloud::from_rows(Chart::ExtrinsicSphere, &rows).unwrap();
            let mut buf = Vec::new();
            c.write_csv(&mut buf).unwrap();
            prop_assert_eq!(&PointCloud::read_csv(buf.as_slice()).unwrap(), &c);
            prop_assert_eq!(&PointCloud::from_json(&c.to_json().unwrap()).unwrap(), &c);
        }

        #[test]
        fn diameter_matches_brute_force(
            rows in prop::collection::vec(prop::array::uniform2(-1.5f64..1.5), 1..200),
            which in 0usize..3,
        ) {
            let cloud = match which {
                0 => PointCloud::from_rows(Chart::PolarEuclidean, &rows).unwrap(),
                1 => PointCloud::from_rows(Chart::HorocyclicH2, &rows).unwrap(),
                _ => {
                    let pts: Vec<[f64; 3]> = rows
                        .iter()
                        .map(|r| {
                            let (b, a) = (r[0].abs(), r[1] * 2.0);
                            [b.sin() * a.cos(), b.sin() * a.sin(), b.cos()]
                        })
                        .collect();
                    PointCloud::from_rows(Chart::ExtrinsicSphere, &pts).unwrap()
                }
            };
            let fast = geodesic_diameter(&cloud).unwrap();
            let slow = brute_diameter(&cloud);
            prop_assert!((fast - slow).abs() < 1e-7, "fast {} slow {}", fast, slow);
        }
    }
}
