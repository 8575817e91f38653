//! Skeleton-by-skeleton sparse embedding of a whole complex.
//!
//! Vertices are placed `(m-d)`-sparsely among the first `n-d` axes. The
//! `k`-simplices are then filled with sparsity `m-d+k` using the first
//! `n-d+k` axes, so each skeleton lies in the floor of the next frame.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::extension::{extend, ExtendConfig, Frame, LabelOrder, SkeletonMap};
use crate::lattice::{planes_hit_in_dim, planes_containing, AxisSet, BoundingBox, GeomPiece, LatticePoint, MAX_AMBIENT};
use crate::placement::{greedy_place, PlacementConfig, TieBreak};

pub const DEFAULT_RETRY_BUDGET: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbedConfig {
    pub tie_break: TieBreak,
    pub order: LabelOrder,
    /// Initial label constant `c`; the label range is `ceil(c * V^(1/(n-m)))`.
    pub label_constant: u32,
    /// Number of constant doublings allowed after a label range runs out.
    pub retry_budget: u32,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            tie_break: TieBreak::Lexicographic,
            order: LabelOrder::Input,
            label_constant: 1,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

/// Achieved constants of one skeleton level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelConstants {
    pub level: usize,
    pub ambient: usize,
    pub sparsity: usize,
    /// Placement constant (level 0) or final label constant.
    pub constant: u32,
    pub label_range: u32,
    pub max_label: u32,
    /// Doublings performed at this level.
    pub retries: u32,
    pub max_class_vertices: usize,
    /// `max_class_vertices / V^((k-m'-1)/(k-m'))` at the outermost recursion level.
    pub class_vertex_constant: f64,
    /// Max over simplices of planes hit by the image over planes hit by the
    /// boundary, each in its own top dimension.
    pub plane_growth: f64,
    pub side: i64,
}

/// A sparse map of a whole complex into `Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMap {
    pub complex: SimplicialComplex,
    pub n: usize,
    pub m: usize,
    pub images: BTreeMap<Simplex, Vec<GeomPiece>>,
    pub achieved_box: BoundingBox,
    pub constants_log: Vec<LevelConstants>,
}

#[derive(Serialize, Deserialize)]
struct LatticeMapJson {
    n: usize,
    m: usize,
    d: usize,
    #[serde(rename = "V")]
    vertex_count: usize,
    #[serde(rename = "box")]
    bbox: BoundingBox,
    images: BTreeMap<String, Vec<GeomPiece>>,
    #[serde(default)]
    constants_log: Vec<LevelConstants>,
}

impl LatticeMap {
    pub fn empty(complex: SimplicialComplex, n: usize, m: usize) -> Self {
        let zeros = vec![0; n];
        LatticeMap {
            complex,
            n,
            m,
            images: BTreeMap::new(),
            achieved_box: BoundingBox {
                n,
                lo: Some(zeros.clone()),
                hi: Some(zeros),
            },
            constants_log: Vec::new(),
        }
    }

    /// Builds a map from images, recomputing the box.
    pub fn from_images(
        complex: SimplicialComplex,
        n: usize,
        m: usize,
        images: BTreeMap<Simplex, Vec<GeomPiece>>,
    ) -> Self {
        let mut map = LatticeMap::empty(complex, n, m);
        map.images = images;
        map.achieved_box = map.compute_box();
        map
    }

    pub fn d(&self) -> usize {
        self.complex.dim()
    }

    pub fn vertex_count(&self) -> usize {
        self.complex.vertex_count()
    }

    pub fn compute_box(&self) -> BoundingBox {
        let b = self
            .images
            .values()
            .flatten()
            .fold(BoundingBox::empty(self.n), |b, p| b.union(&p.bbox()));
        if b.is_empty() {
            LatticeMap::empty(SimplicialComplex::empty(), self.n, self.m).achieved_box
        } else {
            b
        }
    }

    /// Side of the smallest `[0, R]^n` holding the image.
    pub fn side(&self) -> i64 {
        self.achieved_box.max_coordinate()
    }

    /// `side / V^(1/(n-m))`.
    pub fn top_constant(&self) -> f64 {
        if self.m >= self.n || self.vertex_count() == 0 {
            return self.side() as f64;
        }
        self.side() as f64 / (self.vertex_count() as f64).powf(1.0 / (self.n - self.m) as f64)
    }

    pub fn vertex_image(&self, v: usize) -> Option<LatticePoint> {
        match self.images.get(&Simplex::vertex(v))?.first()? {
            GeomPiece::Point { at } => Some(*at),
            _ => None,
        }
    }

    pub fn top_simplices(&self) -> impl Iterator<Item = (&Simplex, &Vec<GeomPiece>)> {
        let d = self.d();
        self.images.iter().filter(move |(s, _)| s.dim() == d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(LatticeMapJson {
            n: self.n,
            m: self.m,
            d: self.d(),
            vertex_count: self.vertex_count(),
            bbox: self.achieved_box.clone(),
            images: self
                .images
                .iter()
                .map(|(s, p)| (s.key(), p.clone()))
                .collect(),
            constants_log: self.constants_log.clone(),
        })
        .expect("map serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: LatticeMapJson = serde_json::from_value(v.clone())?;
        let mut images = BTreeMap::new();
        for (k, pieces) in j.images {
            images.insert(Simplex::parse_key(&k)?, pieces);
        }
        let raw: Vec<Vec<usize>> = images.keys().map(|s| s.vertices().to_vec()).collect();
        let complex = if raw.is_empty() && j.vertex_count == 0 {
            SimplicialComplex::empty()
        } else {
            SimplicialComplex::build_with_vertex_count(&raw, Some(j.vertex_count))?
        };
        if complex.dim() != j.d && !complex.is_empty() {
            return Err(Error::Parse(format!(
                "declared dimension {} but images reach dimension {}",
                j.d,
                complex.dim()
            )));
        }
        if j.m > j.n || j.n > MAX_AMBIENT {
            return Err(Error::UnsatisfiableParameters { d: j.d, m: j.m, n: j.n });
        }
        Ok(LatticeMap {
            complex,
            n: j.n,
            m: j.m,
            images,
            achieved_box: j.bbox,
            constants_log: j.constants_log,
        })
    }
}

/// `ceil(c * V^(1/k))` as a label range.
fn label_range(c: u32, v: usize, k: usize) -> u32 {
    crate::placement::scaled_root(c as u64, v.max(1) as u64, k.max(1) as u32).max(1) as u32
}

fn check_parameters(d: usize, m: usize, n: usize) -> Result<()> {
    if d > m || m > n || n == 0 || n > MAX_AMBIENT {
        return Err(Error::UnsatisfiableParameters { d, m, n });
    }
    Ok(())
}

/// Embeds `y` with the default configuration.
pub fn embed(y: &SimplicialComplex, m: usize, n: usize) -> Result<LatticeMap> {
    embed_with(y, m, n, &EmbedConfig::default())
}

/// Embeds `y`, doubling the label constant whenever a label range runs out,
/// at most `retry_budget` times in total.
pub fn embed_with_retries(
    y: &SimplicialComplex,
    m: usize,
    n: usize,
    retry_budget: u32,
) -> Result<LatticeMap> {
    embed_with(
        y,
        m,
        n,
        &EmbedConfig {
            retry_budget,
            ..EmbedConfig::default()
        },
    )
}

pub fn embed_with(
    y: &SimplicialComplex,
    m: usize,
    n: usize,
    config: &EmbedConfig,
) -> Result<LatticeMap> {
    let d = y.dim();
    check_parameters(d, m, n)?;
    let v = y.vertex_count();
    if v == 0 {
        return Ok(LatticeMap::empty(y.clone(), n, m));
    }
    if m == n && v > 1 {
        return Err(Error::MEqualsN);
    }
    if config.label_constant == 0 {
        return Err(Error::InvalidConfig("label constant must be positive".into()));
    }

    let placement = greedy_place(
        &PlacementConfig::minimal(n - d, m - d, v)?,
        config.tie_break,
    )?;
    let coords: Vec<LatticePoint> = placement.coords.iter().map(|p| p.lift(n)).collect();
    let mut map = SkeletonMap::from_vertices(n, m - d, &coords);
    let mut log = vec![LevelConstants {
        level: 0,
        ambient: n - d,
        sparsity: m - d,
        constant: placement.side_constant,
        label_range: 0,
        max_label: 0,
        retries: 0,
        max_class_vertices: 0,
        class_vertex_constant: 0.0,
        plane_growth: 0.0,
        side: placement.achieved_side() as i64,
    }];

    let mut c = config.label_constant;
    let mut doublings = 0;
    for k in 1..=d {
        let ambient = n - d + k;
        let sparsity = m - d + k;
        let frame = Frame::leading(n, ambient);
        let mut retries = 0;
        let (next, ext_log, range) = loop {
            let range = label_range(c, v, n - m);
            let cfg = ExtendConfig {
                label_range: range,
                base_limit: 1,
                order: config.order,
            };
            match extend(y, &map, &frame, k, sparsity, &cfg) {
                Ok((next, ext_log)) => break (next, ext_log, range),
                Err(Error::LabelRangeExhausted { .. }) => {
                    if doublings >= config.retry_budget {
                        return Err(Error::RetryBudgetExhausted {
                            attempts: doublings + 1,
                        });
                    }
                    doublings += 1;
                    retries += 1;
                    c = c.saturating_mul(2);
                }
                Err(e) => return Err(e),
            }
        };
        let max_class_vertices = ext_log.max_class_vertices(ambient);
        let exponent = if ambient > sparsity + 1 {
            (ambient - sparsity - 1) as f64 / (ambient - sparsity) as f64
        } else {
            0.0
        };
        let plane_growth = plane_growth(y, &next, k, sparsity)?;
        map = next;
        let side = skeleton_box(&map, n).max_coordinate();
        log.push(LevelConstants {
            level: k,
            ambient,
            sparsity,
            constant: c,
            label_range: range,
            max_label: ext_log.max_label,
            retries,
            max_class_vertices,
            class_vertex_constant: max_class_vertices as f64 / (v as f64).powf(exponent),
            plane_growth,
            side,
        });
    }

    let images = map
        .images
        .iter()
        .map(|(s, img)| {
            let pieces = if s.dim() == 0 {
                vec![GeomPiece::point(img.cells.first().expect("vertex image").anchor())]
            } else {
                img.pieces()
            };
            (s.clone(), pieces)
        })
        .collect();
    let mut out = LatticeMap::from_images(y.clone(), n, m, images);
    out.constants_log = log;
    Ok(out)
}

fn skeleton_box(map: &SkeletonMap, n: usize) -> BoundingBox {
    map.images
        .values()
        .flat_map(|i| i.cells.iter())
        .fold(BoundingBox::empty(n), |b, c| b.union(&c.bbox()))
}

/// Largest ratio, over `k`-simplices, of `m`-planes met by the image in
/// dimension `k` to `m`-planes met by the boundary image in dimension `k-1`.
fn plane_growth(y: &SimplicialComplex, map: &SkeletonMap, k: usize, m: usize) -> Result<f64> {
    let all = AxisSet::all(map.n);
    let mut worst: f64 = 0.0;
    for s in y.simplices_of_dim(k) {
        let img = &map.images[s];
        let mut hit = BTreeSet::new();
        for piece in img.pieces() {
            if piece.dim() == k {
                hit.extend(planes_hit_in_dim(&piece, m, k)?.0);
            }
        }
        let mut below = BTreeSet::new();
        for face in s.boundary()? {
            for c in map.images[&face].cells.iter().filter(|c| c.dim() + 1 == k) {
                below.extend(planes_containing(c, m, all));
            }
        }
        if !below.is_empty() {
            worst = worst.max(hit.len() as f64 / below.len() as f64);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Cell;

    #[test]
    fn diagonal_points() {
        let y = SimplicialComplex::build(&[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        let map = embed(&y, 1, 2).unwrap();
        for v in 0..4 {
            assert_eq!(map.vertex_image(v), Some(LatticePoint::new(&[v as i32, v as i32])));
        }
        assert_eq!(map.side(), 3);
    }

    #[test]
    fn empty_complex() {
        let map = embed(&SimplicialComplex::empty(), 1, 3).unwrap();
        assert!(map.images.is_empty());
        assert_eq!(map.achieved_box.lo, Some(vec![0, 0, 0]));
        assert_eq!(map.achieved_box.hi, Some(vec![0, 0, 0]));
    }

    #[test]
    fn rejects_bad_parameters() {
        let y = SimplicialComplex::build(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(embed(&y, 1, 3), Err(Error::UnsatisfiableParameters { d: 2, m: 1, n: 3 }));
        assert_eq!(embed(&y, 4, 3), Err(Error::UnsatisfiableParameters { d: 2, m: 4, n: 3 }));
    }

    #[test]
    fn triangle_graph_endpoints_match() {
        let y = SimplicialComplex::build(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let map = embed(&y, 1, 3).unwrap();
        for (s, pieces) in map.top_simplices() {
            let cells: Vec<Cell> = pieces.iter().flat_map(|p| p.cells().unwrap()).collect();
            for &v in s.vertices() {
                let p = map.vertex_image(v).unwrap();
                assert!(cells.iter().any(|c| c.contains_point(&p)));
            }
        }
        assert_eq!(map.constants_log.len(), 2);
    }

    #[test]
    fn zero_budget_fails_when_range_too_small() {
        let edges: Vec<Vec<usize>> = (0..6)
            .flat_map(|a| (a + 1..6).map(move |b| vec![a, b]))
            .collect();
        let y = SimplicialComplex::build(&edges).unwrap();
        assert_eq!(
            embed_with_retries(&y, 1, 3, 0),
            Err(Error::RetryBudgetExhausted { attempts: 1 })
        );
        let map = embed_with_retries(&y, 1, 3, 8).unwrap();
        assert!(map.constants_log[1].retries >= 1);
    }

    #[test]
    fn json_roundtrip() {
        let y = SimplicialComplex::build(&[vec![0, 1], vec![1, 2]]).unwrap();
        let map = embed(&y, 1, 3).unwrap();
        let back = LatticeMap::from_json(&map.to_json()).unwrap();
        assert_eq!(back, map);
    }
}
