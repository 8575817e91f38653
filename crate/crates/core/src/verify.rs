//! Certification of the three sparse-map conditions.
//!
//! [`verify`] works from plane sets of the pieces. [`brute_force_census`]
//! recomputes the same numbers by enumerating every `m`-plane of the bounding
//! box and intersecting it with each unit cell, rasterizing cones on a
//! quarter-unit grid.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::complex::Simplex;
use crate::embedder::LatticeMap;
use crate::error::{Error, Result};
use crate::lattice::{
    planes_containing, planes_hit_in_dim, AxisSet, BoundingBox, Cell, Exactness, GeomPiece,
    LatticePoint, MPlane, MAX_AMBIENT,
};

/// Default side limit for the brute-force oracle.
pub const BRUTE_FORCE_LIMIT: i64 = 16;

/// Grid points per unit when rasterizing cones.
const RES: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityCertificate {
    pub skeletal_ok: bool,
    pub violations: Vec<String>,
    pub max_planes_per_simplex: usize,
    pub max_simplices_per_plane: usize,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    /// True iff a cone piece contributed to the counts.
    pub conservative: bool,
    /// Number of planes met (in dimension `d`) by exactly `k` simplices.
    pub per_plane_histogram: BTreeMap<usize, usize>,
    /// Most top simplices meeting one `m`-plane in any dimension.
    pub max_simplices_per_plane_any_dim: usize,
}

impl SparsityCertificate {
    /// The part of the certificate that depends only on the plane counts.
    pub fn counts(&self) -> (usize, usize, &BTreeMap<usize, usize>) {
        (
            self.max_planes_per_simplex,
            self.max_simplices_per_plane,
            &self.per_plane_histogram,
        )
    }
}

fn build_certificate(
    map: &LatticeMap,
    per_simplex: BTreeMap<Simplex, BTreeSet<MPlane>>,
    any_dim: HashMap<MPlane, usize>,
    violations: Vec<String>,
    conservative: bool,
) -> SparsityCertificate {
    let mut per_plane: HashMap<MPlane, usize> = HashMap::new();
    for planes in per_simplex.values() {
        for h in planes {
            *per_plane.entry(*h).or_default() += 1;
        }
    }
    let mut histogram = BTreeMap::new();
    for &count in per_plane.values() {
        *histogram.entry(count).or_default() += 1;
    }
    SparsityCertificate {
        skeletal_ok: violations.is_empty(),
        violations,
        max_planes_per_simplex: per_simplex.values().map(BTreeSet::len).max().unwrap_or(0),
        max_simplices_per_plane: per_plane.values().copied().max().unwrap_or(0),
        bbox: map.compute_box(),
        conservative,
        per_plane_histogram: histogram,
        max_simplices_per_plane_any_dim: any_dim.values().copied().max().unwrap_or(0),
    }
}

/// Condition-1 problems of one piece of a `k`-simplex image.
fn skeletal_violations(s: &Simplex, piece: &GeomPiece, n: usize) -> Vec<String> {
    let k = s.dim();
    let mut out = Vec::new();
    if let Some(a) = piece.ambient() {
        if a != n {
            out.push(format!("simplex {s}: piece lives in dimension {a}, map in {n}"));
            return out;
        }
    }
    if let Err(e) = structure_ok(piece) {
        out.push(format!("simplex {s}: {e}"));
    }
    if piece.dim() > k {
        out.push(format!("simplex {s}: piece of dimension {} exceeds {k}", piece.dim()));
    }
    if let Some(f) = piece.flats().iter().find(|f| f.support().len() > k) {
        out.push(format!(
            "simplex {s}: part at {:?} leaves the {k}-skeleton along axes {:?}",
            f.anchor,
            f.support()
        ));
    }
    out
}

fn structure_ok(piece: &GeomPiece) -> Result<()> {
    match piece {
        GeomPiece::Point { .. } => Ok(()),
        GeomPiece::Polyline { edges } => {
            if edges.iter().any(|c| c.dim() != 1) {
                return Err(Error::MalformedPiece("polyline holds a non-edge cell".into()));
            }
            Ok(())
        }
        GeomPiece::Chain { dim, cells } => {
            if cells.iter().any(|c| c.dim() != *dim) {
                return Err(Error::MalformedPiece(format!("chain cell not of dimension {dim}")));
            }
            Ok(())
        }
        GeomPiece::Prism { base, axis, from, to } => {
            structure_ok(base)?;
            if from > to || base.ambient().is_some_and(|n| *axis >= n) {
                return Err(Error::MalformedPiece("prism range or axis invalid".into()));
            }
            if base.lattice_points().iter().any(|p| p.get(*axis) != *from) {
                return Err(Error::MalformedPiece("prism base off its hyperplane".into()));
            }
            Ok(())
        }
        GeomPiece::Cone { base, apex } => {
            structure_ok(base)?;
            if !base.is_exact() {
                return Err(Error::MalformedPiece("cone over a non-cellular base".into()));
            }
            if base.ambient().is_some_and(|n| n != apex.n()) {
                return Err(Error::MalformedPiece("cone apex dimension mismatch".into()));
            }
            Ok(())
        }
    }
}

fn planes_meeting(piece: &GeomPiece, m: usize, n: usize) -> BTreeSet<MPlane> {
    let all = AxisSet::all(n);
    piece
        .lattice_points()
        .iter()
        .flat_map(|p| planes_containing(&Cell::vertex(*p), m, all))
        .collect()
}

/// Checks all three conditions on `map`.
pub fn verify(map: &LatticeMap) -> SparsityCertificate {
    verify_with(map, Vec::new())
}

fn verify_with(map: &LatticeMap, mut violations: Vec<String>) -> SparsityCertificate {
    let (n, m, d) = (map.n, map.m, map.d());
    for (s, pieces) in &map.images {
        for piece in pieces {
            violations.extend(skeletal_violations(s, piece, n));
        }
    }
    let mut conservative = false;
    let mut per_simplex = BTreeMap::new();
    let mut any_dim: HashMap<MPlane, usize> = HashMap::new();
    if m >= d && m <= n {
        for (s, pieces) in map.top_simplices() {
            let mut hit = BTreeSet::new();
            let mut met = BTreeSet::new();
            for piece in pieces {
                if piece.ambient() != Some(n) {
                    continue;
                }
                met.extend(planes_meeting(piece, m, n));
                if piece.dim() != d {
                    continue;
                }
                match planes_hit_in_dim(piece, m, d) {
                    Ok((planes, ex)) => {
                        conservative |= ex == Exactness::OverApproximate;
                        hit.extend(planes);
                    }
                    Err(e) => violations.push(format!("simplex {s}: {e}")),
                }
            }
            for h in met {
                *any_dim.entry(h).or_default() += 1;
            }
            per_simplex.insert(s.clone(), hit);
        }
    } else {
        violations.push(format!("sparsity {m} incompatible with d={d}, n={n}"));
    }
    violations.sort();
    violations.dedup();
    build_certificate(map, per_simplex, any_dim, violations, conservative)
}

/// Replaces every non-integral number under `images` by its rounding and
/// reports where it happened.
fn integralize(v: &mut serde_json::Value, path: &str, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Number(num) => {
            if num.as_i64().is_none() && num.as_u64().is_none() {
                let x = num.as_f64().unwrap_or(f64::NAN);
                out.push(format!("{path}: non-integral coordinate {x}"));
                *v = serde_json::Value::from(x.round() as i64);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, item) in items.iter_mut().enumerate() {
                integralize(item, &format!("{path}[{i}]"), out);
            }
        }
        serde_json::Value::Object(fields) => {
            for (k, item) in fields.iter_mut() {
                integralize(item, &format!("{path}.{k}"), out);
            }
        }
        _ => {}
    }
}

/// Loads embedding JSON, tolerating non-integral coordinates: they are
/// rounded and returned as condition-1 violations.
pub fn load_lenient(v: &serde_json::Value) -> Result<(LatticeMap, Vec<String>)> {
    let mut v = v.clone();
    let mut violations = Vec::new();
    if let Some(images) = v.get_mut("images") {
        integralize(images, "images", &mut violations);
    }
    let map = LatticeMap::from_json(&v)?;
    Ok((map, violations))
}

/// Verifies embedding JSON, including coordinates that are not integers.
pub fn verify_json(v: &serde_json::Value) -> Result<SparsityCertificate> {
    let (map, violations) = load_lenient(v)?;
    Ok(verify_with(&map, violations))
}

/// A convex part of a piece, for rasterization.
enum Part {
    Cell(Cell),
    Cone(LatticePoint, Cell),
    Prism(Box<Part>, usize, i32, i32),
}

fn parts(piece: &GeomPiece) -> Result<Vec<Part>> {
    if let Some(cells) = piece.cells() {
        return Ok(cells.into_iter().map(Part::Cell).collect());
    }
    match piece {
        GeomPiece::Cone { base, apex } => Ok(base
            .cells()
            .ok_or_else(|| Error::MalformedPiece("cone over a non-cellular base".into()))?
            .into_iter()
            .map(|c| Part::Cone(*apex, c))
            .collect()),
        GeomPiece::Prism { base, axis, from, to } => Ok(parts(base)?
            .into_iter()
            .map(|p| Part::Prism(Box::new(p), *axis, *from, *to))
            .collect()),
        _ => unreachable!("cellular pieces handled above"),
    }
}

type Grid = [i64; MAX_AMBIENT];

impl Part {
    /// Quarter-grid box containing the part.
    fn bounds(&self, n: usize) -> (Grid, Grid) {
        let mut lo = [0; MAX_AMBIENT];
        let mut hi = [0; MAX_AMBIENT];
        match self {
            Part::Cell(c) => {
                for a in 0..n {
                    lo[a] = RES * i64::from(c.anchor().get(a));
                    hi[a] = lo[a] + if c.axes().contains(a) { RES } else { 0 };
                }
            }
            Part::Cone(apex, c) => {
                let (l, h) = Part::Cell(*c).bounds(n);
                for a in 0..n {
                    let x = RES * i64::from(apex.get(a));
                    lo[a] = l[a].min(x);
                    hi[a] = h[a].max(x);
                }
            }
            Part::Prism(base, axis, from, to) => {
                (lo, hi) = base.bounds(n);
                lo[*axis] = RES * i64::from(*from.min(to));
                hi[*axis] = RES * i64::from(*from.max(to));
            }
        }
        (lo, hi)
    }

    fn contains(&self, x: &Grid, n: usize) -> bool {
        match self {
            Part::Cell(c) => (0..n).all(|a| {
                let lo = RES * i64::from(c.anchor().get(a));
                let hi = lo + if c.axes().contains(a) { RES } else { 0 };
                lo <= x[a] && x[a] <= hi
            }),
            Part::Cone(apex, c) => cone_contains(apex, c, x, n),
            Part::Prism(base, axis, from, to) => {
                let (lo, hi) = (*from.min(to), *from.max(to));
                if x[*axis] < RES * i64::from(lo) || x[*axis] > RES * i64::from(hi) {
                    return false;
                }
                let mut y = *x;
                y[*axis] = RES * i64::from(lo);
                base.contains(&y, n)
            }
        }
    }

    fn samples(&self, n: usize) -> Vec<Grid> {
        let (lo, hi) = self.bounds(n);
        let mut out = vec![lo];
        for a in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (lo[a]..=hi[a]).map(move |v| {
                        let mut q = p;
                        q[a] = v;
                        q
                    })
                })
                .collect();
        }
        out.retain(|x| self.contains(x, n));
        out
    }
}

/// Whether `x / RES` lies on a segment from `apex` to a point of the cell.
fn cone_contains(apex: &LatticePoint, c: &Cell, x: &Grid, n: usize) -> bool {
    // x = apex + (y - apex) / s with y in the cell and s >= 1.
    if (0..n).all(|a| x[a] == RES * i64::from(apex.get(a))) {
        return true;
    }
    let mut s_lo = Ratio::from_integer(1i64);
    let mut s_hi: Option<Ratio<i64>> = None;
    for (a, &xa) in x.iter().enumerate().take(n) {
        let ap = i64::from(apex.get(a));
        let lo = RES * (i64::from(c.anchor().get(a)) - ap);
        let hi = lo + if c.axes().contains(a) { RES } else { 0 };
        let u = xa - RES * ap;
        if u == 0 {
            if lo > 0 || hi < 0 {
                return false;
            }
            continue;
        }
        let (p, q) = (Ratio::new(lo, u), Ratio::new(hi, u));
        let (l, h) = if u > 0 { (p, q) } else { (q, p) };
        s_lo = s_lo.max(l);
        s_hi = Some(s_hi.map_or(h, |cur| cur.min(h)));
    }
    s_hi.is_none_or(|h| s_lo <= h)
}

/// Affine rank of grid points.
fn affine_rank(points: &[Grid]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let mut rows: Vec<[i128; MAX_AMBIENT]> = points[1..]
        .iter()
        .map(|p| std::array::from_fn(|a| i128::from(p[a] - first[a])))
        .collect();
    let mut r = 0;
    for col in 0..MAX_AMBIENT {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        let pr = rows[r];
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[col];
            if f != 0 {
                for c in 0..MAX_AMBIENT {
                    row[c] = row[c] * pr[col] - pr[c] * f;
                }
                let g = row.iter().fold(0i128, |g, &x| num_gcd(g, x.abs()));
                if g > 1 {
                    row.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

fn num_gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

/// Every `m`-plane meeting the box: free axis set plus fixed coordinates.
fn enumerate_planes(b: &BoundingBox, m: usize) -> Vec<MPlane> {
    let n = b.n;
    let (Some(lo), Some(hi)) = (&b.lo, &b.hi) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for free in AxisSet::all(n).subsets_of_size(m) {
        let mut points = vec![LatticePoint::origin(n)];
        for a in 0..n {
            if free.contains(a) {
                continue;
            }
            points = points
                .into_iter()
                .flat_map(|p| (lo[a]..=hi[a]).map(move |v| p.with(a, v)))
                .collect();
        }
        out.extend(points.into_iter().map(|p| MPlane::new(free, p)));
    }
    out
}

/// Dimension of `cell ∩ plane` (`None` if empty), from per-axis intervals.
fn cell_plane_intersection_dim(c: &Cell, h: &MPlane) -> Option<usize> {
    let mut dim = 0;
    for a in 0..c.n() {
        let lo = c.anchor().get(a);
        let hi = lo + i32::from(c.axes().contains(a));
        match h.fixed_value(a) {
            Some(v) if v < lo || v > hi => return None,
            Some(_) => {}
            None => dim += usize::from(hi > lo),
        }
    }
    Some(dim)
}

/// Recomputes the certificate by exhaustive plane enumeration.
pub fn brute_force_census(map: &LatticeMap) -> Result<SparsityCertificate> {
    brute_force_census_with_limit(map, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_census_with_limit(map: &LatticeMap, limit: i64) -> Result<SparsityCertificate> {
    let bbox = map.compute_box();
    if bbox.side() > limit {
        return Err(Error::BoxTooLarge {
            side: bbox.side(),
            limit,
        });
    }
    let (n, m, d) = (map.n, map.m, map.d());
    let mut violations = Vec::new();
    for (s, pieces) in &map.images {
        for piece in pieces {
            if let Err(e) = structure_ok(piece) {
                violations.push(format!("simplex {s}: {e}"));
                continue;
            }
            if piece.dim() > s.dim() {
                violations.push(format!("simplex {s}: piece of dimension {} exceeds {}", piece.dim(), s.dim()));
            }
            for part in parts(piece)? {
                let bad = match &part {
                    Part::Cell(c) => c.dim() > s.dim(),
                    _ => part
                        .samples(n)
                        .iter()
                        .any(|x| (0..n).filter(|&a| x[a] % RES != 0).count() > s.dim()),
                };
                if bad {
                    violations.push(format!("simplex {s}: part leaves the {}-skeleton", s.dim()));
                }
            }
        }
    }
    violations.sort();
    violations.dedup();

    let planes = enumerate_planes(&bbox, m);
    let mut conservative = false;
    let mut per_simplex = BTreeMap::new();
    let mut any_dim: HashMap<MPlane, usize> = HashMap::new();
    for (s, pieces) in map.top_simplices() {
        let mut cells = Vec::new();
        let mut sampled: Vec<Vec<Grid>> = Vec::new();
        for piece in pieces.iter().filter(|p| p.ambient() == Some(n)) {
            for part in parts(piece)? {
                match part {
                    Part::Cell(c) => cells.push(c),
                    other => {
                        conservative = true;
                        sampled.push(other.samples(n));
                    }
                }
            }
        }
        let mut hit = BTreeSet::new();
        for h in &planes {
            let dims: Vec<usize> = cells
                .iter()
                .filter_map(|c| cell_plane_intersection_dim(c, h))
                .collect();
            let mut meets = !dims.is_empty();
            let mut full = dims.iter().any(|&k| k >= d);
            for pts in &sampled {
                let inside: Vec<Grid> = pts
                    .iter()
                    .filter(|x| {
                        (0..n).all(|a| h.fixed_value(a).is_none_or(|v| x[a] == RES * i64::from(v)))
                    })
                    .copied()
                    .collect();
                if inside.iter().any(|x| (0..n).all(|a| x[a] % RES == 0)) {
                    meets = true;
                }
                if !inside.is_empty() && affine_rank(&inside) >= d {
                    full = true;
                }
            }
            if full {
                hit.insert(*h);
            }
            if meets {
                *any_dim.entry(*h).or_default() += 1;
            }
        }
        per_simplex.insert(s.clone(), hit);
    }
    Ok(build_certificate(map, per_simplex, any_dim, violations, conservative))
}

/// Most top simplices whose images meet one open unit ball centred at a
/// lattice point. A cell meets such a ball iff its closure holds the centre;
/// cones count over their bounding box.
pub fn unit_ball_census(map: &LatticeMap) -> usize {
    let mut counts: HashMap<LatticePoint, usize> = HashMap::new();
    for (_, pieces) in map.top_simplices() {
        let mut pts: BTreeSet<LatticePoint> = BTreeSet::new();
        for piece in pieces {
            match piece.cells() {
                Some(cells) => pts.extend(cells.iter().flat_map(Cell::corners)),
                None => pts.extend(piece.bbox().lattice_points()),
            }
        }
        for p in pts {
            *counts.entry(p).or_default() += 1;
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use crate::embedder::embed;

    fn points_map(pts: &[[i32; 2]]) -> LatticeMap {
        let raw: Vec<Vec<usize>> = (0..pts.len()).map(|v| vec![v]).collect();
        let y = SimplicialComplex::build(&raw).unwrap();
        let images = pts
            .iter()
            .enumerate()
            .map(|(v, p)| (Simplex::vertex(v), vec![GeomPiece::point(LatticePoint::new(p))]))
            .collect();
        LatticeMap::from_images(y, 2, 1, images)
    }

    #[test]
    fn diagonal_certificate() {
        let map = points_map(&[[0, 0], [1, 1], [2, 2], [3, 3]]);
        let cert = verify(&map);
        assert!(cert.skeletal_ok);
        assert_eq!(cert.max_simplices_per_plane, 1);
        assert_eq!(cert.max_planes_per_simplex, 2);
        assert_eq!(brute_force_census(&map).unwrap(), cert);
    }

    #[test]
    fn shared_line_counts_two() {
        let map = points_map(&[[0, 0], [0, 5]]);
        assert_eq!(verify(&map).max_simplices_per_plane, 2);
    }

    #[test]
    fn empty_map() {
        let map = LatticeMap::empty(SimplicialComplex::empty(), 3, 1);
        let cert = verify(&map);
        assert!(cert.skeletal_ok);
        assert_eq!((cert.max_planes_per_simplex, cert.max_simplices_per_plane), (0, 0));
        assert_eq!(unit_ball_census(&map), 0);
    }

    #[test]
    fn box_limit() {
        let map = points_map(&[[0, 0], [100, 1]]);
        assert_eq!(
            brute_force_census(&map),
            Err(Error::BoxTooLarge { side: 100, limit: 16 })
        );
    }

    #[test]
    fn single_point_ball() {
        assert_eq!(unit_ball_census(&points_map(&[[2, 3]])), 1);
    }

    #[test]
    fn graph_oracle_agrees() {
        let y = SimplicialComplex::build(&[vec![0, 1], vec![1, 2], vec![0, 2], vec![2, 3]]).unwrap();
        let map = embed(&y, 1, 3).unwrap();
        let cert = verify(&map);
        assert!(cert.skeletal_ok);
        assert_eq!(brute_force_census(&map).unwrap(), cert);
        assert!(unit_ball_census(&map) <= 3 * cert.max_simplices_per_plane);
    }

    #[test]
    fn cone_membership() {
        let apex = LatticePoint::new(&[0, 0]);
        let edge = Cell::edge(LatticePoint::new(&[0, 2]), 0);
        let g = |x: i64, y: i64| -> Grid {
            let mut v = [0; MAX_AMBIENT];
            v[0] = x;
            v[1] = y;
            v
        };
        assert!(cone_contains(&apex, &edge, &g(0, 4), 2)); // (0, 1)
        assert!(cone_contains(&apex, &edge, &g(2, 4), 2)); // (0.5, 1)
        assert!(!cone_contains(&apex, &edge, &g(4, 4), 2)); // (1, 1)
        assert!(cone_contains(&apex, &edge, &g(0, 0), 2));
    }

    #[test]
    fn non_integral_coordinate_flagged() {
        let y = SimplicialComplex::build(&[vec![0, 1]]).unwrap();
        let map = embed(&y, 1, 3).unwrap();
        let mut json = map.to_json();
        assert!(verify_json(&json).unwrap().skeletal_ok);
        json["images"]["0"][0]["at"][1] = serde_json::json!(0.5);
        let cert = verify_json(&json).unwrap();
        assert!(!cert.skeletal_ok);
        assert_eq!(cert.violations.len(), 1);
    }

    #[test]
    fn oversized_piece_flagged() {
        let y = SimplicialComplex::build(&[vec![0, 1]]).unwrap();
        let sq = Cell::new(LatticePoint::new(&[0, 0]), AxisSet::from_axes(&[0, 1]));
        let images = [
            (Simplex::vertex(0), vec![GeomPiece::point(LatticePoint::new(&[0, 0]))]),
            (Simplex::vertex(1), vec![GeomPiece::point(LatticePoint::new(&[1, 1]))]),
            (Simplex::edge(0, 1), vec![GeomPiece::Chain { dim: 2, cells: vec![sq] }]),
        ]
        .into_iter()
        .collect();
        let map = LatticeMap::from_images(y, 2, 1, images);
        assert!(!verify(&map).skeletal_ok);
        assert!(!brute_force_census(&map).unwrap().skeletal_ok);
    }
}
