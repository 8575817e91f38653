//! The unit lattice `Λ^n` and its skeleta.
//!
//! Everything here is integral. A [`Cell`] is `anchor + [0,1]^S` for a set of
//! spanned axes `S`; polylines and cubical chains are lists of cells, and the
//! plane queries reduce to per-cell arithmetic. Cones are the one symbolic
//! piece: their plane sets are conservative supersets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest ambient dimension supported by the fixed-size point layout.
pub const MAX_AMBIENT: usize = 8;

/// A point of `Z^n`, `n <= MAX_AMBIENT`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    n: u8,
    coords: [i32; MAX_AMBIENT],
}

impl LatticePoint {
    pub fn new(coords: &[i32]) -> Self {
        Self::try_new(coords).expect("ambient dimension exceeds MAX_AMBIENT")
    }

    pub fn try_new(coords: &[i32]) -> Result<Self> {
        if coords.len() > MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(coords.len()));
        }
        let mut c = [0; MAX_AMBIENT];
        c[..coords.len()].copy_from_slice(coords);
        Ok(LatticePoint {
            n: coords.len() as u8,
            coords: c,
        })
    }

    pub fn origin(n: usize) -> Self {
        Self::new(&vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.n as usize]
    }

    pub fn get(&self, axis: usize) -> i32 {
        self.coords()[axis]
    }

    pub fn with(mut self, axis: usize, value: i32) -> Self {
        assert!(axis < self.n(), "axis {axis} out of range");
        self.coords[axis] = value;
        self
    }

    pub fn offset(mut self, axis: usize, delta: i32) -> Self {
        assert!(axis < self.n(), "axis {axis} out of range");
        self.coords[axis] += delta;
        self
    }

    /// Embeds into a larger ambient dimension, padding with zeros.
    pub fn lift(self, n: usize) -> Self {
        assert!(n >= self.n() && n <= MAX_AMBIENT);
        LatticePoint {
            n: n as u8,
            coords: self.coords,
        }
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i32>::deserialize(d)?;
        LatticePoint::try_new(&v).map_err(D::Error::custom)
    }
}

/// A set of axis indices stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AxisSet(u16);

impl AxisSet {
    pub const EMPTY: AxisSet = AxisSet(0);

    pub fn from_axes(axes: &[usize]) -> Self {
        AxisSet(axes.iter().fold(0, |m, &a| m | (1 << a)))
    }

    pub fn all(n: usize) -> Self {
        AxisSet(((1u32 << n) - 1) as u16)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, axis: usize) -> bool {
        self.0 & (1 << axis) != 0
    }

    pub fn with(self, axis: usize) -> Self {
        AxisSet(self.0 | (1 << axis))
    }

    pub fn without(self, axis: usize) -> Self {
        AxisSet(self.0 & !(1 << axis))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: AxisSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: AxisSet) -> Self {
        AxisSet(self.0 | other.0)
    }

    pub fn minus(self, other: AxisSet) -> Self {
        AxisSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..16).filter(move |&a| self.0 & (1 << a) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self` with exactly `k` elements, in increasing bitmask
    /// order.
    pub fn subsets_of_size(self, k: usize) -> Vec<AxisSet> {
        let axes = self.to_vec();
        if k > axes.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(AxisSet::from_axes(
                &idx.iter().map(|&i| axes[i]).collect::<Vec<_>>(),
            ));
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] != i + axes.len() - k {
                    break;
                }
                if i == 0 && idx[0] == axes.len() - k {
                    return out;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

impl fmt::Debug for AxisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

/// The unit cube `anchor + [0,1]^axes` of the lattice skeleton.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    anchor: LatticePoint,
    axes: AxisSet,
}

impl Cell {
    pub fn new(anchor: LatticePoint, axes: AxisSet) -> Self {
        debug_assert!(axes.iter().all(|a| a < anchor.n()));
        Cell { anchor, axes }
    }

    pub fn vertex(p: LatticePoint) -> Self {
        Cell::new(p, AxisSet::EMPTY)
    }

    /// Unit edge from `p` to `p + e_axis`.
    pub fn edge(p: LatticePoint, axis: usize) -> Self {
        Cell::new(p, AxisSet::EMPTY.with(axis))
    }

    pub fn anchor(&self) -> LatticePoint {
        self.anchor
    }

    pub fn axes(&self) -> AxisSet {
        self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn n(&self) -> usize {
        self.anchor.n()
    }

    /// The `2^k` lattice corners of the closed cell.
    pub fn corners(&self) -> Vec<LatticePoint> {
        let axes = self.axes.to_vec();
        (0u32..(1 << axes.len()))
            .map(|mask| {
                axes.iter().enumerate().fold(self.anchor, |p, (i, &a)| {
                    if mask & (1 << i) != 0 {
                        p.offset(a, 1)
                    } else {
                        p
                    }
                })
            })
            .collect()
    }

    /// Whether the lattice point lies in the closed cell.
    pub fn contains_point(&self, p: &LatticePoint) -> bool {
        (0..self.n()).all(|a| {
            let lo = self.anchor.get(a);
            let x = p.get(a);
            if self.axes.contains(a) {
                x == lo || x == lo + 1
            } else {
                x == lo
            }
        })
    }

    /// Mod-2 boundary: two faces per spanned axis.
    pub fn boundary(&self) -> Vec<Cell> {
        self.axes
            .iter()
            .flat_map(|a| {
                let face_axes = self.axes.without(a);
                [
                    Cell::new(self.anchor, face_axes),
                    Cell::new(self.anchor.offset(a, 1), face_axes),
                ]
            })
            .collect()
    }

    /// Image under the projection `x_axis := value`; a spanned axis collapses.
    pub fn project(&self, axis: usize, value: i32) -> Cell {
        Cell::new(self.anchor.with(axis, value), self.axes.without(axis))
    }

    /// Cells swept when this cell slides along `axis` to the hyperplane
    /// `x_axis = target`. Empty if the cell spans `axis` or already lies there.
    pub fn sweep(&self, axis: usize, target: i32) -> Vec<Cell> {
        if self.axes.contains(axis) {
            return Vec::new();
        }
        let from = self.anchor.get(axis);
        let (lo, hi) = if from <= target { (from, target) } else { (target, from) };
        let axes = self.axes.with(axis);
        (lo..hi)
            .map(|x| Cell::new(self.anchor.with(axis, x), axes))
            .collect()
    }

    pub fn bbox(&self) -> BoundingBox {
        let lo: Vec<i32> = self.anchor.coords().to_vec();
        let hi: Vec<i32> = (0..self.n())
            .map(|a| self.anchor.get(a) + i32::from(self.axes.contains(a)))
            .collect();
        BoundingBox {
            lo: Some(lo),
            hi: Some(hi),
            n: self.n(),
        }
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+{:?}", self.anchor, self.axes)
    }
}

#[derive(Serialize, Deserialize)]
struct CellWire {
    anchor: LatticePoint,
    axes: Vec<usize>,
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CellWire {
            anchor: self.anchor,
            axes: self.axes.to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CellWire::deserialize(d)?;
        if let Some(&a) = w.axes.iter().find(|&&a| a >= w.anchor.n()) {
            return Err(D::Error::custom(format!("cell axis {a} out of range")));
        }
        Ok(Cell::new(w.anchor, AxisSet::from_axes(&w.axes)))
    }
}

/// A cubical chain with coefficients in `Z/2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    cells: BTreeSet<Cell>,
}

impl Chain {
    pub fn new() -> Self {
        Chain::default()
    }

    pub fn from_cells<I: IntoIterator<Item = Cell>>(cells: I) -> Self {
        let mut c = Chain::new();
        for cell in cells {
            c.toggle(cell);
        }
        c
    }

    pub fn toggle(&mut self, cell: Cell) {
        if !self.cells.remove(&cell) {
            self.cells.insert(cell);
        }
    }

    pub fn add(&mut self, other: &Chain) {
        for &c in &other.cells {
            self.toggle(c);
        }
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn boundary(&self) -> Chain {
        Chain::from_cells(self.cells.iter().flat_map(Cell::boundary))
    }

    /// Chain-level projection: cells spanning `axis` map to zero.
    pub fn project(&self, axis: usize, value: i32) -> Chain {
        Chain::from_cells(
            self.cells
                .iter()
                .filter(|c| !c.axes.contains(axis))
                .map(|c| c.project(axis, value)),
        )
    }

    /// The prism `P_H` between the chain and its projection to
    /// `x_axis = target`, so that `∂P = C + π(C) + P(∂C)` mod 2.
    pub fn sweep(&self, axis: usize, target: i32) -> Chain {
        Chain::from_cells(self.cells.iter().flat_map(|c| c.sweep(axis, target)))
    }
}

/// An axis-parallel `m`-plane: `m` free axes, the rest fixed at integers.
///
/// Canonical form: fixed coordinates live in `fixed`, free coordinates of
/// `fixed` are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MPlane {
    free: AxisSet,
    fixed: LatticePoint,
}

impl MPlane {
    pub fn new(free: AxisSet, through: LatticePoint) -> Self {
        let mut fixed = through;
        for a in free.iter() {
            fixed = fixed.with(a, 0);
        }
        MPlane { free, fixed }
    }

    pub fn from_parts(n: usize, free: &[usize], fixed: &BTreeMap<usize, i32>) -> Result<Self> {
        let free_set = AxisSet::from_axes(free);
        if free.iter().any(|&a| a >= n) {
            return Err(Error::AxisOutOfRange { axis: n, n });
        }
        let mut p = LatticePoint::try_new(&vec![0; n])?;
        for a in 0..n {
            match (free_set.contains(a), fixed.get(&a)) {
                (true, None) => {}
                (false, Some(&v)) => p = p.with(a, v),
                _ => {
                    return Err(Error::Parse(format!(
                        "axis {a} must be exactly one of free or fixed"
                    )))
                }
            }
        }
        Ok(MPlane::new(free_set, p))
    }

    pub fn n(&self) -> usize {
        self.fixed.n()
    }

    pub fn m(&self) -> usize {
        self.free.len()
    }

    pub fn free(&self) -> AxisSet {
        self.free
    }

    pub fn fixed_value(&self, axis: usize) -> Option<i32> {
        (!self.free.contains(axis)).then(|| self.fixed.get(axis))
    }

    pub fn fixed_coords(&self) -> BTreeMap<usize, i32> {
        (0..self.n())
            .filter(|&a| !self.free.contains(a))
            .map(|a| (a, self.fixed.get(a)))
            .collect()
    }

    pub fn contains_point(&self, p: &LatticePoint) -> bool {
        (0..self.n()).all(|a| self.free.contains(a) || p.get(a) == self.fixed.get(a))
    }
}

impl fmt::Debug for MPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "plane(free={:?}, fixed={:?})", self.free, self.fixed_coords())
    }
}

#[derive(Serialize, Deserialize)]
struct MPlaneWire {
    free: Vec<usize>,
    fixed: BTreeMap<String, i32>,
}

impl Serialize for MPlane {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MPlaneWire {
            free: self.free.to_vec(),
            fixed: self
                .fixed_coords()
                .into_iter()
                .map(|(a, v)| (a.to_string(), v))
                .collect(),
        }
        .serialize(s)
    }
}

/// Every `m`-plane with free axes inside `allowed` that contains the cell.
///
/// The cell must span only allowed axes; otherwise nothing is returned.
pub fn planes_containing(cell: &Cell, m: usize, allowed: AxisSet) -> Vec<MPlane> {
    if !cell.axes.is_subset(allowed) || cell.dim() > m {
        return Vec::new();
    }
    allowed
        .minus(cell.axes)
        .subsets_of_size(m - cell.dim())
        .into_iter()
        .map(|extra| MPlane::new(cell.axes.union(extra), cell.anchor))
        .collect()
}

/// Axis-aligned integer box; `None` bounds mean empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub n: usize,
    pub lo: Option<Vec<i32>>,
    pub hi: Option<Vec<i32>>,
}

impl BoundingBox {
    pub fn empty(n: usize) -> Self {
        BoundingBox { n, lo: None, hi: None }
    }

    pub fn of_point(p: &LatticePoint) -> Self {
        BoundingBox {
            n: p.n(),
            lo: Some(p.coords().to_vec()),
            hi: Some(p.coords().to_vec()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_none()
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        match (&self.lo, &self.hi, &other.lo, &other.hi) {
            (None, _, _, _) => other.clone(),
            (_, _, None, _) => self.clone(),
            (Some(l1), Some(h1), Some(l2), Some(h2)) => BoundingBox {
                n: self.n,
                lo: Some(l1.iter().zip(l2).map(|(a, b)| *a.min(b)).collect()),
                hi: Some(h1.iter().zip(h2).map(|(a, b)| *a.max(b)).collect()),
            },
            _ => unreachable!("lo and hi are set together"),
        }
    }

    pub fn include_point(&mut self, p: &LatticePoint) {
        *self = self.union(&BoundingBox::of_point(p));
    }

    /// Interval on one axis.
    pub fn range(&self, axis: usize) -> Option<(i32, i32)> {
        Some((self.lo.as_ref()?[axis], self.hi.as_ref()?[axis]))
    }

    /// Largest per-axis extent `hi - lo` (0 when empty).
    pub fn side(&self) -> i64 {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| i64::from(*h) - i64::from(*l))
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Largest upper coordinate, i.e. the side of the smallest `[0,R]^n`
    /// containing a box that starts at the origin.
    pub fn max_coordinate(&self) -> i64 {
        self.hi
            .as_ref()
            .and_then(|h| h.iter().copied().max())
            .map(i64::from)
            .unwrap_or(0)
    }

    pub fn contains_point(&self, p: &LatticePoint) -> bool {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => (0..self.n).all(|a| lo[a] <= p.get(a) && p.get(a) <= hi[a]),
            _ => false,
        }
    }

    /// Every lattice point in the box.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let (Some(lo), Some(hi)) = (&self.lo, &self.hi) else {
            return Vec::new();
        };
        let mut out = vec![LatticePoint::new(lo)];
        for a in 0..self.n {
            out = out
                .into_iter()
                .flat_map(|p| (lo[a]..=hi[a]).map(move |x| p.with(a, x)))
                .collect();
        }
        out
    }
}

/// Whether a plane-hit set is exact or a conservative superset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    OverApproximate,
}

/// A piece of a simplex image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GeomPiece {
    Point {
        at: LatticePoint,
    },
    /// A lattice path stored as unit edges.
    Polyline {
        edges: Vec<Cell>,
    },
    Chain {
        dim: usize,
        cells: Vec<Cell>,
    },
    Prism {
        base: Box<GeomPiece>,
        axis: usize,
        from: i32,
        to: i32,
    },
    Cone {
        base: Box<GeomPiece>,
        apex: LatticePoint,
    },
}

impl GeomPiece {
    pub fn point(p: LatticePoint) -> Self {
        GeomPiece::Point { at: p }
    }

    /// Polyline through the given points; every consecutive pair must differ
    /// in one coordinate. Longer axis-parallel steps are split into unit edges.
    pub fn polyline(points: &[LatticePoint]) -> Result<Self> {
        let mut edges = Vec::new();
        for w in points.windows(2) {
            let (p, q) = (w[0], w[1]);
            let diff: Vec<usize> = (0..p.n()).filter(|&a| p.get(a) != q.get(a)).collect();
            match diff.as_slice() {
                [] => {}
                [a] => edges.extend(Cell::vertex(p).sweep(*a, q.get(*a))),
                _ => {
                    return Err(Error::MalformedPiece(format!(
                        "polyline step {p:?} -> {q:?} is not axis-parallel"
                    )))
                }
            }
        }
        Ok(GeomPiece::Polyline { edges })
    }

    /// Wraps a set of equal-dimension cells in the most specific piece type.
    pub fn from_cells(cells: Vec<Cell>) -> Self {
        let dim = cells.first().map(Cell::dim).unwrap_or(0);
        match (dim, cells.len()) {
            (0, 1) => GeomPiece::point(cells[0].anchor),
            (1, _) => GeomPiece::Polyline { edges: cells },
            _ => GeomPiece::Chain { dim, cells },
        }
    }

    /// Nominal dimension.
    pub fn dim(&self) -> usize {
        match self {
            GeomPiece::Point { .. } => 0,
            GeomPiece::Polyline { .. } => 1,
            GeomPiece::Chain { dim, .. } => *dim,
            GeomPiece::Prism { base, from, to, .. } => base.dim() + usize::from(from != to),
            GeomPiece::Cone { base, .. } => base.dim() + 1,
        }
    }

    /// Ambient dimension, if the piece is non-empty.
    pub fn ambient(&self) -> Option<usize> {
        match self {
            GeomPiece::Point { at } => Some(at.n()),
            GeomPiece::Polyline { edges: cells } | GeomPiece::Chain { cells, .. } => {
                cells.first().map(Cell::n)
            }
            GeomPiece::Prism { base, .. } => base.ambient(),
            GeomPiece::Cone { apex, .. } => Some(apex.n()),
        }
    }

    /// True when every query on the piece is exact (no cone inside).
    pub fn is_exact(&self) -> bool {
        match self {
            GeomPiece::Cone { .. } => false,
            GeomPiece::Prism { base, .. } => base.is_exact(),
            _ => true,
        }
    }

    /// Explicit cells of an exact piece; `None` for pieces containing a cone.
    pub fn cells(&self) -> Option<Vec<Cell>> {
        match self {
            GeomPiece::Point { at } => Some(vec![Cell::vertex(*at)]),
            GeomPiece::Polyline { edges: cells } | GeomPiece::Chain { cells, .. } => {
                Some(cells.clone())
            }
            GeomPiece::Prism {
                base,
                axis,
                from,
                to,
            } => {
                let base_cells = base.cells()?;
                if from == to {
                    return Some(base_cells);
                }
                let mut out: Vec<Cell> = base_cells
                    .iter()
                    .flat_map(|c| c.with_coord(*axis, *from).sweep(*axis, *to))
                    .collect();
                out.sort();
                out.dedup();
                Some(out)
            }
            GeomPiece::Cone { .. } => None,
        }
    }

    /// Lattice points the piece certainly passes through: cell corners for
    /// exact pieces, base points plus apex for cones.
    pub fn lattice_points(&self) -> BTreeSet<LatticePoint> {
        match self {
            GeomPiece::Cone { base, apex } => {
                let mut s = base.lattice_points();
                s.insert(*apex);
                s
            }
            GeomPiece::Prism { base, axis, from, to } if !base.is_exact() => {
                let (lo, hi) = (*from.min(to), *from.max(to));
                base.lattice_points()
                    .into_iter()
                    .flat_map(|p| (lo..=hi).map(move |x| p.with(*axis, x)))
                    .collect()
            }
            _ => self
                .cells()
                .unwrap_or_default()
                .iter()
                .flat_map(Cell::corners)
                .collect(),
        }
    }

    pub fn bbox(&self) -> BoundingBox {
        let n = self.ambient().unwrap_or(0);
        match self {
            GeomPiece::Cone { base, apex } => {
                let mut b = base.bbox();
                b.include_point(apex);
                b
            }
            GeomPiece::Prism { base, axis, from, to } if !base.is_exact() => {
                let mut b = base.bbox();
                if let (Some(lo), Some(hi)) = (b.lo.as_mut(), b.hi.as_mut()) {
                    lo[*axis] = *from.min(to);
                    hi[*axis] = *from.max(to);
                }
                b
            }
            _ => self
                .cells()
                .unwrap_or_default()
                .iter()
                .fold(BoundingBox::empty(n), |b, c| b.union(&c.bbox())),
        }
    }

    /// Whether the lattice point lies on the piece (exact pieces) or among
    /// its defining points (cones).
    pub fn contains_lattice_point(&self, p: &LatticePoint) -> bool {
        match self.cells() {
            Some(cells) => cells.iter().any(|c| c.contains_point(p)),
            None => self.lattice_points().contains(p),
        }
    }
}

impl Cell {
    /// The same cell moved so that its `axis` coordinate is `value`.
    pub fn with_coord(&self, axis: usize, value: i32) -> Cell {
        Cell::new(self.anchor.with(axis, value), self.axes)
    }
}

fn check_axis(piece: &GeomPiece, axis: usize) -> Result<()> {
    let n = piece.ambient().unwrap_or(usize::MAX);
    if n != usize::MAX && axis >= n {
        return Err(Error::AxisOutOfRange { axis, n });
    }
    Ok(())
}

/// Orthogonal projection to the hyperplane `x_axis = value`.
///
/// Geometric image: cells spanning `axis` drop a dimension, duplicates merge,
/// and only cells of the top remaining dimension are kept.
pub fn project(piece: &GeomPiece, axis: usize, value: i32) -> Result<GeomPiece> {
    check_axis(piece, axis)?;
    Ok(match piece {
        GeomPiece::Point { at } => GeomPiece::point(at.with(axis, value)),
        GeomPiece::Cone { base, apex } => GeomPiece::Cone {
            base: Box::new(project(base, axis, value)?),
            apex: apex.with(axis, value),
        },
        GeomPiece::Prism { base, axis: a, from, to } if !base.is_exact() => {
            if *a == axis {
                project(base, axis, value)?
            } else {
                GeomPiece::Prism {
                    base: Box::new(project(base, axis, value)?),
                    axis: *a,
                    from: *from,
                    to: *to,
                }
            }
        }
        _ => {
            let cells = piece.cells().unwrap_or_default();
            let projected: BTreeSet<Cell> = cells.iter().map(|c| c.project(axis, value)).collect();
            let top = projected.iter().map(Cell::dim).max().unwrap_or(0);
            let kept: Vec<Cell> = projected.into_iter().filter(|c| c.dim() == top).collect();
            if kept.is_empty() {
                piece.clone()
            } else {
                GeomPiece::from_cells(kept)
            }
        }
    })
}

/// The prism swept by `piece` moving along `axis` from `from` to `to`.
pub fn prism_between(piece: &GeomPiece, axis: usize, from: i32, to: i32) -> Result<GeomPiece> {
    check_axis(piece, axis)?;
    if piece.lattice_points().iter().any(|p| p.get(axis) != from)
        || piece
            .cells()
            .is_some_and(|cs| cs.iter().any(|c| c.axes.contains(axis)))
    {
        return Err(Error::PieceNotInHyperplane { axis, value: from });
    }
    if from == to {
        return Ok(piece.clone());
    }
    match piece.cells() {
        Some(cells) => {
            let mut swept: Vec<Cell> = cells.iter().flat_map(|c| c.sweep(axis, to)).collect();
            swept.sort();
            swept.dedup();
            Ok(GeomPiece::from_cells(swept))
        }
        None => {
            let (lo, hi) = (from.min(to), from.max(to));
            Ok(GeomPiece::Prism {
                base: Box::new(project(piece, axis, lo)?),
                axis,
                from: lo,
                to: hi,
            })
        }
    }
}

/// Cone over `piece` from one of its own points.
pub fn cone_over(piece: &GeomPiece, apex: LatticePoint) -> Result<GeomPiece> {
    if !piece.contains_lattice_point(&apex) {
        return Err(Error::ApexNotOnPiece);
    }
    if let GeomPiece::Point { .. } = piece {
        return Ok(piece.clone());
    }
    Ok(GeomPiece::Cone {
        base: Box::new(piece.clone()),
        apex,
    })
}

/// The affine hull of one convex part of a piece: a lattice anchor plus the
/// span of integer direction vectors. Every piece is a finite union of such
/// parts, which makes plane queries on cones exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flat {
    pub anchor: LatticePoint,
    pub dirs: Vec<[i64; MAX_AMBIENT]>,
}

impl Flat {
    fn of_cell(c: &Cell) -> Flat {
        Flat {
            anchor: c.anchor,
            dirs: c
                .axes
                .iter()
                .map(|a| {
                    let mut v = [0; MAX_AMBIENT];
                    v[a] = 1;
                    v
                })
                .collect(),
        }
    }

    /// Dimension of the affine hull.
    pub fn rank(&self) -> usize {
        rank(&self.dirs)
    }

    /// Axes along which the affine hull varies.
    pub fn support(&self) -> AxisSet {
        self.dirs.iter().fold(AxisSet::EMPTY, |s, v| {
            (0..MAX_AMBIENT).filter(|&a| v[a] != 0).fold(s, AxisSet::with)
        })
    }

    /// `m`-planes containing the affine hull.
    pub fn containing_planes(&self, m: usize) -> Vec<MPlane> {
        let n = self.anchor.n();
        planes_containing(&Cell::new(self.anchor, self.support()), m, AxisSet::all(n))
    }
}

/// Rank of a list of integer vectors (fraction-free elimination).
fn rank(vectors: &[[i64; MAX_AMBIENT]]) -> usize {
    let mut rows: Vec<[i128; MAX_AMBIENT]> = vectors
        .iter()
        .map(|v| v.map(i128::from))
        .collect();
    let mut r = 0;
    for col in 0..MAX_AMBIENT {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        let pr = rows[r];
        for row in rows.iter_mut().skip(r + 1) {
            if row[col] != 0 {
                let f = row[col];
                for c in 0..MAX_AMBIENT {
                    row[c] = row[c] * pr[col] - pr[c] * f;
                }
                let g = row.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    row.iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl GeomPiece {
    /// Decomposition into convex flats whose union is the piece.
    pub fn flats(&self) -> Vec<Flat> {
        match self {
            GeomPiece::Cone { base, apex } => base
                .flats()
                .into_iter()
                .map(|f| {
                    let mut dirs = f.dirs.clone();
                    let mut v = [0; MAX_AMBIENT];
                    for (a, x) in v.iter_mut().enumerate().take(apex.n()) {
                        *x = i64::from(f.anchor.get(a)) - i64::from(apex.get(a));
                    }
                    dirs.push(v);
                    Flat { anchor: *apex, dirs }
                })
                .collect(),
            GeomPiece::Prism { base, axis, from, to } if !base.is_exact() => base
                .flats()
                .into_iter()
                .map(|f| {
                    let mut dirs = f.dirs;
                    if from != to {
                        let mut v = [0; MAX_AMBIENT];
                        v[*axis] = 1;
                        dirs.push(v);
                    }
                    Flat {
                        anchor: f.anchor.with(*axis, *from.min(to)),
                        dirs,
                    }
                })
                .collect(),
            _ => self.cells().unwrap_or_default().iter().map(Flat::of_cell).collect(),
        }
    }
}

/// `m`-planes meeting `piece` in a set of dimension `d`.
///
/// For cell pieces a plane counts when it contains a full `d`-cell. Pieces
/// with cones are decomposed into flats; a plane counts when it contains a
/// flat of rank `d`. The second case is flagged `OverApproximate`: callers
/// may rely only on the result being a superset.
pub fn planes_hit_in_dim(
    piece: &GeomPiece,
    m: usize,
    d: usize,
) -> Result<(BTreeSet<MPlane>, Exactness)> {
    let Some(n) = piece.ambient() else {
        return Ok((BTreeSet::new(), Exactness::Exact));
    };
    if d > m || m > n {
        return Err(Error::InvalidConfig(format!(
            "plane query needs d <= m <= n, got d={d}, m={m}, n={n}"
        )));
    }
    if piece.dim() != d {
        return Err(Error::DimensionMismatch {
            piece: piece.dim(),
            expected: d,
        });
    }
    let all = AxisSet::all(n);
    if let Some(cells) = piece.cells() {
        let planes = cells
            .iter()
            .filter(|c| c.dim() == d)
            .flat_map(|c| planes_containing(c, m, all))
            .collect();
        return Ok((planes, Exactness::Exact));
    }
    let planes = piece
        .flats()
        .iter()
        .filter(|f| f.rank() == d)
        .flat_map(|f| f.containing_planes(m))
        .collect();
    Ok((planes, Exactness::OverApproximate))
}
