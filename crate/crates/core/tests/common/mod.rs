//! Brute-force oracles shared by the integration tests. Written without the
//! library's plane machinery so they can be compared against it.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use sparse_embed::lattice::{AxisSet, Cell, LatticePoint, MPlane};

/// An axis-parallel plane: free axes as a bitmask, values on the fixed axes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Plane {
    pub free: u16,
    pub fixed: Vec<Option<i32>>,
}

impl Plane {
    pub fn to_mplane(&self) -> MPlane {
        let n = self.fixed.len();
        let axes: Vec<usize> = (0..n).filter(|a| self.free & (1 << a) != 0).collect();
        let through: Vec<i32> = self.fixed.iter().map(|v| v.unwrap_or(0)).collect();
        MPlane::new(AxisSet::from_axes(&axes), LatticePoint::new(&through))
    }
}

/// Every `m`-plane whose fixed coordinates lie in `[lo, hi]`.
pub fn all_planes(n: usize, m: usize, lo: &[i32], hi: &[i32]) -> Vec<Plane> {
    let mut out = Vec::new();
    for mask in 0u16..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let mut partial: Vec<Vec<Option<i32>>> = vec![Vec::new()];
        for a in 0..n {
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    let choices: Vec<Option<i32>> = if mask & (1 << a) != 0 {
                        vec![None]
                    } else {
                        (lo[a]..=hi[a]).map(Some).collect()
                    };
                    choices.into_iter().map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(|fixed| Plane { free: mask, fixed }));
    }
    out
}

/// Dimension of `cell ∩ plane`, or `None` if they miss.
pub fn meet_dim(cell: &Cell, plane: &Plane) -> Option<usize> {
    let mut dim = 0;
    for (a, fixed) in plane.fixed.iter().enumerate() {
        let lo = cell.anchor().get(a);
        let hi = lo + i32::from(cell.axes().contains(a));
        match fixed {
            Some(v) if *v < lo || *v > hi => return None,
            Some(_) => {}
            None => dim += usize::from(hi > lo),
        }
    }
    Some(dim)
}

pub fn cells_box(cells: &[Cell]) -> (Vec<i32>, Vec<i32>) {
    let n = cells[0].n();
    let mut lo = vec![i32::MAX; n];
    let mut hi = vec![i32::MIN; n];
    for c in cells {
        for p in c.corners() {
            for a in 0..n {
                lo[a] = lo[a].min(p.get(a));
                hi[a] = hi[a].max(p.get(a));
            }
        }
    }
    (lo, hi)
}

/// Planes meeting some cell in dimension exactly `d`.
pub fn brute_hits(cells: &[Cell], m: usize, d: usize) -> BTreeSet<MPlane> {
    if cells.is_empty() {
        return BTreeSet::new();
    }
    let (lo, hi) = cells_box(cells);
    all_planes(cells[0].n(), m, &lo, &hi)
        .into_iter()
        .filter(|h| cells.iter().filter_map(|c| meet_dim(c, h)).max() == Some(d))
        .map(|h| h.to_mplane())
        .collect()
}

/// Largest number of points on one `m`-plane, by direct comparison.
pub fn max_points_per_plane(points: &[LatticePoint], m: usize) -> usize {
    let n = points.first().map_or(0, LatticePoint::n);
    let mut counts: BTreeMap<(u16, Vec<i32>), usize> = BTreeMap::new();
    for p in points {
        for mask in 0u16..(1 << n) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let key: Vec<i32> = (0..n).map(|a| if mask & (1 << a) != 0 { 0 } else { p.get(a) }).collect();
            *counts.entry((mask, key)).or_default() += 1;
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Mod-2 boundary of a set of cells, computed from corner faces.
pub fn boundary_mod2(cells: &[Cell]) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    for c in cells {
        for a in c.axes().iter() {
            let lower = Cell::new(c.anchor(), c.axes().without(a));
            let upper = Cell::new(c.anchor().offset(a, 1), c.axes().without(a));
            for f in [lower, upper] {
                if !out.remove(&f) {
                    out.insert(f);
                }
            }
        }
    }
    out
}

/// Every cell of every dimension inside `[0, hi]` per axis.
pub fn all_cells(hi: &[i32]) -> Vec<Cell> {
    let n = hi.len();
    let mut anchors = vec![LatticePoint::origin(n)];
    for (a, &h) in hi.iter().enumerate() {
        anchors = anchors
            .into_iter()
            .flat_map(|p| (0..=h).map(move |x| p.with(a, x)))
            .collect();
    }
    let mut out = Vec::new();
    for p in anchors {
        for mask in 0u16..(1 << n) {
            let axes: Vec<usize> = (0..n).filter(|a| mask & (1 << a) != 0).collect();
            if axes.iter().all(|&a| p.get(a) < hi[a]) {
                out.push(Cell::new(p, AxisSet::from_axes(&axes)));
            }
        }
    }
    out
}
