//! Greedy `m`-sparse vertex placement.
//!
//! Each placed point blocks the `binom(n, m)` axis-parallel `m`-planes through
//! it. A point is free iff none of its `(n-m)`-coordinate projections is
//! already blocked, so occupancy is tracked per complementary axis subset.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{planes_containing, AxisSet, Cell, LatticePoint, MPlane, MAX_AMBIENT};

/// Number of random probes before seeded placement falls back to a scan.
const SEEDED_PROBES: usize = 256;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Smallest `C` with `C^(n-m) > binom(n, m)`.
pub fn min_constant(n: usize, m: usize) -> Result<u32> {
    if m > n {
        return Err(Error::InvalidConfig(format!("m={m} exceeds n={n}")));
    }
    if m == n {
        return Err(Error::MEqualsN);
    }
    let b = binomial(n, m);
    let k = (n - m) as u32;
    Ok((1u32..).find(|&c| (c as u128).pow(k) > b).unwrap())
}

/// Smallest integer `s` with `s >= c * v^(1/k)`, computed exactly.
pub fn scaled_root(c: u64, v: u64, k: u32) -> u64 {
    let target = (c as u128).pow(k) * v as u128;
    let guess = (c as f64 * (v as f64).powf(1.0 / k as f64)).floor() as u64;
    let mut s = guess.saturating_sub(2);
    while (s as u128).checked_pow(k).is_some_and(|p| p < target) {
        s += 1;
    }
    s
}

/// Order used to pick among free points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    #[default]
    Lexicographic,
    /// Uniform probing with a fixed seed, falling back to lexicographic
    /// order when probes keep landing on blocked points.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementConfig {
    pub n: usize,
    pub m: usize,
    pub side_constant: u32,
    pub vertex_count: usize,
}

impl PlacementConfig {
    /// Config with the smallest valid constant.
    pub fn minimal(n: usize, m: usize, vertex_count: usize) -> Result<Self> {
        let side_constant = if m == n { 1 } else { min_constant(n, m)? };
        Self::new(n, m, side_constant, vertex_count)
    }

    pub fn new(n: usize, m: usize, side_constant: u32, vertex_count: usize) -> Result<Self> {
        if n == 0 || n > MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(n));
        }
        if m > n {
            return Err(Error::InvalidConfig(format!("m={m} exceeds n={n}")));
        }
        if m == n && vertex_count > 1 {
            return Err(Error::MEqualsN);
        }
        if side_constant == 0 {
            return Err(Error::InvalidConfig("side constant must be positive".into()));
        }
        if m < n {
            let c = side_constant as u128;
            let k = (n - m) as u32;
            if binomial(n, m) * c.pow(m as u32) >= c.pow(n as u32) || c.pow(k) <= binomial(n, m) {
                return Err(Error::InvalidConfig(format!(
                    "C={side_constant} fails the counting inequality for n={n}, m={m}"
                )));
            }
        }
        Ok(PlacementConfig {
            n,
            m,
            side_constant,
            vertex_count,
        })
    }

    /// Box side `ceil(C * V^(1/(n-m)))`; points live in `[0, side]^n`.
    pub fn side(&self) -> i32 {
        if self.m == self.n {
            return 0;
        }
        let v = self.vertex_count.max(1) as u64;
        scaled_root(self.side_constant as u64, v, (self.n - self.m) as u32) as i32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPlacement {
    pub n: usize,
    pub m: usize,
    pub side_constant: u32,
    pub side: i32,
    pub coords: Vec<LatticePoint>,
    pub occupied_planes: HashMap<MPlane, usize>,
}

#[derive(Serialize, Deserialize)]
struct PlacementJson {
    n: usize,
    m: usize,
    #[serde(rename = "C")]
    c: u32,
    coords: Vec<LatticePoint>,
}

impl VertexPlacement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PlacementJson {
            n: self.n,
            m: self.m,
            c: self.side_constant,
            coords: self.coords.clone(),
        })
        .expect("placement serializes")
    }

    /// Rebuilds a placement from JSON, recomputing plane occupancy.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: PlacementJson = serde_json::from_value(v.clone())?;
        if j.coords.iter().any(|p| p.n() != j.n) || j.m > j.n {
            return Err(Error::Parse("placement coordinates disagree with n".into()));
        }
        let mut occupied_planes = HashMap::new();
        for (i, p) in j.coords.iter().enumerate() {
            for h in planes_containing(&Cell::vertex(*p), j.m, AxisSet::all(j.n)) {
                occupied_planes.entry(h).or_insert(i);
            }
        }
        let side = j
            .coords
            .iter()
            .flat_map(|p| p.coords().to_vec())
            .max()
            .unwrap_or(0);
        Ok(VertexPlacement {
            n: j.n,
            m: j.m,
            side_constant: j.c,
            side,
            coords: j.coords,
            occupied_planes,
        })
    }

    /// Largest coordinate used by any placed point.
    pub fn achieved_side(&self) -> i32 {
        self.coords
            .iter()
            .flat_map(|p| p.coords().to_vec())
            .max()
            .unwrap_or(0)
    }
}

/// Occupied projections, one set per complementary `(n-m)`-axis subset.
struct Occupancy {
    n: usize,
    side: i32,
    /// For each `(n-m)`-subset: the subset and the set of occupied
    /// projections (coordinates outside the subset zeroed).
    blocks: Vec<(AxisSet, HashSet<LatticePoint>)>,
    /// For each depth `k`, the block indices whose axes are all `< k`.
    complete_at: Vec<Vec<usize>>,
}

impl Occupancy {
    fn new(n: usize, m: usize, side: i32) -> Self {
        let blocks: Vec<(AxisSet, HashSet<LatticePoint>)> = AxisSet::all(n)
            .subsets_of_size(n - m)
            .into_iter()
            .map(|s| (s, HashSet::new()))
            .collect();
        let complete_at = (0..=n)
            .map(|k| {
                blocks
                    .iter()
                    .enumerate()
                    .filter(|(_, (s, _))| s.iter().max().map_or(k == 0, |mx| mx + 1 == k))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        Occupancy {
            n,
            side,
            blocks,
            complete_at,
        }
    }

    fn key(p: &LatticePoint, s: AxisSet) -> LatticePoint {
        (0..p.n()).fold(*p, |q, a| if s.contains(a) { q } else { q.with(a, 0) })
    }

    /// Whether the prefix `p[..k]` (rest arbitrary) is already blocked by a
    /// subset contained in the first `k` axes.
    fn prefix_blocked(&self, p: &LatticePoint, k: usize) -> bool {
        self.complete_at[k].iter().any(|&i| {
            let (s, set) = &self.blocks[i];
            set.contains(&Self::key(p, *s))
        })
    }

    fn is_free(&self, p: &LatticePoint) -> bool {
        self.blocks.iter().all(|(s, set)| !set.contains(&Self::key(p, *s)))
    }

    fn occupy(&mut self, p: &LatticePoint) {
        for (s, set) in &mut self.blocks {
            let fresh = set.insert(Self::key(p, *s));
            debug_assert!(fresh, "placed point re-occupies a plane");
        }
    }

    /// Lexicographically least free point `>= start` in `[0, side]^n`.
    fn next_free(&self, start: &LatticePoint) -> Option<LatticePoint> {
        self.dfs(LatticePoint::origin(self.n), 0, start, true)
    }

    fn dfs(&self, p: LatticePoint, k: usize, start: &LatticePoint, tight: bool) -> Option<LatticePoint> {
        if k == self.n {
            return Some(p);
        }
        let lo = if tight { start.get(k) } else { 0 };
        for x in lo..=self.side {
            let q = p.with(k, x);
            if self.prefix_blocked(&q, k + 1) {
                continue;
            }
            if let Some(found) = self.dfs(q, k + 1, start, tight && x == lo) {
                return Some(found);
            }
        }
        None
    }
}

/// Places `config.vertex_count` vertices greedily, each at the first free
/// point under `tie_break`.
pub fn greedy_place(config: &PlacementConfig, tie_break: TieBreak) -> Result<VertexPlacement> {
    let (n, m) = (config.n, config.m);
    let side = config.side();
    let mut occ = Occupancy::new(n, m, side);
    let mut coords = Vec::with_capacity(config.vertex_count);
    let mut cursor = LatticePoint::origin(n);
    let mut rng = match tie_break {
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::Lexicographic => None,
    };
    for placed in 0..config.vertex_count {
        let mut chosen = None;
        if let Some(rng) = rng.as_mut() {
            for _ in 0..SEEDED_PROBES {
                let coords: Vec<i32> = (0..n).map(|_| rng.gen_range(0..=side)).collect();
                let q = LatticePoint::new(&coords);
                if occ.is_free(&q) {
                    chosen = Some(q);
                    break;
                }
            }
            if chosen.is_none() {
                chosen = occ.next_free(&LatticePoint::origin(n));
            }
        } else {
            chosen = occ.next_free(&cursor);
        }
        let p = chosen.ok_or(Error::PlacementExhausted { placed })?;
        occ.occupy(&p);
        coords.push(p);
        cursor = p;
    }
    let mut occupied_planes = HashMap::new();
    for (i, p) in coords.iter().enumerate() {
        for h in planes_containing(&Cell::vertex(*p), m, AxisSet::all(n)) {
            occupied_planes.insert(h, i);
        }
    }
    Ok(VertexPlacement {
        n,
        m,
        side_constant: config.side_constant,
        side,
        coords,
        occupied_planes,
    })
}

/// True iff every `m`-plane through a placed point contains no other placed
/// point. Recomputed from scratch, ignoring the placement's own bookkeeping.
pub fn check_placement(placement: &VertexPlacement) -> bool {
    let all = AxisSet::all(placement.n);
    let mut seen: HashSet<MPlane> = HashSet::new();
    placement.coords.iter().all(|p| {
        planes_containing(&Cell::vertex(*p), placement.m, all)
            .into_iter()
            .all(|h| seen.insert(h))
    })
}
