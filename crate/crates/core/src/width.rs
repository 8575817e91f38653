//! Width-aware embedding of graphs.
//!
//! A height function orders the vertices; the graph is cut into chunks of
//! about `W` vertices along generic fibers, each chunk is embedded sparsely in
//! its own cube of a long prism, and the prism is folded into a near-cube by a
//! boustrophedon relocation of whole cubes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::complex::{subdivide_edges, Simplex, SimplicialComplex, Subdivision};
use crate::embedder::{LatticeMap, DEFAULT_RETRY_BUDGET};
use crate::error::{Error, Result};
use crate::extension::{extend_jobs, BoundaryJob, ExtendConfig, ExtensionLog, Frame, LabelOrder};
use crate::lattice::{AxisSet, Cell, Chain, GeomPiece, LatticePoint, MAX_AMBIENT};
use crate::verify::unit_ball_census;

pub type Height = Ratio<i64>;

/// Vertex heights in `[0, 1]`, extended linearly over simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightFunction {
    values: BTreeMap<usize, Height>,
}

#[derive(Serialize, Deserialize)]
struct HeightsJson {
    heights: BTreeMap<String, (i64, i64)>,
}

impl HeightFunction {
    pub fn new(values: BTreeMap<usize, Height>) -> Result<Self> {
        let (zero, one) = (Height::from_integer(0), Height::from_integer(1));
        if let Some((v, _)) = values.iter().find(|(_, h)| **h < zero || **h > one) {
            return Err(Error::Parse(format!("height of vertex {v} outside [0, 1]")));
        }
        Ok(HeightFunction { values })
    }

    /// `h(i) = i / (V - 1)`.
    pub fn natural(vertex_count: usize) -> Self {
        let order: Vec<usize> = (0..vertex_count).collect();
        Self::from_order(&order)
    }

    /// Heights by rank: `order[r]` gets `r / (V - 1)`.
    pub fn from_order(order: &[usize]) -> Self {
        let den = order.len().saturating_sub(1).max(1) as i64;
        HeightFunction {
            values: order
                .iter()
                .enumerate()
                .map(|(r, &v)| (v, Height::new(r as i64, den)))
                .collect(),
        }
    }

    pub fn get(&self, v: usize) -> Result<Height> {
        self.values.get(&v).copied().ok_or(Error::MissingHeight(v))
    }

    pub fn values(&self) -> &BTreeMap<usize, Height> {
        &self.values
    }

    fn check_covers(&self, vertex_count: usize) -> Result<()> {
        match (0..vertex_count).find(|v| !self.values.contains_key(v)) {
            Some(v) => Err(Error::MissingHeight(v)),
            None => Ok(()),
        }
    }

    pub fn is_injective(&self) -> bool {
        let distinct: BTreeSet<&Height> = self.values.values().collect();
        distinct.len() == self.values.len()
    }

    /// Separates tied heights: a tie group of size `g` at `h` is spread over
    /// the first half of the gap to the next distinct height (or the last
    /// half of the gap below, at the top).
    pub fn perturbed(&self) -> Self {
        let mut order: Vec<(Height, usize)> = self.values.iter().map(|(&v, &h)| (h, v)).collect();
        order.sort();
        let distinct: Vec<Height> = order
            .iter()
            .map(|(h, _)| *h)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if distinct.len() == 1 && order.len() > 1 {
            return Self::from_order(&order.iter().map(|(_, v)| *v).collect::<Vec<_>>());
        }
        let mut values = BTreeMap::new();
        for (gi, h) in distinct.iter().enumerate() {
            let group: Vec<usize> = order.iter().filter(|(x, _)| x == h).map(|(_, v)| *v).collect();
            let g = group.len() as i64;
            for (k, v) in group.into_iter().enumerate() {
                let k = k as i64;
                let value = match distinct.get(gi + 1) {
                    Some(next) => *h + (*next - *h) * Height::new(k, 2 * g),
                    None => *h - (*h - distinct[gi - 1]) * Height::new(g - 1 - k, 2 * g),
                };
                values.insert(v, value);
            }
        }
        HeightFunction { values }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(HeightsJson {
            heights: self
                .values
                .iter()
                .map(|(v, h)| (v.to_string(), (*h.numer(), *h.denom())))
                .collect(),
        })
        .expect("heights serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: HeightsJson = serde_json::from_value(v.clone())?;
        let mut values = BTreeMap::new();
        for (k, (num, den)) in j.heights {
            let vertex: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad vertex key {k:?}")))?;
            if den == 0 {
                return Err(Error::Parse(format!("zero denominator for vertex {vertex}")));
            }
            values.insert(vertex, Height::new(num, den));
        }
        Self::new(values)
    }
}

fn require_graph(y: &SimplicialComplex) -> Result<()> {
    if y.dim() > 1 {
        return Err(Error::NotAGraph(y.dim()));
    }
    Ok(())
}

/// Vertices sorted by height.
fn height_order(y: &SimplicialComplex, h: &HeightFunction) -> Result<Vec<(Height, usize)>> {
    h.check_covers(y.vertex_count())?;
    let mut order: Vec<(Height, usize)> = (0..y.vertex_count())
        .map(|v| Ok((h.get(v)?, v)))
        .collect::<Result<_>>()?;
    order.sort();
    if order.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateHeights);
    }
    Ok(order)
}

/// Largest number of simplices over a generic fiber: at each midpoint between
/// consecutive vertex heights, the edges whose height interval covers it.
pub fn measure_width(y: &SimplicialComplex, h: &HeightFunction) -> Result<usize> {
    require_graph(y)?;
    let order = height_order(y, h)?;
    if order.len() < 2 {
        return Ok(0);
    }
    let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(r, &(_, v))| (v, r)).collect();
    // Gap g lies between ranks g and g + 1.
    let mut delta = vec![0i64; order.len()];
    for e in y.simplices_of_dim(1) {
        let (a, b) = (rank[&e.vertices()[0]], rank[&e.vertices()[1]]);
        let (lo, hi) = (a.min(b), a.max(b));
        delta[lo] += 1;
        delta[hi] -= 1;
    }
    let mut running = 0;
    let mut best = 0;
    for dv in &delta[..order.len() - 1] {
        running += dv;
        best = best.max(running);
    }
    Ok(best as usize)
}

/// Cut heights and the vertices of each chunk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkDecomposition {
    /// Interior breakpoints, increasing; chunk `i` is `(cuts[i-1], cuts[i]]`.
    pub cuts: Vec<Height>,
    pub chunks: Vec<Vec<usize>>,
    /// Edges crossing each cut.
    pub fiber_sizes: Vec<usize>,
}

impl ChunkDecomposition {
    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    /// Chunk of a height: the number of cuts strictly below it.
    pub fn chunk_of(&self, h: Height) -> usize {
        self.cuts.partition_point(|c| *c < h)
    }
}

/// Cuts the vertex sequence into runs of `w` at midpoints between heights;
/// a trailing run shorter than `w / 2` joins the previous chunk.
pub fn choose_breakpoints(
    y: &SimplicialComplex,
    h: &HeightFunction,
    w: usize,
) -> Result<ChunkDecomposition> {
    require_graph(y)?;
    if w == 0 {
        return Err(Error::InvalidConfig("chunk size must be positive".into()));
    }
    let order = height_order(y, h)?;
    let mut chunks: Vec<Vec<(Height, usize)>> = order.chunks(w).map(<[_]>::to_vec).collect();
    if chunks.len() > 1 && 2 * chunks.last().map_or(0, Vec::len) < w {
        let tail = chunks.pop().unwrap_or_default();
        chunks.last_mut().expect("at least one chunk").extend(tail);
    }
    let cuts: Vec<Height> = chunks
        .windows(2)
        .map(|pair| {
            let below = pair[0].last().expect("chunks are non-empty").0;
            let above = pair[1][0].0;
            (below + above) / Height::from_integer(2)
        })
        .collect();
    let fiber_sizes = cuts
        .iter()
        .map(|c| {
            y.simplices_of_dim(1)
                .filter(|e| {
                    let (a, b) = (h.values[&e.vertices()[0]], h.values[&e.vertices()[1]]);
                    a.min(b) < *c && *c < a.max(b)
                })
                .count()
        })
        .collect();
    Ok(ChunkDecomposition {
        cuts,
        chunks: chunks
            .into_iter()
            .map(|c| c.into_iter().map(|(_, v)| v).collect())
            .collect(),
        fiber_sizes,
    })
}

/// Subdivides every edge where it crosses a cut. New vertices get the cut
/// height.
pub fn subdivide_at_fibers(
    y: &SimplicialComplex,
    h: &HeightFunction,
    dec: &ChunkDecomposition,
) -> Result<(Subdivision, HeightFunction)> {
    require_graph(y)?;
    let mut cuts = BTreeMap::new();
    for e in y.simplices_of_dim(1) {
        let (a, b) = (h.get(e.vertices()[0])?, h.get(e.vertices()[1])?);
        let fracs: Vec<Height> = dec
            .cuts
            .iter()
            .filter(|c| a.min(b) < **c && **c < a.max(b))
            .map(|c| (*c - a) / (b - a))
            .collect();
        if !fracs.is_empty() {
            cuts.insert(e.clone(), fracs);
        }
    }
    let sub = subdivide_edges(y, &cuts)?;
    let mut values = h.values.clone();
    for (&v, (edge, t)) in &sub.provenance {
        let (a, b) = (h.get(edge.vertices()[0])?, h.get(edge.vertices()[1])?);
        values.insert(v, a + (b - a) * *t);
    }
    Ok((sub, HeightFunction { values }))
}

/// A row of `count` cubes of side `side` along axis 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeLayout {
    pub n: usize,
    pub side: i32,
    pub count: usize,
}

impl CubeLayout {
    pub fn origin(&self, i: usize) -> LatticePoint {
        LatticePoint::origin(self.n).with(0, i as i32 * self.side)
    }

    /// Whether the cell lies in the closed union of cubes `lo..=hi`.
    pub fn cell_within(&self, c: &Cell, lo: usize, hi: usize) -> bool {
        let b = c.bbox();
        let (Some(l), Some(h)) = (b.lo, b.hi) else {
            return true;
        };
        l[0] >= lo as i32 * self.side
            && h[0] <= (hi as i32 + 1) * self.side
            && (1..self.n).all(|a| l[a] >= 0 && h[a] <= self.side)
    }

    /// Vertex slots of cube `i`'s bottom face: axis 0 in `[is, is+s)`,
    /// middle axes in `[0, s)`, last axis 0.
    pub fn face_capacity(&self) -> usize {
        (self.side as usize).pow((self.n - 1) as u32)
    }
}

/// Places `count` points injectively in cube `i`'s bottom face, each at the
/// lexicographically first slot minimizing how many placed points already
/// share an axis line with it.
fn place_in_face(layout: &CubeLayout, i: usize, count: usize) -> Result<Vec<LatticePoint>> {
    let capacity = layout.face_capacity();
    if count > capacity {
        return Err(Error::ChunkTooLarge { size: count, capacity });
    }
    let n = layout.n;
    let s = layout.side;
    let face = n - 1;
    let mut slots = vec![layout.origin(i)];
    for a in 0..face {
        slots = slots
            .into_iter()
            .flat_map(|p| (0..s).map(move |x| p.offset(a, x)))
            .collect();
    }
    let line_key = |p: &LatticePoint, a: usize| (a, p.with(a, 0));
    let mut lines: HashMap<(usize, LatticePoint), usize> = HashMap::new();
    let mut used = vec![false; slots.len()];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (best, _) = slots
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, p)| {
                let score: usize = (0..face).map(|a| lines.get(&line_key(p, a)).copied().unwrap_or(0)).sum();
                (k, score)
            })
            .min_by_key(|&(k, score)| (score, k))
            .expect("capacity checked");
        used[best] = true;
        let p = slots[best];
        for a in 0..face {
            *lines.entry(line_key(&p, a)).or_default() += 1;
        }
        out.push(p);
    }
    Ok(out)
}

/// The chunked map of the subdivided graph into the cube row.
#[derive(Clone, Debug)]
pub struct ChunkEmbedding {
    pub map: LatticeMap,
    pub layout: CubeLayout,
    /// Chunk index of every vertex and edge of the subdivided graph.
    pub chunk_of: BTreeMap<Simplex, usize>,
    pub log: ExtensionLog,
}

impl ChunkEmbedding {
    /// Every edge image lies in its own cube or the one before.
    pub fn locality_ok(&self) -> bool {
        self.map.images.iter().all(|(s, pieces)| {
            let i = self.chunk_of[s];
            let lo = i.saturating_sub(1);
            pieces
                .iter()
                .flat_map(|p| p.cells().unwrap_or_default())
                .all(|c| self.layout.cell_within(&c, lo, i))
        })
    }
}

/// Embeds the subdivided graph chunk by chunk into cubes of side `side`.
pub fn embed_chunks(
    ysub: &SimplicialComplex,
    heights: &HeightFunction,
    dec: &ChunkDecomposition,
    n: usize,
    side: i32,
) -> Result<ChunkEmbedding> {
    require_graph(ysub)?;
    if !(2..=MAX_AMBIENT).contains(&n) {
        return Err(Error::UnsatisfiableParameters { d: 1, m: 1, n });
    }
    let layout = CubeLayout {
        n,
        side,
        count: dec.len().max(1),
    };
    let mut chunk_of = BTreeMap::new();
    let mut members: Vec<Vec<(Height, usize)>> = vec![Vec::new(); layout.count];
    for v in 0..ysub.vertex_count() {
        let h = heights.get(v)?;
        let i = dec.chunk_of(h);
        chunk_of.insert(Simplex::vertex(v), i);
        members[i].push((h, v));
    }
    let mut point = vec![LatticePoint::origin(n); ysub.vertex_count()];
    for (i, vs) in members.iter_mut().enumerate() {
        vs.sort();
        for (p, &(_, v)) in place_in_face(&layout, i, vs.len())?.into_iter().zip(vs.iter()) {
            point[v] = p;
        }
    }
    let edges: Vec<Simplex> = ysub.simplices_of_dim(1).cloned().collect();
    let mut jobs: Vec<Vec<BoundaryJob>> = vec![Vec::new(); layout.count];
    for (id, e) in edges.iter().enumerate() {
        let (a, b) = (e.vertices()[0], e.vertices()[1]);
        let top = if heights.get(a)? > heights.get(b)? { a } else { b };
        let i = chunk_of[&Simplex::vertex(top)];
        chunk_of.insert(e.clone(), i);
        let chain = Chain::from_cells([Cell::vertex(point[a]), Cell::vertex(point[b])]);
        jobs[i].push(BoundaryJob::from_chain(id, chain));
    }
    let cfg = ExtendConfig {
        label_range: side as u32,
        base_limit: 1,
        order: LabelOrder::Input,
    };
    let mut log = ExtensionLog::default();
    let mut images = BTreeMap::new();
    for (v, p) in point.iter().enumerate() {
        images.insert(Simplex::vertex(v), vec![GeomPiece::point(*p)]);
    }
    for (i, chunk_jobs) in jobs.iter().enumerate() {
        let frame = Frame::new((0..n).collect(), layout.origin(i))?;
        let fillings = extend_jobs(chunk_jobs, &frame, 1, 1, &cfg, &mut log)?;
        for (id, f) in fillings {
            images.insert(edges[id].clone(), f.pieces());
        }
    }
    Ok(ChunkEmbedding {
        map: LatticeMap::from_images(ysub.clone(), n, 1, images),
        layout,
        chunk_of,
        log,
    })
}

/// Boustrophedon relocation of a cube row into a grid of cube slots.
///
/// Slot pitch is `s` along axis 0 and `s + 1` along the others. Cubes on a
/// backward pass are mirrored in axis 0 so consecutive cubes stay glued
/// within a pass; at a turn the next cube starts one slot over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakeMap {
    pub layout: CubeLayout,
    pub grid: Vec<usize>,
    /// Per cube: slot coordinates and whether it runs backward.
    pub slots: Vec<(Vec<usize>, bool)>,
}

/// Builds the snake for a cube row.
pub fn snake(layout: &CubeLayout) -> SnakeMap {
    let n = layout.n;
    let count = layout.count.max(1);
    let mut g = 1usize;
    while g.pow(n as u32) < count {
        g += 1;
    }
    let mut grid = vec![g; n];
    // Trim trailing axes while the grid still holds every cube.
    for a in (0..n).rev() {
        while grid[a] > 1 && grid.iter().product::<usize>() / grid[a] * (grid[a] - 1) >= count {
            grid[a] -= 1;
        }
    }
    let slots = (0..count)
        .map(|i| {
            let mut digits = Vec::with_capacity(n);
            let mut rest = i;
            for &ga in &grid {
                digits.push(rest % ga);
                rest /= ga;
            }
            let mut pos = digits.clone();
            let mut higher = 0;
            let mut backward = false;
            for a in (0..n).rev() {
                if higher % 2 == 1 {
                    pos[a] = grid[a] - 1 - digits[a];
                    if a == 0 {
                        backward = true;
                    }
                }
                higher += pos[a];
            }
            (pos, backward)
        })
        .collect();
    SnakeMap {
        layout: *layout,
        grid,
        slots,
    }
}

impl SnakeMap {
    fn slot_origin(&self, i: usize) -> Vec<i64> {
        let s = i64::from(self.layout.side);
        self.slots[i]
            .0
            .iter()
            .enumerate()
            .map(|(a, &c)| c as i64 * if a == 0 { s } else { s + 1 })
            .collect()
    }

    /// Cube owning axis-0 coordinate `x` (in units of `1/scale`).
    fn owner(&self, x: i64, scale: i64) -> usize {
        let s = i64::from(self.layout.side) * scale;
        (x.div_euclid(s).max(0) as usize).min(self.slots.len() - 1)
    }

    /// Relocates a point given in units of `1/scale`.
    fn relocate_scaled(&self, x: &[i64], scale: i64, owner: usize) -> Vec<i64> {
        let s = i64::from(self.layout.side) * scale;
        let origin = self.slot_origin(owner);
        let local = x[0] - owner as i64 * s;
        let mut out: Vec<i64> = x.iter().enumerate().map(|(a, &v)| v + origin[a] * scale).collect();
        out[0] = origin[0] * scale + if self.slots[owner].1 { s - local } else { local };
        out
    }

    pub fn relocate_point(&self, p: &LatticePoint) -> LatticePoint {
        let x: Vec<i64> = p.coords().iter().map(|&c| i64::from(c)).collect();
        let owner = self.owner(x[0], 1);
        let y = self.relocate_scaled(&x, 1, owner);
        LatticePoint::new(&y.iter().map(|&v| v as i32).collect::<Vec<_>>())
    }

    /// Relocates a cell by the cube owning its anchor; a backward cube flips
    /// cells spanning axis 0 around their own extent.
    pub fn relocate_cell(&self, c: &Cell) -> Cell {
        let moved = self.relocate_point(&c.anchor());
        let owner = self.owner(i64::from(c.anchor().get(0)), 1);
        let anchor = if c.axes().contains(0) && self.slots[owner].1 {
            moved.offset(0, -1)
        } else {
            moved
        };
        Cell::new(anchor, c.axes())
    }

    /// Image of the whole prism as `[lo, hi]` per axis.
    pub fn target_side(&self) -> i64 {
        let s = i64::from(self.layout.side);
        self.grid
            .iter()
            .enumerate()
            .map(|(a, &g)| if a == 0 { g as i64 * s } else { g as i64 * (s + 1) - 1 })
            .max()
            .unwrap_or(0)
    }

    fn distance(&self, p: &[i64], q: &[i64], scale: i64) -> f64 {
        let sp = self.relocate_scaled(p, scale, self.owner(p[0], scale));
        let sq = self.relocate_scaled(q, scale, self.owner(q[0], scale));
        let d2: i64 = sp.iter().zip(&sq).map(|(a, b)| (a - b) * (a - b)).sum();
        (d2 as f64).sqrt() / scale as f64
    }

    /// Unit-ball neighbourhood offsets on the half grid.
    fn offsets(n: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    (-2..=2).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out.retain(|v| {
            let d2: i64 = v.iter().map(|x| x * x).sum();
            d2 > 0 && d2 <= 4
        });
        out
    }

    fn half_grid(&self, x0: std::ops::RangeInclusive<i64>) -> Vec<Vec<i64>> {
        let s2 = 2 * i64::from(self.layout.side);
        let mut pts: Vec<Vec<i64>> = x0.map(|x| vec![x]).collect();
        for _ in 1..self.layout.n {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    (0..=s2).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        pts
    }

    fn max_stretch(&self, points: &[Vec<i64>]) -> f64 {
        let s2 = 2 * i64::from(self.layout.side);
        let len = s2 * self.slots.len() as i64;
        let offsets = Self::offsets(self.layout.n);
        let mut worst: f64 = 0.0;
        for p in points {
            for o in &offsets {
                let q: Vec<i64> = p.iter().zip(o).map(|(a, b)| a + b).collect();
                let inside = q[0] >= 0 && q[0] <= len && q[1..].iter().all(|&x| (0..=s2).contains(&x));
                if inside {
                    worst = worst.max(self.distance(p, &q, 2));
                }
            }
        }
        worst
    }

    /// Largest `|S(p) - S(q)|` over half-grid pairs at distance at most 1. The map is an isometry inside each cube, so only
    /// pairs near cube interfaces are sampled.
    pub fn distortion(&self) -> f64 {
        let s2 = 2 * i64::from(self.layout.side);
        let mut points = Vec::new();
        for i in 1..self.slots.len() as i64 {
            points.extend(self.half_grid(i * s2 - 2..=i * s2 + 2));
        }
        self.max_stretch(&points).max(1.0)
    }

    /// Same as [`distortion`](Self::distortion) but over every half-grid point.
    pub fn distortion_exhaustive(&self) -> f64 {
        let len = 2 * i64::from(self.layout.side) * self.slots.len() as i64;
        self.max_stretch(&self.half_grid(0..=len)).max(1.0)
    }

    /// All `n`-cells of the prism.
    pub fn prism_cells(&self) -> Vec<Cell> {
        let s = self.layout.side;
        let n = self.layout.n;
        let len = s * self.slots.len() as i32;
        let mut pts = vec![LatticePoint::origin(n)];
        for a in 0..n {
            let hi = if a == 0 { len } else { s };
            pts = pts
                .into_iter()
                .flat_map(|p| (0..hi).map(move |x| p.with(a, x)))
                .collect();
        }
        pts.into_iter().map(|p| Cell::new(p, AxisSet::all(n))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WidthConfig {
    /// Initial cube constant `c`: side `ceil(c * chunk^(1/(n-1)))`. Each
    /// exhausted label range grows the side by a quarter.
    pub side_constant: u32,
    pub retry_budget: u32,
}

impl Default for WidthConfig {
    fn default() -> Self {
        WidthConfig {
            side_constant: 2,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub measured_width: usize,
    pub perturbed: bool,
    pub chunks: usize,
    pub chunk_sizes: Vec<usize>,
    pub fiber_sizes: Vec<usize>,
    pub subdivided_vertices: usize,
    pub blowup: f64,
    pub cube_side: i32,
    pub retries: u32,
    pub max_label: u32,
    pub chunk_locality_ok: bool,
    pub snake_grid: Vec<usize>,
    pub snake_distortion: f64,
    pub final_side: i64,
    pub unit_ball_census: usize,
}

#[derive(Clone, Debug)]
pub struct WidthEmbedding {
    /// The final map of the original graph.
    pub map: LatticeMap,
    /// The map of the subdivided graph into the cube row.
    pub prism: ChunkEmbedding,
    pub snake: SnakeMap,
    pub report: WidthReport,
}

pub fn width_embed(y: &SimplicialComplex, h: &HeightFunction, n: usize) -> Result<WidthEmbedding> {
    width_embed_with(y, h, n, &WidthConfig::default())
}

pub fn width_embed_with(
    y: &SimplicialComplex,
    h: &HeightFunction,
    n: usize,
    config: &WidthConfig,
) -> Result<WidthEmbedding> {
    require_graph(y)?;
    if !(2..=MAX_AMBIENT).contains(&n) {
        return Err(Error::UnsatisfiableParameters { d: y.dim(), m: 1, n });
    }
    h.check_covers(y.vertex_count())?;
    let perturbed = !h.is_injective();
    let h = if perturbed { h.perturbed() } else { h.clone() };
    let width = measure_width(y, &h)?;
    let dec = choose_breakpoints(y, &h, width.max(1))?;
    let (sub, heights) = subdivide_at_fibers(y, &h, &dec)?;

    let mut per_chunk = vec![0usize; dec.len().max(1)];
    for v in 0..sub.complex.vertex_count() {
        per_chunk[dec.chunk_of(heights.get(v)?)] += 1;
    }
    let largest = per_chunk.iter().copied().max().unwrap_or(1).max(1);
    let c = u64::from(config.side_constant.max(1));
    let mut side = (crate::placement::scaled_root(c, largest as u64, (n - 1) as u32) as i32).max(1);
    let mut retries = 0;
    let prism = loop {
        match embed_chunks(&sub.complex, &heights, &dec, n, side) {
            Ok(p) => break p,
            Err(Error::LabelRangeExhausted { .. }) => {
                if retries >= config.retry_budget {
                    return Err(Error::RetryBudgetExhausted { attempts: retries + 1 });
                }
                retries += 1;
                side += (side / 4).max(1);
            }
            Err(e) => return Err(e),
        }
    };
    let snake_map = snake(&prism.layout);

    let mut images = BTreeMap::new();
    for v in 0..y.vertex_count() {
        let p = prism.map.vertex_image(v).expect("every vertex is placed");
        images.insert(Simplex::vertex(v), vec![GeomPiece::point(snake_map.relocate_point(&p))]);
    }
    for e in y.simplices_of_dim(1) {
        let parts = sub.edge_chains.get(e).cloned().unwrap_or_else(|| vec![e.clone()]);
        let cells: BTreeSet<Cell> = parts
            .iter()
            .flat_map(|p| prism.map.images[p].iter())
            .flat_map(|piece| piece.cells().unwrap_or_default())
            .filter(|c| c.dim() == 1)
            .map(|c| snake_map.relocate_cell(&c))
            .collect();
        images.insert(e.clone(), vec![GeomPiece::from_cells(cells.into_iter().collect())]);
    }
    let map = LatticeMap::from_images(y.clone(), n, 1, images);
    let report = WidthReport {
        measured_width: width,
        perturbed,
        chunks: dec.len(),
        chunk_sizes: dec.chunks.iter().map(Vec::len).collect(),
        fiber_sizes: dec.fiber_sizes.clone(),
        subdivided_vertices: sub.complex.vertex_count(),
        blowup: sub.blowup(y.vertex_count()),
        cube_side: prism.layout.side,
        retries,
        max_label: prism.log.max_label,
        chunk_locality_ok: prism.locality_ok(),
        snake_grid: snake_map.grid.clone(),
        snake_distortion: snake_map.distortion(),
        final_side: map.side(),
        unit_ball_census: unit_ball_census(&map),
    };
    Ok(WidthEmbedding {
        map,
        prism,
        snake: snake_map,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(v: usize) -> SimplicialComplex {
        let edges: Vec<Vec<usize>> = (0..v - 1).map(|i| vec![i, i + 1]).collect();
        SimplicialComplex::build(&edges).unwrap()
    }

    fn heights(vals: &[(usize, i64, i64)]) -> HeightFunction {
        HeightFunction::new(vals.iter().map(|&(v, a, b)| (v, Height::new(a, b))).collect()).unwrap()
    }

    #[test]
    fn width_examples() {
        let h = heights(&[(0, 0, 1), (1, 1, 2), (2, 1, 1)]);
        assert_eq!(measure_width(&path(3), &h), Ok(1));

        let star = SimplicialComplex::build(&[vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        let h = heights(&[(0, 0, 1), (1, 1, 1), (2, 99, 100), (3, 98, 100)]);
        assert_eq!(measure_width(&star, &h), Ok(3));

        let single = SimplicialComplex::build(&[vec![0]]).unwrap();
        assert_eq!(measure_width(&single, &HeightFunction::natural(1)), Ok(0));
    }

    #[test]
    fn breakpoint_examples() {
        let d = choose_breakpoints(&path(10), &HeightFunction::natural(10), 5).unwrap();
        assert_eq!(d.chunks.iter().map(Vec::len).collect::<Vec<_>>(), vec![5, 5]);
        let d = choose_breakpoints(&path(10), &HeightFunction::natural(10), 10).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.cuts.is_empty());
        let d = choose_breakpoints(&path(11), &HeightFunction::natural(11), 5).unwrap();
        assert_eq!(d.chunks.iter().map(Vec::len).collect::<Vec<_>>(), vec![5, 6]);
        assert_eq!(d.fiber_sizes, vec![1]);
    }

    #[test]
    fn degenerate_heights_rejected() {
        let h = heights(&[(0, 0, 1), (1, 0, 1), (2, 1, 1)]);
        assert_eq!(choose_breakpoints(&path(3), &h, 1), Err(Error::DegenerateHeights));
        assert!(h.perturbed().is_injective());
    }

    #[test]
    fn snake_examples() {
        let one = snake(&CubeLayout { n: 3, side: 2, count: 1 });
        let c = Cell::new(LatticePoint::new(&[1, 0, 1]), AxisSet::from_axes(&[0, 2]));
        assert_eq!(one.relocate_cell(&c), c);

        let strip = snake(&CubeLayout { n: 2, side: 1, count: 4 });
        assert_eq!(strip.grid, vec![2, 2]);
        assert!(strip.distortion_exhaustive() <= 3.0);
        assert_eq!(strip.distortion(), strip.distortion_exhaustive());
        let cells = strip.prism_cells();
        assert_eq!(cells.len(), 4);
        let moved: BTreeSet<Cell> = cells.iter().map(|c| strip.relocate_cell(c)).collect();
        assert_eq!(moved.len(), 4);
    }

    #[test]
    fn consecutive_cubes_in_adjacent_slots() {
        let sn = snake(&CubeLayout { n: 3, side: 2, count: 20 });
        for w in sn.slots.windows(2) {
            let diff: usize = w[0].0.iter().zip(&w[1].0).map(|(a, b)| a.abs_diff(*b)).sum();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn path_pipeline() {
        let y = path(20);
        let out = width_embed(&y, &HeightFunction::natural(20), 3).unwrap();
        assert_eq!(out.report.measured_width, 1);
        assert!(out.report.chunk_locality_ok);
        let cert = crate::verify::verify(&out.map);
        assert!(cert.skeletal_ok);
        let pcert = crate::verify::verify(&out.prism.map);
        assert!(pcert.skeletal_ok);
    }

    #[test]
    fn heights_json_roundtrip() {
        let h = heights(&[(0, 0, 1), (1, 1, 3), (2, 1, 1)]);
        assert_eq!(HeightFunction::from_json(&h.to_json()).unwrap(), h);
        let bad = serde_json::json!({"heights": {"0": [1, 0]}});
        assert!(HeightFunction::from_json(&bad).is_err());
    }
}
