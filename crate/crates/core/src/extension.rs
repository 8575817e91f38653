//! Extending a sparse map of the `(d-1)`-skeleton over the `d`-simplices.
//!
//! Each `d`-simplex is filled recursively. At a level with `k` active axes and
//! target sparsity `m < k`, simplices get greedy labels; a simplex with label
//! `j` is swept up the last active axis to height `j`, then along the
//! second-to-last axis back to the origin, and the projected boundary is
//! handed to the level below inside the hyperplane at height `j`. When
//! `k == m` the boundary is swept to the origin axis by axis and coned off.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::lattice::{
    planes_containing, AxisSet, Cell, Chain, GeomPiece, LatticePoint, MPlane,
};

/// The active coordinate subspace of a recursion level.
///
/// Inactive axes are pinned to the matching coordinate of `origin`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub axes: Vec<usize>,
    pub origin: LatticePoint,
}

impl Frame {
    pub fn new(axes: Vec<usize>, origin: LatticePoint) -> Result<Self> {
        if let Some(&a) = axes.iter().find(|&&a| a >= origin.n()) {
            return Err(Error::AxisOutOfRange { axis: a, n: origin.n() });
        }
        Ok(Frame { axes, origin })
    }

    /// The first `k` axes of `Z^n`, anchored at the origin.
    pub fn leading(n: usize, k: usize) -> Self {
        Frame {
            axes: (0..k).collect(),
            origin: LatticePoint::origin(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn allowed(&self) -> AxisSet {
        AxisSet::from_axes(&self.axes)
    }

    pub fn label_axis(&self) -> usize {
        self.axes[self.axes.len() - 1]
    }

    pub fn projection_axis(&self) -> usize {
        self.axes[self.axes.len() - 2]
    }

    /// The frame one level down, inside the hyperplane at height `j`.
    pub fn descend(&self, j: u32) -> Frame {
        let a = self.label_axis();
        Frame {
            axes: self.axes[..self.axes.len() - 1].to_vec(),
            origin: self.origin.with(a, self.origin.get(a) + j as i32),
        }
    }

    /// Checks that a boundary cell lies in the bottom hyperplane of the frame.
    fn check_cell(&self, c: &Cell) -> Result<()> {
        let inside = self.allowed().without(self.label_axis());
        for a in 0..self.origin.n() {
            let pinned = !inside.contains(a);
            if pinned && (c.axes().contains(a) || c.anchor().get(a) != self.origin.get(a)) {
                return Err(Error::PieceNotInHyperplane {
                    axis: a,
                    value: self.origin.get(a),
                });
            }
        }
        Ok(())
    }
}

/// The boundary image of one simplex awaiting a filling.
///
/// `support` is the set of top-dimensional cells of the face images (used for
/// plane tests and the geometric image); `chain` is their mod-2 sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryJob {
    pub id: usize,
    pub support: BTreeSet<Cell>,
    pub chain: Chain,
}

impl BoundaryJob {
    pub fn new(id: usize, support: BTreeSet<Cell>, chain: Chain) -> Self {
        BoundaryJob { id, support, chain }
    }

    /// A job whose support equals its chain.
    pub fn from_chain(id: usize, chain: Chain) -> Self {
        BoundaryJob {
            id,
            support: chain.cells().clone(),
            chain,
        }
    }

    fn planes(&self, m: usize, allowed: AxisSet) -> BTreeSet<MPlane> {
        self.support
            .iter()
            .flat_map(|c| planes_containing(c, m, allowed))
            .collect()
    }
}

/// The filling of one simplex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Filling {
    /// Union of the top-dimensional cells swept by the filling.
    pub cells: BTreeSet<Cell>,
    /// Mod-2 filling chain; its boundary is the job's chain.
    pub chain: Chain,
    pub cones: Vec<GeomPiece>,
}

impl Filling {
    fn absorb(&mut self, other: Filling) {
        self.cells.extend(other.cells);
        self.chain.add(&other.chain);
        self.cones.extend(other.cones);
    }

    /// Sweeps a support set and chain along `axis` to `target`.
    fn sweep(&mut self, support: &BTreeSet<Cell>, chain: &Chain, axis: usize, target: i32) {
        self.cells
            .extend(support.iter().flat_map(|c| c.sweep(axis, target)));
        self.chain.add(&chain.sweep(axis, target));
    }

    pub fn pieces(&self) -> Vec<GeomPiece> {
        let mut out = Vec::new();
        if !self.cells.is_empty() {
            out.push(GeomPiece::from_cells(self.cells.iter().copied().collect()));
        }
        out.extend(self.cones.iter().cloned());
        out
    }
}

fn project_support(support: &BTreeSet<Cell>, axis: usize, value: i32) -> BTreeSet<Cell> {
    support
        .iter()
        .filter(|c| !c.axes().contains(axis))
        .map(|c| c.project(axis, value))
        .collect()
}

/// Fills boundaries in a frame with as many active axes as the target
/// sparsity: sweep to the origin along the first `k - d + 1` active axes, then
/// cone off what remains.
///
/// At most `limit` jobs may have non-empty support.
pub fn fill_base_case(
    jobs: &[BoundaryJob],
    frame: &Frame,
    d: usize,
    limit: usize,
) -> Result<BTreeMap<usize, Filling>> {
    let k = frame.dim();
    if d == 0 || d > k {
        return Err(Error::InvalidConfig(format!(
            "base case needs 1 <= d <= {k}, got d={d}"
        )));
    }
    let found = jobs.iter().filter(|j| !j.support.is_empty()).count();
    if found > limit {
        return Err(Error::SizePreconditionViolated { found, limit });
    }
    let mut out = BTreeMap::new();
    for job in jobs {
        let mut filling = Filling::default();
        let mut support = job.support.clone();
        let mut chain = job.chain.clone();
        for &axis in &frame.axes[..k - d + 1] {
            let target = frame.origin.get(axis);
            filling.sweep(&support, &chain, axis, target);
            support = project_support(&support, axis, target);
            chain = chain.project(axis, target);
        }
        if d >= 2 && !support.is_empty() {
            let apex = support
                .iter()
                .flat_map(Cell::corners)
                .min()
                .expect("non-empty support has corners");
            let base = GeomPiece::from_cells(support.into_iter().collect());
            filling.cones.push(GeomPiece::Cone {
                base: Box::new(base),
                apex,
            });
        }
        out.insert(job.id, filling);
    }
    Ok(out)
}

/// Order in which the labeling greedy visits simplices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelOrder {
    #[default]
    Input,
    Shuffled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub labels: BTreeMap<usize, u32>,
    pub range: u32,
}

impl Labeling {
    pub fn max_label(&self) -> u32 {
        self.labels.values().copied().max().unwrap_or(0)
    }

    pub fn class(&self, j: u32) -> Vec<usize> {
        self.labels
            .iter()
            .filter(|&(_, &l)| l == j)
            .map(|(&id, _)| id)
            .collect()
    }
}

/// Greedy labeling: each simplex takes the least label in `1..=range` not
/// used by an earlier simplex whose boundary shares an `m`-plane with its own
/// in a full `(d-1)`-cell.
pub fn label_simplices(
    jobs: &[BoundaryJob],
    frame: &Frame,
    m: usize,
    range: u32,
    order: LabelOrder,
) -> Result<Labeling> {
    let allowed = frame.allowed();
    let mut visit: Vec<&BoundaryJob> = jobs.iter().collect();
    if let LabelOrder::Shuffled(seed) = order {
        visit.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut used: HashMap<MPlane, Vec<u32>> = HashMap::new();
    let mut labels = BTreeMap::new();
    for job in visit {
        let planes = job.planes(m, allowed);
        let bad: BTreeSet<u32> = planes
            .iter()
            .filter_map(|h| used.get(h))
            .flatten()
            .copied()
            .collect();
        let label = (1..=range)
            .find(|j| !bad.contains(j))
            .ok_or(Error::LabelRangeExhausted {
                range,
                simplex: job.id,
            })?;
        for h in planes {
            used.entry(h).or_default().push(label);
        }
        labels.insert(job.id, label);
    }
    Ok(Labeling { labels, range })
}

/// One label class routed through its hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelClass {
    pub label: u32,
    /// Frame of the level below, inside the hyperplane at height `label`.
    pub frame: Frame,
    /// Projected boundaries, one per simplex of the class.
    pub jobs: Vec<BoundaryJob>,
    /// The two prisms of each simplex: up to the label height, then over to
    /// the projection hyperplane.
    pub prisms: BTreeMap<usize, Filling>,
    /// Boundary dimension `d - 1` of the class.
    pub boundary_dim: usize,
}

impl LabelClass {
    /// The domain as a disjoint union of simplex boundaries: shared faces are
    /// duplicated.
    pub fn domain(&self) -> SimplicialComplex {
        let verts = self.boundary_dim + 2;
        if self.jobs.is_empty() {
            return SimplicialComplex::empty();
        }
        let simplices: Vec<Vec<usize>> = (0..self.jobs.len())
            .flat_map(|i| {
                (0..verts).map(move |skip| {
                    (0..verts)
                        .filter(|&v| v != skip)
                        .map(|v| i * verts + v)
                        .collect()
                })
            })
            .collect();
        SimplicialComplex::build_with_vertex_count(&simplices, Some(self.jobs.len() * verts))
            .expect("disjoint boundaries form a complex")
    }

    pub fn domain_vertex_count(&self) -> usize {
        self.jobs.len() * (self.boundary_dim + 2)
    }
}

/// Builds class `j`: the prisms of its simplices and their boundaries
/// translated to height `j` and projected along the projection axis.
///
/// Fails with `SparsityViolated` if two projected boundaries share an
/// `(m-1)`-plane of the level below in a full `(d-1)`-cell.
pub fn build_label_class(
    jobs: &[BoundaryJob],
    frame: &Frame,
    labeling: &Labeling,
    j: u32,
    m: usize,
    d: usize,
) -> Result<LabelClass> {
    let a = frame.label_axis();
    let b = frame.projection_axis();
    let height = frame.origin.get(a) + j as i32;
    let floor = frame.origin.get(b);
    let sub = frame.descend(j);
    let mut class_jobs = Vec::new();
    let mut prisms = BTreeMap::new();
    for job in jobs.iter().filter(|job| labeling.labels.get(&job.id) == Some(&j)) {
        let mut filling = Filling::default();
        filling.sweep(&job.support, &job.chain, a, height);
        let support = project_support(&job.support, a, height);
        let chain = job.chain.project(a, height);
        filling.sweep(&support, &chain, b, floor);
        class_jobs.push(BoundaryJob::new(
            job.id,
            project_support(&support, b, floor),
            chain.project(b, floor),
        ));
        prisms.insert(job.id, filling);
    }
    if m >= 1 {
        let mut owner: HashMap<MPlane, usize> = HashMap::new();
        for job in &class_jobs {
            for h in job.planes(m - 1, sub.allowed()) {
                if *owner.entry(h).or_insert(job.id) != job.id {
                    return Err(Error::SparsityViolated { label: j });
                }
            }
        }
    }
    Ok(LabelClass {
        label: j,
        frame: sub,
        jobs: class_jobs,
        prisms,
        boundary_dim: d.saturating_sub(1),
    })
}

/// Settings shared by every recursion level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendConfig {
    pub label_range: u32,
    /// Most simplices with non-empty boundary allowed in one base case.
    pub base_limit: usize,
    pub order: LabelOrder,
}

impl ExtendConfig {
    pub fn new(label_range: u32) -> Self {
        ExtendConfig {
            label_range,
            base_limit: 1,
            order: LabelOrder::Input,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    /// Active axes of the level that produced the class.
    pub level: usize,
    pub label: u32,
    pub simplices: usize,
    pub domain_vertices: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionLog {
    pub classes: Vec<ClassRecord>,
    pub max_label: u32,
    pub base_cases: usize,
}

impl ExtensionLog {
    pub fn max_class_vertices(&self, level: usize) -> usize {
        self.classes
            .iter()
            .filter(|c| c.level == level)
            .map(|c| c.domain_vertices)
            .max()
            .unwrap_or(0)
    }

    pub fn merge(&mut self, other: ExtensionLog) {
        self.classes.extend(other.classes);
        self.max_label = self.max_label.max(other.max_label);
        self.base_cases += other.base_cases;
    }
}

/// Fills every job in `frame`, producing `m`-sparse fillings of dimension `d`.
pub fn extend_jobs(
    jobs: &[BoundaryJob],
    frame: &Frame,
    d: usize,
    m: usize,
    config: &ExtendConfig,
    log: &mut ExtensionLog,
) -> Result<BTreeMap<usize, Filling>> {
    let k = frame.dim();
    if k == m {
        log.base_cases += 1;
        return fill_base_case(jobs, frame, d, config.base_limit);
    }
    if k < m || k < 2 {
        return Err(Error::RecursionBaseMissing);
    }
    for c in jobs.iter().flat_map(|j| &j.support) {
        frame.check_cell(c)?;
    }
    let labeling = label_simplices(jobs, frame, m, config.label_range, config.order)?;
    log.max_label = log.max_label.max(labeling.max_label());
    let used: BTreeSet<u32> = labeling.labels.values().copied().collect();
    let mut out = BTreeMap::new();
    for j in used {
        let class = build_label_class(jobs, frame, &labeling, j, m, d)?;
        log.classes.push(ClassRecord {
            level: k,
            label: j,
            simplices: class.jobs.len(),
            domain_vertices: class.domain_vertex_count(),
        });
        let mut inner = extend_jobs(&class.jobs, &class.frame, d, m, config, log)?;
        for (id, mut filling) in class.prisms {
            if let Some(rest) = inner.remove(&id) {
                filling.absorb(rest);
            }
            out.insert(id, filling);
        }
    }
    Ok(out)
}

/// Image of one simplex under a skeleton map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplexImage {
    /// Top-dimensional cells of the image.
    pub cells: BTreeSet<Cell>,
    pub cones: Vec<GeomPiece>,
    /// Mod-2 chain whose boundary is the image chain of the simplex boundary.
    pub chain: Chain,
}

impl SimplexImage {
    pub fn vertex(p: LatticePoint) -> Self {
        let cell = Cell::vertex(p);
        SimplexImage {
            cells: [cell].into_iter().collect(),
            cones: Vec::new(),
            chain: Chain::from_cells([cell]),
        }
    }

    pub fn pieces(&self) -> Vec<GeomPiece> {
        Filling {
            cells: self.cells.clone(),
            chain: Chain::new(),
            cones: self.cones.clone(),
        }
        .pieces()
    }
}

impl From<Filling> for SimplexImage {
    fn from(f: Filling) -> Self {
        SimplexImage {
            cells: f.cells,
            cones: f.cones,
            chain: f.chain,
        }
    }
}

/// A map of a skeleton into `Z^n` with declared sparsity `m`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SkeletonMap {
    pub n: usize,
    pub m: usize,
    pub images: BTreeMap<Simplex, SimplexImage>,
}

impl SkeletonMap {
    /// The map on vertices given by `coords[v]`.
    pub fn from_vertices(n: usize, m: usize, coords: &[LatticePoint]) -> Self {
        SkeletonMap {
            n,
            m,
            images: coords
                .iter()
                .enumerate()
                .map(|(v, p)| (Simplex::vertex(v), SimplexImage::vertex(*p)))
                .collect(),
        }
    }

    /// Restriction to simplices of dimension at most `k`.
    pub fn restrict(&self, k: usize) -> BTreeMap<Simplex, SimplexImage> {
        self.images
            .iter()
            .filter(|(s, _)| s.dim() <= k)
            .map(|(s, i)| (s.clone(), i.clone()))
            .collect()
    }

    pub fn vertex_image(&self, v: usize) -> Option<LatticePoint> {
        self.images
            .get(&Simplex::vertex(v))
            .and_then(|i| i.cells.first())
            .map(Cell::anchor)
    }
}

/// Boundary jobs for the `d`-simplices of `y`, ids indexing into the
/// returned simplex list.
pub fn boundary_jobs(
    y: &SimplicialComplex,
    f: &SkeletonMap,
    d: usize,
) -> Result<(Vec<Simplex>, Vec<BoundaryJob>)> {
    let simplices: Vec<Simplex> = y.simplices_of_dim(d).cloned().collect();
    let mut jobs = Vec::with_capacity(simplices.len());
    for (id, s) in simplices.iter().enumerate() {
        let mut support = BTreeSet::new();
        let mut chain = Chain::new();
        for face in s.boundary()? {
            let image = f
                .images
                .get(&face)
                .ok_or_else(|| Error::MalformedPiece(format!("face {face} has no image")))?;
            support.extend(image.cells.iter().filter(|c| c.dim() + 1 == d));
            chain.add(&image.chain);
        }
        jobs.push(BoundaryJob::new(id, support, chain));
    }
    Ok((simplices, jobs))
}

/// Extends `f` over the `d`-simplices of `y` inside `frame`, with sparsity
/// `m`. The returned map agrees with `f` on every simplex `f` already maps.
pub fn extend(
    y: &SimplicialComplex,
    f: &SkeletonMap,
    frame: &Frame,
    d: usize,
    m: usize,
    config: &ExtendConfig,
) -> Result<(SkeletonMap, ExtensionLog)> {
    let (simplices, jobs) = boundary_jobs(y, f, d)?;
    let mut log = ExtensionLog::default();
    let mut fillings = extend_jobs(&jobs, frame, d, m, config, &mut log)?;
    let mut out = f.clone();
    out.m = m;
    for (id, s) in simplices.into_iter().enumerate() {
        let filling = fillings.remove(&id).unwrap_or_default();
        out.images.insert(s, filling.into());
    }
    Ok((out, log))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i32]) -> LatticePoint {
        LatticePoint::new(c)
    }

    fn points_job(id: usize, pts: &[LatticePoint]) -> BoundaryJob {
        BoundaryJob::from_chain(id, Chain::from_cells(pts.iter().map(|&q| Cell::vertex(q))))
    }

    fn corners_of(cells: &BTreeSet<Cell>) -> BTreeSet<LatticePoint> {
        cells.iter().flat_map(Cell::corners).collect()
    }

    #[test]
    fn base_case_edge_in_plane() {
        let frame = Frame::leading(2, 2);
        let job = points_job(0, &[p(&[1, 0]), p(&[2, 0])]);
        let fill = fill_base_case(std::slice::from_ref(&job), &frame, 1, 1).unwrap();
        let f = &fill[&0];
        assert_eq!(f.chain.boundary(), job.chain);
        let expected: BTreeSet<Cell> =
            [Cell::edge(p(&[0, 0]), 0), Cell::edge(p(&[1, 0]), 0)].into_iter().collect();
        assert_eq!(f.cells, expected);
        assert!(f.cones.is_empty());
        let pts = corners_of(&f.cells);
        assert!(pts.contains(&p(&[1, 0])) && pts.contains(&p(&[2, 0])));
    }

    #[test]
    fn base_case_degenerate_cone() {
        let frame = Frame::leading(2, 2);
        let job = points_job(0, &[p(&[0, 0]), p(&[0, 3])]);
        let f = &fill_base_case(std::slice::from_ref(&job), &frame, 1, 1).unwrap()[&0];
        assert_eq!(f.chain.boundary(), job.chain);
        assert!(f.cones.is_empty());
    }

    #[test]
    fn base_case_size_precondition() {
        let frame = Frame::leading(2, 2);
        let jobs = vec![
            points_job(0, &[p(&[0, 0]), p(&[1, 0])]),
            points_job(1, &[p(&[2, 0]), p(&[3, 0])]),
        ];
        assert_eq!(
            fill_base_case(&jobs, &frame, 1, 1),
            Err(Error::SizePreconditionViolated { found: 2, limit: 1 })
        );
    }

    #[test]
    fn base_case_square_loop_cones() {
        // Unit square boundary in the plane y = 1 of Z^3, d = 2, m = n = 3.
        let frame = Frame::leading(3, 3);
        let sq = Cell::new(p(&[0, 1, 0]), AxisSet::from_axes(&[0, 2]));
        let job = BoundaryJob::from_chain(0, Chain::from_cells(sq.boundary()));
        let f = &fill_base_case(std::slice::from_ref(&job), &frame, 2, 1).unwrap()[&0];
        assert_eq!(f.chain.boundary(), job.chain);
        assert!(f.cells.iter().all(|c| c.dim() == 2));
        assert_eq!(f.cones.len(), 1);
        let (planes, _) = crate::lattice::planes_hit_in_dim(&f.cones[0], 3, 2).unwrap();
        assert!(planes.is_empty(), "cone over a segment from its own end is flat");
    }

    #[test]
    fn labeling_examples() {
        let frame = Frame::leading(3, 3);
        let single = points_job(0, &[p(&[0, 0, 0]), p(&[1, 1, 0])]);
        let l = label_simplices(std::slice::from_ref(&single), &frame, 1, 4, LabelOrder::Input).unwrap();
        assert_eq!(l.labels[&0], 1);

        let apart = points_job(1, &[p(&[2, 2, 0]), p(&[3, 3, 0])]);
        let l = label_simplices(&[single.clone(), apart], &frame, 1, 4, LabelOrder::Input).unwrap();
        assert_eq!((l.labels[&0], l.labels[&1]), (1, 1));

        let sharing = points_job(1, &[p(&[0, 2, 0]), p(&[3, 3, 0])]);
        let l = label_simplices(&[single.clone(), sharing.clone()], &frame, 1, 4, LabelOrder::Input)
            .unwrap();
        assert_eq!((l.labels[&0], l.labels[&1]), (1, 2));

        assert_eq!(
            label_simplices(&[single, sharing], &frame, 1, 1, LabelOrder::Input),
            Err(Error::LabelRangeExhausted { range: 1, simplex: 1 })
        );
    }

    #[test]
    fn label_class_disjoint_union() {
        let frame = Frame::leading(3, 3);
        // Two edges sharing the vertex (0,0,0) images with the same label.
        let jobs = vec![
            points_job(0, &[p(&[0, 0, 0]), p(&[1, 1, 0])]),
            points_job(1, &[p(&[0, 0, 0]), p(&[2, 2, 0])]),
        ];
        let labeling = Labeling {
            labels: [(0, 1), (1, 1)].into_iter().collect(),
            range: 4,
        };
        let class = build_label_class(&jobs, &frame, &labeling, 1, 0, 1).unwrap();
        assert_eq!(class.domain().vertex_count(), 4);
        assert_eq!(class.domain_vertex_count(), 4);

        let empty = build_label_class(&jobs, &frame, &labeling, 2, 1, 1).unwrap();
        assert!(empty.jobs.is_empty());
        assert_eq!(empty.domain().vertex_count(), 0);
    }

    #[test]
    fn label_class_translates_and_projects() {
        let frame = Frame::leading(3, 3);
        let job = points_job(0, &[p(&[0, 0, 0]), p(&[1, 1, 0])]);
        let labeling = Labeling {
            labels: [(0, 2)].into_iter().collect(),
            range: 4,
        };
        let class = build_label_class(&[job], &frame, &labeling, 2, 1, 1).unwrap();
        let pts: Vec<LatticePoint> = class.jobs[0].support.iter().map(Cell::anchor).collect();
        assert_eq!(pts, vec![p(&[0, 0, 2]), p(&[1, 0, 2])]);
        assert_eq!(class.frame.axes, vec![0, 1]);
        assert_eq!(class.frame.origin, p(&[0, 0, 2]));
    }

    #[test]
    fn single_edge_rises_to_label_height() {
        let y = SimplicialComplex::build(&[vec![0, 1]]).unwrap();
        let f = SkeletonMap::from_vertices(3, 0, &[p(&[0, 0, 0]), p(&[1, 1, 0])]);
        let (out, log) = extend(&y, &f, &Frame::leading(3, 3), 1, 1, &ExtendConfig::new(4)).unwrap();
        let edge = &out.images[&Simplex::edge(0, 1)];
        let label = log.max_label as i32;
        assert_eq!(label, 1);
        for v in [p(&[0, 0, 0]), p(&[1, 1, 0])] {
            for z in 0..label {
                assert!(edge.cells.contains(&Cell::edge(v.with(2, z), 2)));
            }
        }
        let mut ends = Chain::new();
        ends.toggle(Cell::vertex(p(&[0, 0, 0])));
        ends.toggle(Cell::vertex(p(&[1, 1, 0])));
        assert_eq!(edge.chain.boundary(), ends);
        assert_eq!(out.restrict(0), f.images);
    }

    #[test]
    fn no_top_simplices_is_identity() {
        let y = SimplicialComplex::build(&[vec![0], vec![1]]).unwrap();
        let f = SkeletonMap::from_vertices(3, 0, &[p(&[0, 0, 0]), p(&[1, 1, 0])]);
        let (out, _) = extend(&y, &f, &Frame::leading(3, 3), 1, 1, &ExtendConfig::new(4)).unwrap();
        assert_eq!(out.images, f.images);
    }

    #[test]
    fn rejects_boundary_off_the_floor() {
        let y = SimplicialComplex::build(&[vec![0, 1]]).unwrap();
        let f = SkeletonMap::from_vertices(3, 0, &[p(&[0, 0, 1]), p(&[1, 1, 0])]);
        assert!(matches!(
            extend(&y, &f, &Frame::leading(3, 3), 1, 1, &ExtendConfig::new(4)),
            Err(Error::PieceNotInHyperplane { axis: 2, .. })
        ));
    }
}
