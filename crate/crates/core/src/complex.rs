//! Finite simplicial complexes with bounded vertex degree.
//!
//! Simplices are stored as sorted vertex tuples without orientation; every
//! boundary computation elsewhere in the crate works mod 2.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simplex as a sorted tuple of distinct vertex indices.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Builds a simplex from an unordered vertex list.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyInput);
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex(vertices));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn edge(a: usize, b: usize) -> Self {
        if a < b {
            Simplex(vec![a, b])
        } else {
            Simplex(vec![b, a])
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Codimension-one faces, the i-th obtained by dropping vertex i.
    pub fn boundary(&self) -> Result<Vec<Simplex>> {
        if self.0.len() < 2 {
            return Err(Error::ZeroDimensional);
        }
        Ok((0..self.0.len())
            .map(|skip| {
                Simplex(
                    self.0
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect(),
                )
            })
            .collect())
    }

    /// All non-empty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let k = self.0.len();
        (1u32..(1u32 << k))
            .map(|mask| {
                Simplex(
                    (0..k)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }

    /// Stable text key used in the embedding JSON (`"0,1,2"`).
    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let vs = key
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("simplex key {key:?}: {e}")))?;
        Simplex::new(vs)
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// A downward-closed finite simplicial complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    dim: usize,
    vertex_count: usize,
    /// Sorted by dimension, then lexicographically.
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    degrees: Vec<usize>,
}

impl SimplicialComplex {
    /// Downward closure of `raw` simplices. The vertex count is one more than
    /// the largest index used.
    pub fn build(raw: &[Vec<usize>]) -> Result<Self> {
        Self::build_with_vertex_count(raw, None)
    }

    /// Like [`build`](Self::build), but declares `V` explicitly so isolated
    /// trailing vertices are kept.
    pub fn build_with_vertex_count(raw: &[Vec<usize>], vertex_count: Option<usize>) -> Result<Self> {
        if raw.is_empty() && vertex_count.unwrap_or(0) == 0 {
            return Err(Error::EmptyInput);
        }
        let mut set = BTreeSet::new();
        for tuple in raw {
            let s = Simplex::new(tuple.clone())?;
            for f in s.faces() {
                set.insert(f);
            }
        }
        let max_index = set.iter().flat_map(|s| s.0.iter().copied()).max();
        let vertex_count = match (vertex_count, max_index) {
            (Some(v), Some(mx)) if mx >= v => {
                return Err(Error::VertexOutOfRange { vertex: mx, count: v })
            }
            (Some(v), _) => v,
            (None, Some(mx)) => mx + 1,
            (None, None) => return Err(Error::EmptyInput),
        };
        for v in 0..vertex_count {
            set.insert(Simplex::vertex(v));
        }
        Ok(Self::from_closed(set.into_iter().collect(), vertex_count))
    }

    /// The complex with no simplices.
    pub fn empty() -> Self {
        Self::from_closed(Vec::new(), 0)
    }

    fn from_closed(simplices: Vec<Simplex>, vertex_count: usize) -> Self {
        let dim = simplices.iter().map(Simplex::dim).max().unwrap_or(0);
        let index = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut degrees = vec![0; vertex_count];
        for s in &simplices {
            for &v in s.vertices() {
                degrees[v] += 1;
            }
        }
        SimplicialComplex {
            dim,
            vertex_count,
            simplices,
            index,
            degrees,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Simplices of exactly dimension `k`, in storage order.
    pub fn simplices_of_dim(&self, k: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter().filter(move |s| s.dim() == k)
    }

    /// Number of simplices of every dimension containing `v`, the vertex
    /// itself included.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.degrees.get(v).copied().ok_or(Error::VertexOutOfRange {
            vertex: v,
            count: self.vertex_count,
        })
    }

    /// Smallest `D` bounding every vertex degree.
    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// The `k`-skeleton as a complex on the same vertex set.
    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        let simplices = self
            .simplices
            .iter()
            .filter(|s| s.dim() <= k)
            .cloned()
            .collect();
        Self::from_closed(simplices, self.vertex_count)
    }

    /// Number of connected components (isolated vertices count).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for s in self.simplices_of_dim(1) {
            let (a, b) = (find(&mut parent, s.0[0]), find(&mut parent, s.0[1]));
            if a != b {
                parent[a] = b;
            }
        }
        (0..self.vertex_count)
            .filter(|&v| find(&mut parent, v) == v)
            .count()
    }

    pub fn to_json(&self) -> ComplexJson {
        let maximal: Vec<Vec<usize>> = self
            .simplices
            .iter()
            .filter(|s| {
                s.dim() == self.dim
                    || !self
                        .simplices
                        .iter()
                        .any(|t| t.dim() == s.dim() + 1 && s.0.iter().all(|v| t.contains(*v)))
            })
            .map(|s| s.0.clone())
            .collect();
        ComplexJson {
            d: self.dim,
            vertex_count: self.vertex_count,
            simplices: maximal,
        }
    }

    pub fn from_json(json: &ComplexJson) -> Result<Self> {
        let c = Self::build_with_vertex_count(&json.simplices, Some(json.vertex_count))?;
        if c.dim != json.d {
            return Err(Error::Parse(format!(
                "declared dimension {} but simplices have dimension {}",
                json.d, c.dim
            )));
        }
        Ok(c)
    }
}

/// Wire format `{"d": int, "V": int, "simplices": [[int,...],...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComplexJson {
    pub d: usize,
    #[serde(rename = "V")]
    pub vertex_count: usize,
    pub simplices: Vec<Vec<usize>>,
}

/// Result of cutting the edges of a graph.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: SimplicialComplex,
    /// New vertex -> (original edge, cut fraction measured from the lower
    /// endpoint index).
    pub provenance: BTreeMap<usize, (Simplex, Ratio<i64>)>,
    /// Original edge -> the chain of edges replacing it, in order from the
    /// lower endpoint index.
    pub edge_chains: BTreeMap<Simplex, Vec<Simplex>>,
}

impl Subdivision {
    /// Vertex blow-up factor `V' / V`.
    pub fn blowup(&self, original_vertices: usize) -> f64 {
        self.complex.vertex_count() as f64 / original_vertices.max(1) as f64
    }
}

/// Replaces each cut edge of a graph with a path through new vertices placed
/// at the given fractions (measured from the lower-index endpoint).
pub fn subdivide_edges(
    y: &SimplicialComplex,
    cuts: &BTreeMap<Simplex, Vec<Ratio<i64>>>,
) -> Result<Subdivision> {
    if y.dim() != 1 && !(y.dim() == 0 && cuts.is_empty()) {
        return Err(Error::NotAGraph(y.dim()));
    }
    let mut next = y.vertex_count();
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut edge_chains = BTreeMap::new();
    for s in y.simplices() {
        match s.dim() {
            0 => raw.push(s.0.clone()),
            _ => {
                let mut fracs: Vec<Ratio<i64>> = cuts.get(s).cloned().unwrap_or_default();
                fracs.sort();
                fracs.dedup();
                let zero = Ratio::from_integer(0);
                let one = Ratio::from_integer(1);
                if fracs.iter().any(|f| *f <= zero || *f >= one) {
                    return Err(Error::Parse(format!("cut fraction outside (0,1) on edge {s}")));
                }
                let mut chain_vertices = vec![s.0[0]];
                for f in fracs {
                    provenance.insert(next, (s.clone(), f));
                    chain_vertices.push(next);
                    next += 1;
                }
                chain_vertices.push(s.0[1]);
                let chain: Vec<Simplex> = chain_vertices
                    .windows(2)
                    .map(|w| Simplex::edge(w[0], w[1]))
                    .collect();
                for e in &chain {
                    raw.push(e.0.clone());
                }
                edge_chains.insert(s.clone(), chain);
            }
        }
    }
    let complex = if raw.is_empty() {
        SimplicialComplex::empty()
    } else {
        SimplicialComplex::build_with_vertex_count(&raw, Some(next))?
    };
    Ok(Subdivision {
        complex,
        provenance,
        edge_chains,
    })
}
