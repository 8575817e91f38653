//! Instance generators and the scaling benchmark.

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{ComplexJson, SimplicialComplex};
use crate::embedder::{embed, LatticeMap};
use crate::error::{Error, Result};
use crate::verify::{unit_ball_census, verify, SparsityCertificate};
use crate::width::{width_embed, HeightFunction};

const PAIRING_ATTEMPTS: usize = 10_000;

/// Which instances a sweep runs on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFamily {
    RandomRegularGraph { degree: usize },
    Path,
    Cycle,
    /// Random pure complex of dimension `dim` where each vertex lies in at
    /// most `degree` top simplices.
    RandomDComplex { dim: usize, degree: usize },
    UserFile { path: PathBuf },
}

impl InstanceFamily {
    /// Generates the instance of size `v`; `UserFile` ignores `v`.
    pub fn generate(&self, v: usize, seed: u64) -> Result<SimplicialComplex> {
        let mut rng = ChaCha8Rng::seed_from_u64(size_seed(seed, v));
        match self {
            InstanceFamily::RandomRegularGraph { degree } => random_regular_graph(v, *degree, &mut rng),
            InstanceFamily::Path => path_graph(v),
            InstanceFamily::Cycle => cycle_graph(v),
            InstanceFamily::RandomDComplex { dim, degree } => random_d_complex(v, *dim, *degree, &mut rng),
            InstanceFamily::UserFile { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(e.to_string()))?;
                let json: ComplexJson = serde_json::from_str(&text)?;
                SimplicialComplex::from_json(&json)
            }
        }
    }
}

fn size_seed(seed: u64, v: usize) -> u64 {
    seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn path_graph(v: usize) -> Result<SimplicialComplex> {
    if v == 0 {
        return Err(Error::EmptyInput);
    }
    let mut raw: Vec<Vec<usize>> = (1..v).map(|i| vec![i - 1, i]).collect();
    raw.push(vec![v - 1]);
    SimplicialComplex::build(&raw)
}

pub fn cycle_graph(v: usize) -> Result<SimplicialComplex> {
    if v < 3 {
        return Err(Error::InvalidConfig(format!("a cycle needs 3 vertices, got {v}")));
    }
    let raw: Vec<Vec<usize>> = (0..v).map(|i| vec![i, (i + 1) % v]).collect();
    SimplicialComplex::build(&raw)
}

/// Simple `degree`-regular graph by the configuration model, re-pairing
/// until no loops or multi-edges remain.
pub fn random_regular_graph(v: usize, degree: usize, rng: &mut impl Rng) -> Result<SimplicialComplex> {
    if v == 0 || degree >= v || (v * degree) % 2 == 1 {
        return Err(Error::InvalidConfig(format!("no simple {degree}-regular graph on {v} vertices")));
    }
    let mut stubs: Vec<usize> = (0..v).flat_map(|x| std::iter::repeat_n(x, degree)).collect();
    for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(rng);
        let mut edges = BTreeSet::new();
        let simple = stubs.chunks(2).all(|p| p[0] != p[1] && edges.insert((p[0].min(p[1]), p[0].max(p[1]))));
        if simple {
            let mut raw: Vec<Vec<usize>> = edges.into_iter().map(|(a, b)| vec![a, b]).collect();
            raw.extend((0..v).map(|x| vec![x]));
            return SimplicialComplex::build(&raw);
        }
    }
    Err(Error::InvalidConfig(format!("pairing failed for {degree}-regular graph on {v} vertices")))
}

/// About `v` random top simplices of dimension `dim`, each vertex in at most
/// `degree` of them; every vertex appears.
pub fn random_d_complex(v: usize, dim: usize, degree: usize, rng: &mut impl Rng) -> Result<SimplicialComplex> {
    if dim == 0 || v <= dim || degree == 0 {
        return Err(Error::InvalidConfig(format!("cannot build a {dim}-complex on {v} vertices")));
    }
    let mut load = vec![0usize; v];
    let mut tops: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut attempts = 0;
    while tops.len() < v && attempts < 50 * v {
        attempts += 1;
        let mut s: Vec<usize> = rand::seq::index::sample(rng, v, dim + 1).into_vec();
        s.sort_unstable();
        if s.iter().all(|&x| load[x] < degree) && tops.insert(s.clone()) {
            for x in s {
                load[x] += 1;
            }
        }
    }
    let mut raw: Vec<Vec<usize>> = tops.into_iter().collect();
    raw.extend((0..v).map(|x| vec![x]));
    SimplicialComplex::build(&raw)
}

/// Heights by breadth-first order from vertex 0, components in turn.
pub fn sweep_heights(y: &SimplicialComplex) -> HeightFunction {
    let v = y.vertex_count();
    let mut adj = vec![Vec::new(); v];
    for e in y.simplices_of_dim(1) {
        let (a, b) = (e.vertices()[0], e.vertices()[1]);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; v];
    let mut order = Vec::with_capacity(v);
    for start in 0..v {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &w in &adj[x] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    HeightFunction::from_order(&order)
}

/// Which construction a sweep benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Sparse,
    /// Width pipeline with natural heights.
    WidthNatural,
    /// Width pipeline with breadth-first sweep heights.
    WidthSweep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub family: InstanceFamily,
    pub pipeline: Pipeline,
    pub sizes: Vec<usize>,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    /// Record wall-clock runtimes (makes reports nondeterministic).
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    #[serde(rename = "V")]
    pub v: usize,
    pub side: i64,
    pub max_planes_per_simplex: usize,
    pub max_simplices_per_plane: usize,
    pub unit_ball_census: usize,
    pub certificate: SparsityCertificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Least-squares line through `(ln V, ln side)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub std_err: f64,
    pub residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub family: InstanceFamily,
    pub pipeline: Pipeline,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub records: Vec<BenchRecord>,
    pub fit: Fit,
    /// Candidate exponents the slope is compared against, by name.
    pub reference_exponents: Vec<(String, f64)>,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(Error::InsufficientFitPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("sizes must differ".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = points.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    Ok(Fit {
        slope,
        intercept,
        std_err: (sse / (k - 2.0) / sxx).sqrt(),
        residuals,
    })
}

/// Embeds one instance with the configured pipeline.
pub fn run_instance(
    y: &SimplicialComplex,
    pipeline: Pipeline,
    m: usize,
    n: usize,
) -> Result<(LatticeMap, Option<usize>)> {
    match pipeline {
        Pipeline::Sparse => Ok((embed(y, m, n)?, None)),
        Pipeline::WidthNatural | Pipeline::WidthSweep => {
            let h = match pipeline {
                Pipeline::WidthNatural => HeightFunction::natural(y.vertex_count()),
                _ => sweep_heights(y),
            };
            let out = width_embed(y, &h, n)?;
            Ok((out.map, Some(out.report.measured_width)))
        }
    }
}

fn bench_one(config: &BenchConfig, v: usize) -> Result<BenchRecord> {
    let start = Instant::now();
    let y = config.family.generate(v, config.seed)?;
    let (map, width) = run_instance(&y, config.pipeline, config.m, config.n)?;
    let certificate = verify(&map);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRecord {
        v: y.vertex_count(),
        side: map.side(),
        max_planes_per_simplex: certificate.max_planes_per_simplex,
        max_simplices_per_plane: certificate.max_simplices_per_plane,
        unit_ball_census: unit_ball_census(&map),
        certificate,
        measured_width: width,
        runtime_ms: config.timings.then_some(elapsed),
    })
}

fn reference_exponents(config: &BenchConfig) -> Vec<(String, f64)> {
    let n = config.n as f64;
    match config.pipeline {
        Pipeline::Sparse => vec![("sparse".into(), 1.0 / (n - config.m as f64))],
        _ => vec![
            ("bounded-width".into(), 1.0 / n),
            ("linear-width".into(), 1.0 / (n - 1.0)),
        ],
    }
}

/// Runs the sweep, one thread per size.
pub fn bench(config: &BenchConfig) -> Result<BenchReport> {
    let sizes: BTreeSet<usize> = config.sizes.iter().copied().collect();
    if sizes.len() < 3 {
        return Err(Error::InsufficientFitPoints {
            needed: 3,
            got: sizes.len(),
        });
    }
    let results: Vec<Result<BenchRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = sizes
            .iter()
            .map(|&v| scope.spawn(move || bench_one(config, v)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench worker panicked"))
            .collect()
    });
    let mut records = results.into_iter().collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.v);
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.v as f64).ln(), (r.side.max(1) as f64).ln()))
        .collect();
    Ok(BenchReport {
        family: config.family.clone(),
        pipeline: config.pipeline,
        m: config.m,
        n: config.n,
        seed: config.seed,
        records,
        fit: fit_exponent(&points)?,
        reference_exponents: reference_exponents(config),
    })
}

/// Regenerates every instance of a report and checks that each stored
/// certificate is reproduced and passes.
pub fn reverify(report: &BenchReport) -> Result<bool> {
    for r in &report.records {
        let y = report.family.generate(r.v, report.seed)?;
        let (map, _) = run_instance(&y, report.pipeline, report.m, report.n)?;
        let cert = verify(&map);
        if !cert.skeletal_ok || cert != r.certificate {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_respect_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_regular_graph(64, 4, &mut rng).unwrap();
        assert_eq!(g.simplices_of_dim(1).count(), 128);
        assert!((0..64).all(|v| g.degree(v).unwrap() == 5));
        let c = random_d_complex(40, 2, 4, &mut rng).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.vertex_count(), 40);
        assert!(random_regular_graph(5, 3, &mut rng).is_err());
        assert_eq!(path_graph(5).unwrap().simplices_of_dim(1).count(), 4);
        assert_eq!(cycle_graph(5).unwrap().simplices_of_dim(1).count(), 5);
    }

    #[test]
    fn generation_is_seeded() {
        let f = InstanceFamily::RandomRegularGraph { degree: 4 };
        assert_eq!(f.generate(32, 7).unwrap(), f.generate(32, 7).unwrap());
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [10.0f64, 100.0, 1000.0].iter().map(|v| (v.ln(), 0.5 * v.ln() + 1.0)).collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-9);
        assert!(fit.std_err < 1e-9);
        assert_eq!(
            fit_exponent(&pts[..2]),
            Err(Error::InsufficientFitPoints { needed: 3, got: 2 })
        );
    }

    #[test]
    fn bench_rejects_two_sizes() {
        let cfg = BenchConfig {
            family: InstanceFamily::Path,
            pipeline: Pipeline::Sparse,
            sizes: vec![8, 16],
            m: 1,
            n: 3,
            seed: 0,
            timings: false,
        };
        assert!(matches!(bench(&cfg), Err(Error::InsufficientFitPoints { got: 2, .. })));
    }

    #[test]
    fn sweep_heights_are_injective() {
        let g = cycle_graph(9).unwrap();
        assert!(sweep_heights(&g).is_injective());
    }
}
