use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sparse_embed::complex::{ComplexJson, SimplicialComplex};
use sparse_embed::export::{export, Format};
use sparse_embed::harness::{bench, BenchConfig, InstanceFamily, Pipeline};
use sparse_embed::verify::{verify, verify_json, SparsityCertificate};
use sparse_embed::width::{width_embed, HeightFunction};
use sparse_embed::{embed, Error, LatticeMap};

#[derive(Parser)]
#[command(name = "sparse-embed", version, about = "Sparse lattice embeddings of simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a complex sparsely and certify the result.
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check an embedding file.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Width-aware embedding of a graph.
    WidthEmbed {
        #[arg(long)]
        input: PathBuf,
        /// Height file; natural heights when omitted.
        #[arg(long)]
        heights: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scaling sweep with an exponent fit.
    Bench {
        #[arg(long, value_enum)]
        family: FamilyKind,
        /// Vertex degree for regular graphs, top-simplex load for complexes.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Dimension of random complexes.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Complex file for the user-file family.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PipelineKind::Sparse)]
        pipeline: PipelineKind,
        /// Record runtimes (the report is then not reproducible byte for byte).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        report: PathBuf,
    },
    /// Render an embedding file.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: FormatKind,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    RandomRegularGraph,
    Path,
    Cycle,
    RandomDComplex,
    UserFile,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineKind {
    Sparse,
    WidthNatural,
    WidthSweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatKind {
    Svg,
    Obj,
    Json,
}

enum Failure {
    Uncertified,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), Error> {
    write_text(path, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn read_complex(path: &Path) -> Result<SimplicialComplex, Error> {
    let json: ComplexJson = serde_json::from_value(read_json(path)?)?;
    SimplicialComplex::from_json(&json)
}

/// Map JSON with the certificate attached, printing the certificate.
fn emit_map(map: &LatticeMap, extra: Option<(&str, Value)>, out: &Path) -> Result<SparsityCertificate, Error> {
    let cert = verify(map);
    let mut json = map.to_json();
    json["certificate"] = serde_json::to_value(&cert)?;
    if let Some((key, value)) = extra {
        json[key] = value;
    }
    write_json(out, &json)?;
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(cert)
}

fn certified(cert: &SparsityCertificate) -> Result<(), Failure> {
    if cert.skeletal_ok {
        Ok(())
    } else {
        Err(Failure::Uncertified)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Embed { input, m, n, out } => {
            let y = read_complex(&input)?;
            let map = embed(&y, m, n)?;
            certified(&emit_map(&map, None, &out)?)
        }
        Command::Verify { input } => {
            let cert = verify_json(&read_json(&input)?)?;
            println!("{}", serde_json::to_string_pretty(&cert).map_err(Error::from)?);
            certified(&cert)
        }
        Command::WidthEmbed { input, heights, n, out } => {
            let y = read_complex(&input)?;
            let h = match heights {
                Some(p) => HeightFunction::from_json(&read_json(&p)?)?,
                None => HeightFunction::natural(y.vertex_count()),
            };
            let result = width_embed(&y, &h, n)?;
            let report = serde_json::to_value(&result.report).map_err(Error::from)?;
            certified(&emit_map(&result.map, Some(("width_report", report)), &out)?)
        }
        Command::Bench {
            family,
            degree,
            dim,
            file,
            sizes,
            m,
            n,
            seed,
            pipeline,
            timings,
            report,
        } => {
            let family = match family {
                FamilyKind::RandomRegularGraph => InstanceFamily::RandomRegularGraph { degree },
                FamilyKind::Path => InstanceFamily::Path,
                FamilyKind::Cycle => InstanceFamily::Cycle,
                FamilyKind::RandomDComplex => InstanceFamily::RandomDComplex { dim, degree },
                FamilyKind::UserFile => InstanceFamily::UserFile {
                    path: file.ok_or_else(|| Error::InvalidConfig("user-file needs --file".into()))?,
                },
            };
            let pipeline = match pipeline {
                PipelineKind::Sparse => Pipeline::Sparse,
                PipelineKind::WidthNatural => Pipeline::WidthNatural,
                PipelineKind::WidthSweep => Pipeline::WidthSweep,
            };
            let result = bench(&BenchConfig {
                family,
                pipeline,
                sizes,
                m,
                n,
                seed,
                timings,
            })?;
            write_json(&report, &serde_json::to_value(&result).map_err(Error::from)?)?;
            println!(
                "slope {:.4} +/- {:.4} over {} sizes",
                result.fit.slope,
                result.fit.std_err,
                result.records.len()
            );
            if result.records.iter().all(|r| r.certificate.skeletal_ok) {
                Ok(())
            } else {
                Err(Failure::Uncertified)
            }
        }
        Command::Export { input, format, out } => {
            let map = LatticeMap::from_json(&read_json(&input)?)?;
            let format = match format {
                FormatKind::Svg => Format::Svg,
                FormatKind::Obj => Format::Obj,
                FormatKind::Json => Format::Json,
            };
            write_text(&out, &export(&map, format)?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Uncertified) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
