//! Flat-file renderings of lattice maps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::embedder::LatticeMap;
use crate::error::{Error, Result};
use crate::lattice::{Cell, GeomPiece, LatticePoint};

const SVG_SCALE: i64 = 10;

/// Output format for [`export`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Obj,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svg" => Ok(Format::Svg),
            "obj" => Ok(Format::Obj),
            "json" => Ok(Format::Json),
            other => Err(Error::UnsupportedDimension(format!("unknown format {other:?}"))),
        }
    }
}

pub fn export(map: &LatticeMap, format: Format) -> Result<String> {
    match format {
        Format::Svg => to_svg(map),
        Format::Obj => to_obj(map),
        Format::Json => Ok(serde_json::to_string_pretty(&map.to_json())?),
    }
}

/// Cells of a piece; a cone becomes its apex joined to each base cell,
/// returned as triangles.
fn piece_parts(piece: &GeomPiece) -> (Vec<Cell>, Vec<[LatticePoint; 3]>) {
    match piece {
        GeomPiece::Cone { base, apex } => {
            let (cells, _) = piece_parts(base);
            let mut edges = Vec::new();
            let mut tris = Vec::new();
            for c in cells {
                match c.corners().as_slice() {
                    [p] => edges.extend(edge_between(*apex, *p)),
                    [p, q] => tris.push([*apex, *p, *q]),
                    _ => {}
                }
            }
            (edges, tris)
        }
        other => (other.cells().unwrap_or_default(), Vec::new()),
    }
}

fn edge_between(a: LatticePoint, b: LatticePoint) -> Option<Cell> {
    let diff: Vec<usize> = (0..a.n()).filter(|&i| a.get(i) != b.get(i)).collect();
    match diff.as_slice() {
        [axis] if (a.get(*axis) - b.get(*axis)).abs() == 1 => {
            let lo = if a.get(*axis) < b.get(*axis) { a } else { b };
            Some(Cell::edge(lo, *axis))
        }
        _ => None,
    }
}

/// SVG with one path per edge image and a dot per vertex. Plane graphs only.
pub fn to_svg(map: &LatticeMap) -> Result<String> {
    if map.n != 2 || map.d() > 1 {
        return Err(Error::UnsupportedDimension(format!(
            "svg needs n = 2 and d <= 1, got n = {} and d = {}",
            map.n,
            map.d()
        )));
    }
    let side = map.side().max(1) + 1;
    let px = |p: &LatticePoint| (i64::from(p.get(0)) * SVG_SCALE, (side - 1 - i64::from(p.get(1))) * SVG_SCALE);
    let mut out = String::new();
    let extent = side * SVG_SCALE;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-5 -5 {} {}">"#,
        extent + 10 - SVG_SCALE,
        extent + 10 - SVG_SCALE
    )
    .expect("string write");
    for (s, pieces) in &map.images {
        match s.dim() {
            0 => {
                if let Some(p) = map.vertex_image(s.vertices()[0]) {
                    let (x, y) = px(&p);
                    writeln!(out, r#"<circle data-simplex="{}" cx="{x}" cy="{y}" r="2"/>"#, s.key()).expect("string write");
                }
            }
            _ => {
                let mut d = String::new();
                for c in pieces.iter().flat_map(|p| piece_parts(p).0) {
                    if let [a, b] = c.corners().as_slice() {
                        let ((x0, y0), (x1, y1)) = (px(a), px(b));
                        write!(d, "M{x0} {y0}L{x1} {y1}").expect("string write");
                    }
                }
                writeln!(
                    out,
                    r#"<path data-simplex="{}" d="{d}" fill="none" stroke="black"/>"#,
                    s.key()
                )
                .expect("string write");
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Wavefront OBJ: unit edges as `l`, unit squares as quad `f`, one group per
/// simplex.
pub fn to_obj(map: &LatticeMap) -> Result<String> {
    if map.n != 3 || map.d() > 2 {
        return Err(Error::UnsupportedDimension(format!(
            "obj needs n = 3 and d <= 2, got n = {} and d = {}",
            map.n,
            map.d()
        )));
    }
    let mut index: BTreeMap<LatticePoint, usize> = BTreeMap::new();
    let mut body = String::new();
    let id = |p: LatticePoint, index: &mut BTreeMap<LatticePoint, usize>| {
        let next = index.len() + 1;
        *index.entry(p).or_insert(next)
    };
    for (s, pieces) in &map.images {
        if s.dim() == 0 {
            continue;
        }
        writeln!(body, "g s{}", s.key().replace(',', "_")).expect("string write");
        for piece in pieces {
            let (cells, tris) = piece_parts(piece);
            for c in cells {
                let k: Vec<usize> = c.corners().into_iter().map(|p| id(p, &mut index)).collect();
                match k.as_slice() {
                    [a, b] => writeln!(body, "l {a} {b}"),
                    [a, b, c, d] => writeln!(body, "f {a} {b} {d} {c}"),
                    _ => Ok(()),
                }
                .expect("string write");
            }
            for t in tris {
                let k: Vec<usize> = t.into_iter().map(|p| id(p, &mut index)).collect();
                writeln!(body, "f {} {} {}", k[0], k[1], k[2]).expect("string write");
            }
        }
    }
    let mut verts: Vec<(usize, LatticePoint)> = index.into_iter().map(|(p, i)| (i, p)).collect();
    verts.sort();
    let mut out = String::new();
    for (_, p) in verts {
        writeln!(out, "v {} {} {}", p.get(0), p.get(1), p.get(2)).expect("string write");
    }
    out.push_str(&body);
    Ok(out)
}
