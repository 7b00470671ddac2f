//! Text mesh format:
//!
//! ```text
//! polymesh 1
//! <nv> <nc>
//! x y            (nv lines)
//! m i0 ... i(m-1) (nc lines, 0-based CCW vertex indices)
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::{Point, PolygonalMesh};
use crate::error::{Error, Result};

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedMesh {
        line,
        message: message.into(),
    }
}

fn parse_field<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| malformed(line, format!("cannot parse {what} from {tok:?}")))
}

pub fn parse_mesh(text: &str) -> Result<PolygonalMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| malformed(text.lines().count(), format!("unexpected end of file, expected {what}")))
    };

    let (ln, header) = next("header")?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("polymesh") || tokens.next() != Some("1") || tokens.next().is_some() {
        return Err(malformed(ln, "expected header `polymesh 1`"));
    }

    let (ln, counts) = next("vertex and cell counts")?;
    let counts: Vec<&str> = counts.split_whitespace().collect();
    if counts.len() != 2 {
        return Err(malformed(ln, "expected `<nv> <nc>`"));
    }
    let nv: usize = parse_field(counts[0], ln, "vertex count")?;
    let nc: usize = parse_field(counts[1], ln, "cell count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertex coordinates")?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 2 {
            return Err(malformed(ln, "expected `x y`"));
        }
        let x: f64 = parse_field(tok[0], ln, "x")?;
        let y: f64 = parse_field(tok[1], ln, "y")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(malformed(ln, "non-finite coordinate"));
        }
        vertices.push(Point::new(x, y));
    }

    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = next("cell")?;
        let mut tok = l.split_whitespace();
        let m: usize = parse_field(tok.next().unwrap_or(""), ln, "cell size")?;
        let idx = tok
            .map(|t| parse_field::<usize>(t, ln, "vertex index"))
            .collect::<Result<Vec<_>>>()?;
        if idx.len() != m {
            return Err(malformed(ln, format!("cell declares {m} vertices but lists {}", idx.len())));
        }
        if let Some(bad) = idx.iter().find(|&&i| i >= nv) {
            return Err(malformed(ln, format!("vertex index {bad} out of range")));
        }
        cells.push(idx);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(malformed(ln, "trailing data after last cell"));
    }
    PolygonalMesh::new(vertices, cells)
}

pub fn import_mesh(path: impl AsRef<Path>) -> Result<PolygonalMesh> {
    parse_mesh(&fs::read_to_string(path)?)
}

pub fn write_mesh<W: Write>(mesh: &PolygonalMesh, mut out: W) -> Result<()> {
    writeln!(out, "polymesh 1")?;
    writeln!(out, "{} {}", mesh.num_vertices(), mesh.num_cells())?;
    for p in mesh.vertices() {
        // `{:?}` prints the shortest round-trip representation
        writeln!(out, "{:?} {:?}", p.x, p.y)?;
    }
    for cell in mesh.cells() {
        write!(out, "{}", cell.len())?;
        for v in cell {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn export_mesh(mesh: &PolygonalMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_mesh(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}
