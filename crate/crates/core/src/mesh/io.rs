//! Mesh file formats.
//!
//! Native text format (0-based indices, one record per line):
//!
//! ```text
//! vem-mesh 1
//! <vertex count>
//! <x> <y> <boundary flag 0|1>
//! ...
//! <cell count>
//! <k> <i1> ... <ik>
//! ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip representation, so a
//! write/read cycle is lossless and output is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{polygon_area, Point, PolygonalMesh};
use crate::error::{Error, Result};

const NATIVE_HEADER: &str = "vem-mesh 1";

impl PolygonalMesh {
    pub fn to_native_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{NATIVE_HEADER}");
        let _ = writeln!(s, "{}", self.num_vertices());
        for (v, p) in self.vertices().iter().enumerate() {
            let _ = writeln!(s, "{} {} {}", p.x, p.y, u8::from(self.is_boundary(v)));
        }
        let _ = writeln!(s, "{}", self.num_cells());
        for cell in self.cells() {
            let _ = write!(s, "{}", cell.len());
            for v in cell {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_native(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = Lines::new(text, origin);
        let (ln, header) = lines.next_line()?;
        if header.trim() != NATIVE_HEADER {
            return Err(lines.err(ln, format!("expected header `{NATIVE_HEADER}`")));
        }
        let nv: usize = lines.single()?;
        let mut vertices = Vec::with_capacity(nv);
        let mut boundary = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, line) = lines.next_line()?;
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(lines.err(ln, "vertex line must be `x y flag`".into()));
            }
            let x = lines.num::<f64>(ln, tok[0])?;
            let y = lines.num::<f64>(ln, tok[1])?;
            let flag = match tok[2] {
                "0" => false,
                "1" => true,
                other => return Err(lines.err(ln, format!("boundary flag `{other}`"))),
            };
            vertices.push(Point::new(x, y));
            boundary.push(flag);
        }
        let nc: usize = lines.single()?;
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (ln, line) = lines.next_line()?;
            let idx: Vec<usize> = line
                .split_whitespace()
                .map(|t| lines.num::<usize>(ln, t))
                .collect::<Result<_>>()?;
            if idx.is_empty() || idx[0] + 1 != idx.len() {
                return Err(lines.err(ln, "cell line must be `k i1 ... ik`".into()));
            }
            cells.push(idx[1..].to_vec());
        }
        PolygonalMesh::from_parts(vertices, cells, boundary)
    }
}

pub fn write_native(mesh: &PolygonalMesh, path: &Path) -> Result<()> {
    fs::write(path, mesh.to_native_string())?;
    Ok(())
}

pub fn read_native(path: &Path) -> Result<PolygonalMesh> {
    let text = fs::read_to_string(path)?;
    PolygonalMesh::parse_native(&text, path)
}

/// Reads a Triangle `.node`/`.ele` pair (2D, attributes and markers ignored).
///
/// Index base (0 or 1) follows the first vertex index in the `.node` file.
/// Clockwise triangles are flipped; zero-area triangles are rejected.
/// Boundary flags come from edge topology, not from the file markers.
pub fn load_triangle_format(node_path: &Path, ele_path: &Path) -> Result<PolygonalMesh> {
    let node_text = fs::read_to_string(node_path)?;
    let ele_text = fs::read_to_string(ele_path)?;

    let mut nodes = Lines::new(&node_text, node_path);
    let (ln, head) = nodes.next_line()?;
    let head: Vec<usize> = head
        .split_whitespace()
        .map(|t| nodes.num::<usize>(ln, t))
        .collect::<Result<_>>()?;
    if head.len() < 2 || head[1] != 2 {
        return Err(nodes.err(
            ln,
            "expected `<#vertices> 2 [<#attributes> <#markers>]`".into(),
        ));
    }
    let nv = head[0];
    let mut base = None;
    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (ln, line) = nodes.next_line()?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < 3 {
            return Err(nodes.err(ln, "vertex row needs `<index> <x> <y>`".into()));
        }
        let idx = nodes.num::<usize>(ln, tok[0])?;
        let b = *base.get_or_insert(idx);
        if b > 1 {
            return Err(nodes.err(ln, format!("first vertex index {b} is neither 0 nor 1")));
        }
        if idx != k + b {
            return Err(nodes.err(ln, format!("vertex index {idx}, expected {}", k + b)));
        }
        vertices.push(Point::new(
            nodes.num::<f64>(ln, tok[1])?,
            nodes.num::<f64>(ln, tok[2])?,
        ));
    }
    let base = base.unwrap_or(0);

    let mut eles = Lines::new(&ele_text, ele_path);
    let (ln, head) = eles.next_line()?;
    let head: Vec<usize> = head
        .split_whitespace()
        .map(|t| eles.num::<usize>(ln, t))
        .collect::<Result<_>>()?;
    if head.len() < 2 || head[1] < 3 {
        return Err(eles.err(
            ln,
            "expected `<#triangles> <nodes per triangle> [<#attributes>]`".into(),
        ));
    }
    let nt = head[0];
    let mut cells = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, line) = eles.next_line()?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < 4 {
            return Err(eles.err(ln, "triangle row needs `<index> <n1> <n2> <n3>`".into()));
        }
        let mut tri = [0usize; 3];
        for (slot, t) in tri.iter_mut().zip(&tok[1..4]) {
            let raw = eles.num::<usize>(ln, t)?;
            if raw < base || raw - base >= nv {
                return Err(eles.err(ln, format!("vertex index {raw} out of range")));
            }
            *slot = raw - base;
        }
        let pts = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
        let area = polygon_area(&pts);
        if area == 0.0 {
            return Err(eles.err(ln, "degenerate (zero-area) triangle".into()));
        }
        if area < 0.0 {
            tri.swap(1, 2);
        }
        cells.push(tri.to_vec());
    }
    PolygonalMesh::from_cells(vertices, cells)
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    origin: &'a Path,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, origin: &'a Path) -> Self {
        Lines {
            iter: text.lines().enumerate(),
            origin,
        }
    }

    /// Next non-blank line with `#` comments stripped, 1-based line number.
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        for (i, raw) in self.iter.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Ok((i + 1, line));
            }
        }
        Err(Error::Parse {
            path: self.origin.to_path_buf(),
            line: 0,
            msg: "unexpected end of file".into(),
        })
    }

    fn single<T: std::str::FromStr>(&mut self) -> Result<T> {
        let (ln, line) = self.next_line()?;
        self.num(ln, line)
    }

    fn num<T: std::str::FromStr>(&self, ln: usize, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(ln, format!("cannot parse `{tok}`")))
    }

    fn err(&self, line: usize, msg: String) -> Error {
        Error::Parse {
            path: self.origin.to_path_buf(),
            line,
            msg,
        }
    }
}
