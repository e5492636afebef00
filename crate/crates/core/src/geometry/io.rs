//! Plain-text mesh format:
//!
//! ```text
//! nv nt nb
//! x y            (nv lines)
//! i j k          (nt lines, 0-based)
//! i j nx ny      (nb lines)
//! ```
//!
//! Floats are printed with 17 significant digits, which round-trips `f64`.

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryEdge, TriangleMesh};
use crate::{Error, Result};

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn mesh_to_string(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} {} {}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.boundary_edges().len()
    );
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {}", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    for e in mesh.boundary_edges() {
        let _ = writeln!(
            s,
            "{} {} {} {}",
            e.vertices[0],
            e.vertices[1],
            fmt_f64(e.normal[0]),
            fmt_f64(e.normal[1])
        );
    }
    s
}

pub fn write_mesh(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    mesh_from_str(&std::fs::read_to_string(path)?)
}

fn bad(line: usize, reason: impl Into<String>) -> Error {
    Error::Format {
        kind: "mesh",
        line,
        reason: reason.into(),
    }
}

fn fields<T: std::str::FromStr>(line: usize, text: &str, n: usize) -> Result<Vec<T>> {
    let out: Vec<T> = text
        .split_whitespace()
        .map(|tok| tok.parse::<T>().map_err(|_| bad(line, format!("cannot parse `{tok}`"))))
        .collect::<Result<_>>()?;
    if out.len() != n {
        return Err(bad(line, format!("expected {n} fields, found {}", out.len())));
    }
    Ok(out)
}

pub fn mesh_from_str(text: &str) -> Result<TriangleMesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let h: Vec<usize> = fields(ln, header, 3)?;
    let (nv, nt, nb) = (h[0], h[1], h[2]);
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, format!("truncated before {what}")));
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertices")?;
        let v: Vec<f64> = fields(ln, l, 2)?;
        vertices.push([v[0], v[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = next("triangles")?;
        let t: Vec<usize> = fields(ln, l, 3)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, l) = next("boundary edges")?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(bad(ln, format!("expected 4 fields, found {}", toks.len())));
        }
        let idx: Vec<usize> = fields(ln, &toks[..2].join(" "), 2)?;
        let nrm: Vec<f64> = fields(ln, &toks[2..].join(" "), 2)?;
        boundary.push(BoundaryEdge {
            vertices: [idx[0], idx[1]],
            normal: [nrm[0], nrm[1]],
        });
    }
    TriangleMesh::from_parts(vertices, triangles, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, DomainSpec};

    #[test]
    fn round_trip_is_bit_identical() {
        let m = build_mesh(&DomainSpec::ellipse(1.5, 1.0), 0.3).unwrap();
        let text = mesh_to_string(&m);
        let back = mesh_from_str(&text).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.boundary_edges(), m.boundary_edges());
        assert_eq!(mesh_to_string(&back), text);
    }

    #[test]
    fn malformed_input_names_line() {
        let err = mesh_from_str("3 1 3\n0 0\n1 x\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
