//! Reader and writer for the node/segment DGF layout:
//!
//! ```text
//! DGF
//! Vertex
//! parameters 1
//! x y z [pressure]
//! #
//! SIMPLEX
//! parameters 1
//! node node radius
//! #
//! ```
//!
//! A non-positive pressure column marks an inner node. Text after `%` is a
//! comment, a line starting with `#` closes the current block, and unknown
//! blocks are skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryData, VascularNetwork};
use crate::error::{Error, Result};
use crate::geometry::Point3;

#[derive(Clone, Copy, PartialEq)]
enum Block {
    None,
    Vertex,
    Simplex,
    Skip,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_dgf(text: &str) -> Result<VascularNetwork> {
    let mut vertices: Vec<(Point3, Option<BoundaryData>)> = Vec::new();
    let mut simplices: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut block = Block::None;
    let mut saw_vertex = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            block = Block::None;
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        let keyword = first.to_ascii_uppercase();
        if first.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            match keyword.as_str() {
                "DGF" => block = Block::None,
                "VERTEX" => {
                    block = Block::Vertex;
                    saw_vertex = true;
                }
                "SIMPLEX" => block = Block::Simplex,
                "PARAMETERS" if block != Block::None => {}
                _ if block == Block::Vertex || block == Block::Simplex => {
                    return Err(parse_err(lineno, format!("unexpected keyword `{first}`")));
                }
                _ => block = Block::Skip,
            }
            continue;
        }
        match block {
            Block::Vertex => {
                let cols = parse_floats(line, lineno)?;
                if cols.len() < 3 {
                    return Err(parse_err(lineno, "vertex row needs three coordinates"));
                }
                let boundary = cols
                    .get(3)
                    .filter(|p| **p > 0.0)
                    .map(|&pressure| BoundaryData { pressure, po2: None });
                vertices.push((Point3::new(cols[0], cols[1], cols[2]), boundary));
            }
            Block::Simplex => {
                let mut it = line.split_whitespace();
                let a = parse_index(it.next(), lineno)?;
                let b = parse_index(it.next(), lineno)?;
                let r = it
                    .next()
                    .ok_or_else(|| parse_err(lineno, "segment row needs a radius column"))?;
                let r: f64 = r
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("invalid radius `{r}`")))?;
                simplices.push((lineno, a, b, r));
            }
            Block::Skip => {}
            Block::None => return Err(parse_err(lineno, "data outside of a Vertex or SIMPLEX block")),
        }
    }
    if !saw_vertex {
        return Err(parse_err(0, "no Vertex block"));
    }

    let mut net = VascularNetwork::new();
    for (p, b) in vertices {
        net.add_node(p, b);
    }
    for (lineno, a, b, r) in simplices {
        net.add_segment(a, b, r).map_err(|e| match e {
            Error::Topology(m) => Error::Topology(format!("line {lineno}: {m}")),
            Error::Validation(m) => Error::Validation(format!("line {lineno}: {m}")),
            other => other,
        })?;
    }
    Ok(net)
}

fn parse_floats(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("invalid number `{t}`")))
        })
        .collect()
}

fn parse_index(tok: Option<&str>, lineno: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(lineno, "segment row needs two node indices"))?;
    tok.parse::<usize>()
        .map_err(|_| parse_err(lineno, format!("invalid node index `{tok}`")))
}

pub fn read_dgf(path: &Path) -> Result<VascularNetwork> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("input not found: {}", path.display()),
            ))
        } else {
            Error::Io(e)
        }
    })?;
    parse_dgf(&text)
}

/// Serializes `net`; optional `header` lines are emitted as `%` comments.
///
/// Floats use the shortest representation that parses back to the same value.
pub fn write_dgf(net: &VascularNetwork, header: &[String]) -> String {
    let mut out = String::from("DGF\n");
    for h in header {
        let _ = writeln!(out, "% {h}");
    }
    out.push_str("Vertex\nparameters 1\n");
    for n in net.nodes() {
        let p = n.boundary.map_or(0.0, |b| b.pressure);
        let _ = writeln!(
            out,
            "{:e} {:e} {:e} {:e}",
            n.position.x, n.position.y, n.position.z, p
        );
    }
    out.push_str("#\nSIMPLEX\nparameters 1\n");
    for s in net.segments() {
        let _ = writeln!(out, "{} {} {:e}", s.node_a, s.node_b, s.radius);
    }
    out.push_str("#\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const MINIMAL: &str = "DGF\nVertex\nparameters 1\n0 0 0 8000\n1e-4 0 0 4000\n#\nSIMPLEX\nparameters 1\n0 1 6e-6\n#\n";

    #[test]
    fn minimal_file() {
        let net = parse_dgf(MINIMAL).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.segment_count(), 1);
        assert!(net.nodes().iter().all(|n| n.is_boundary()));
        assert_relative_eq!(net.segment_length(0), 1e-4);
        assert_eq!(net.node(1).boundary.unwrap().pressure, 4000.0);
    }

    #[test]
    fn self_loop_is_topology_error() {
        let text = "Vertex\n0 0 0\n1 0 0\n#\nSIMPLEX\n0 0 5e-6\n#\n";
        assert!(matches!(parse_dgf(text), Err(Error::Topology(_))));
    }

    #[test]
    fn unknown_node_is_topology_error() {
        let text = "Vertex\n0 0 0\n1 0 0\n#\nSIMPLEX\n0 7 5e-6\n#\n";
        assert!(matches!(parse_dgf(text), Err(Error::Topology(_))));
    }

    #[test]
    fn non_positive_radius_is_validation_error() {
        let text = "Vertex\n0 0 0\n1 0 0\n#\nSIMPLEX\n0 1 -5e-6\n#\n";
        assert!(matches!(parse_dgf(text), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "DGF\nVertex\n0 0 0\n1 zero 0\n#\n";
        match parse_dgf(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_unknown_blocks_are_ignored() {
        let text = "DGF % header\n% full-line comment\nVertex % nodes\n0 0 0 1000\n1 0 0\n#\nBOUNDARYDOMAIN\ndefault 1\n#\nSIMPLEX\n0 1 3e-6 42\n#\n";
        let net = parse_dgf(text).unwrap();
        assert!(net.node(0).is_boundary());
        assert!(!net.node(1).is_boundary());
        assert_eq!(net.segment(0).radius, 3e-6);
    }

    proptest! {
        #[test]
        fn write_parse_round_trip(
            coords in prop::collection::vec((-1e-3f64..1e-3, -1e-3f64..1e-3, -1e-3f64..1e-3, prop::option::of(1.0f64..1e4)), 2..12),
            radii in prop::collection::vec(1e-7f64..1e-4, 1..12),
        ) {
            let mut net = VascularNetwork::new();
            for (x, y, z, p) in &coords {
                net.add_node(Point3::new(*x, *y, *z), p.map(|pressure| BoundaryData { pressure, po2: None }));
            }
            for (i, r) in radii.iter().enumerate() {
                let a = i % coords.len();
                let b = (i + 1) % coords.len();
                if a != b && net.add_segment(a, b, *r).is_err() {
                    continue;
                }
            }
            let back = parse_dgf(&write_dgf(&net, &["provenance".into()])).unwrap();
            prop_assert_eq!(back, net);
        }
    }
}
