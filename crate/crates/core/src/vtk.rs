//! Legacy ASCII VTK output: the network as poly-lines and tissue fields on
//! structured points.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::network::VascularNetwork;
use crate::tissue_grid::TissueGrid;

/// A named per-node or per-cell scalar array.
pub struct ScalarField<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

fn check(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Validation(format!("field {name} has {got} values, expected {want}")));
    }
    Ok(())
}

/// One line cell per segment with `radius` as cell data; `point_data`
/// arrays must have one value per node.
pub fn network_vtk(net: &VascularNetwork, point_data: &[ScalarField], header: &str) -> Result<String> {
    let n = net.node_count();
    let m = net.segment_count();
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0").unwrap();
    writeln!(s, "{}", header.lines().next().unwrap_or("vascular network")).unwrap();
    writeln!(s, "ASCII\nDATASET POLYDATA\nPOINTS {n} double").unwrap();
    for node in net.nodes() {
        let p = node.position;
        writeln!(s, "{:e} {:e} {:e}", p[0], p[1], p[2]).unwrap();
    }
    writeln!(s, "LINES {m} {}", 3 * m).unwrap();
    for seg in net.segments() {
        writeln!(s, "2 {} {}", seg.node_a, seg.node_b).unwrap();
    }
    writeln!(s, "CELL_DATA {m}\nSCALARS radius double 1\nLOOKUP_TABLE default").unwrap();
    for seg in net.segments() {
        writeln!(s, "{:e}", seg.radius).unwrap();
    }
    if !point_data.is_empty() {
        writeln!(s, "POINT_DATA {n}").unwrap();
        for f in point_data {
            check(f.name, f.values.len(), n)?;
            scalars(&mut s, f);
        }
    }
    Ok(s)
}

/// Cell fields on the tissue grid; `vectors` entries hold one 3-vector per cell.
pub fn grid_vtk(
    grid: &TissueGrid,
    cell_data: &[ScalarField],
    vectors: &[(&str, &[[f64; 3]])],
    header: &str,
) -> Result<String> {
    let c = grid.counts();
    let h = grid.spacing();
    let o = grid.bounds().lower;
    let cells = grid.cell_count();
    let mut s = String::new();
    writeln!(s, "# vtk DataFile Version 3.0").unwrap();
    writeln!(s, "{}", header.lines().next().unwrap_or("tissue fields")).unwrap();
    writeln!(s, "ASCII\nDATASET STRUCTURED_POINTS").unwrap();
    writeln!(s, "DIMENSIONS {} {} {}", c[0] + 1, c[1] + 1, c[2] + 1).unwrap();
    writeln!(s, "ORIGIN {:e} {:e} {:e}", o[0], o[1], o[2]).unwrap();
    writeln!(s, "SPACING {:e} {:e} {:e}", h[0], h[1], h[2]).unwrap();
    writeln!(s, "CELL_DATA {cells}").unwrap();
    for f in cell_data {
        check(f.name, f.values.len(), cells)?;
        scalars(&mut s, f);
    }
    for (name, v) in vectors {
        check(name, v.len(), cells)?;
        writeln!(s, "VECTORS {name} double").unwrap();
        for x in v.iter() {
            writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]).unwrap();
        }
    }
    Ok(s)
}

fn scalars(s: &mut String, f: &ScalarField) {
    writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", f.name).unwrap();
    for v in f.values {
        writeln!(s, "{v:e}").unwrap();
    }
}
