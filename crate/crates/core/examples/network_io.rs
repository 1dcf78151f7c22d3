//! Reads a DGF network (or a built-in sample), prints its characteristics
//! and writes it back as DGF and VTK.
//!
//!     cargo run --example network_io -- [file.dgf]

use microvasc::network::{parse_dgf, read_dgf, write_dgf};
use microvasc::statistics::network_characteristics;
use microvasc::vtk::network_vtk;

const SAMPLE: &str = "DGF
% three vessels meeting at one node
Vertex
parameters 1
0 0 0 8000
1e-4 0 0 0
2e-4 5e-5 0 4000
2e-4 -5e-5 0 4500
#
SIMPLEX
parameters 1
0 1 6e-6
1 2 4.5e-6
1 3 5e-6
#
";

fn main() -> microvasc::Result<()> {
    let net = match std::env::args().nth(1) {
        Some(p) => read_dgf(p.as_ref())?,
        None => parse_dgf(SAMPLE)?,
    };
    let c = network_characteristics(&net);
    println!("nodes {}  segments {}  boundary nodes {}", net.node_count(), c.segments, net.boundary_nodes().count());
    println!("L = {:.4e} m  A = {:.4e} m^2  V = {:.4e} m^3", c.length, c.area, c.volume);

    let dir = std::env::temp_dir().join("microvasc_network_io");
    std::fs::create_dir_all(&dir)?;
    let text = write_dgf(&net, &["round trip".to_string()]);
    assert_eq!(parse_dgf(&text)?, net);
    std::fs::write(dir.join("network.dgf"), text)?;
    std::fs::write(dir.join("network.vtk"), network_vtk(&net, &[], "network")?)?;
    println!("wrote {}", dir.display());
    Ok(())
}
