//! A single vessel without wall leakage: the solved flux equals the Poiseuille
//! conductance times the pressure drop, and the tissue stays at rest.

use microvasc::flow::{solve_flow, FlowParameters};
use microvasc::geometry::{DomainBox, Point3};
use microvasc::network::{BoundaryData, VascularNetwork};
use microvasc::rheology::{vessel_conductance, RheologyParameters};
use microvasc::tissue_grid::{build_surface_coupling, SurfaceSampling, TissueGrid};

fn main() -> microvasc::Result<()> {
    let (r, l) = (5e-6, 100e-6);
    let mut net = VascularNetwork::new();
    let a = net.add_node(Point3::new(0.0, 50e-6, 50e-6), Some(BoundaryData { pressure: 8000.0, po2: None }));
    let m = net.add_node(Point3::new(l / 2.0, 50e-6, 50e-6), None);
    let b = net.add_node(Point3::new(l, 50e-6, 50e-6), Some(BoundaryData { pressure: 4000.0, po2: None }));
    net.add_segment(a, m, r)?;
    net.add_segment(m, b, r)?;

    let grid = TissueGrid::new(DomainBox::cube(0.0, 100e-6)?, [5, 5, 5])?;
    let coupling = build_surface_coupling(&grid, &net, SurfaceSampling::default())?;
    let rheology = RheologyParameters::default();
    let params = FlowParameters { wall_conductivity: 0.0, ..Default::default() };
    let state = solve_flow(&net, &grid, &coupling, &rheology, &params, 1e-14)?;

    let g = vessel_conductance(r, l, rheology.viscosity_for_radius(r)?)?;
    println!("midpoint pressure {:.6} Pa (expected 6000)", state.p_v[m]);
    println!("flux {:.6e} m^3/s, G·Δp = {:.6e}", state.q_v[0], g * 4000.0);
    println!("mean velocity {:.6e} m/s", state.u_v[0]);
    println!("F_tv {:e} ug/s", state.f_tv);
    Ok(())
}
